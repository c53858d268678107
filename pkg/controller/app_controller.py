"""
Singleton controller for the lethargy application.
Owns the configured tolerances and application state, and hands subcommands to the construction controller.
"""

import logging
from datetime import datetime
from typing import Any, Dict, Optional

from controller.construction_controller import SUBCOMMANDS, ConstructionController, RunFlags
from model.config import AppState, Tolerances, load_log_level, load_tolerances
from model.problem_io import ProblemSpec, Report, parse_problem

logger = logging.getLogger(__name__)


class AppController:
    """
    Singleton controller shared by every entry point; it is the only component that talks to the model.
    """

    _instance: Optional['AppController'] = None
    _initialized: bool = False

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super(AppController, cls).__new__(cls)
        return cls._instance

    def __init__(self, dotenv_path: Optional[str] = None):
        if not self._initialized:
            self._tolerances = load_tolerances(dotenv_path)
            self._app_state = AppState(log_level=load_log_level(), subcommands=list(SUBCOMMANDS))
            self._construction_controller = ConstructionController(self._tolerances)
            self._initialized = True

    @classmethod
    def reset(cls) -> None:
        """Drop the singleton so the next call re-reads the environment."""
        cls._instance = None
        cls._initialized = False

    @property
    def app_state(self) -> AppState:
        return self._app_state

    @property
    def tolerances(self) -> Tolerances:
        """Tolerances from defaults and the environment."""
        return self._tolerances

    @property
    def construction_controller(self) -> ConstructionController:
        return self._construction_controller

    def update_app_state(self, **kwargs) -> None:
        """
        Update the application state with new values.

        Args:
            **kwargs: Key-value pairs to update in the app state
        """
        for key, value in kwargs.items():
            if hasattr(self._app_state, key):
                setattr(self._app_state, key, value)
        self._app_state.last_updated = datetime.now()

    def load_problem(self, source: str) -> ProblemSpec:
        """Parse a problem file (or JSON text)."""
        return parse_problem(source)

    def run(self, subcommand: str, problem: Optional[str], flags: RunFlags) -> Report:
        """
        Run one subcommand end to end.

        Args:
            subcommand: Subcommand name
            problem: Problem file path, or None for subcommands that do not take one
            flags: Command-line options

        Returns:
            Report of the run
        """
        spec = self.load_problem(problem) if problem else None
        logger.info("running %s%s", subcommand, f" on {problem}" if problem else "")
        report = self._construction_controller.run_subcommand(subcommand, spec, flags)
        self.update_app_state(last_report_hash=report.problem_hash)
        return report

    def get_app_info(self) -> Dict[str, Any]:
        return {
            "name": "lethargy",
            "version": "1.0.0",
            "architecture": "MVC",
            "tolerances": self._tolerances.model_dump(),
            "app_state": self._app_state.model_dump(),
        }
