# Model package for the lethargy application: normed spaces, solvers and constructions
