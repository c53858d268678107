# Controller package for the lethargy application
