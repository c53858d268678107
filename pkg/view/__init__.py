# View package for the lethargy application: text rendering of reports
