# Data transfer objects for every file crossing the process boundary
