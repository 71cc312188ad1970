# Numerical domain services
