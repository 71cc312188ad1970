# File storage adapters
