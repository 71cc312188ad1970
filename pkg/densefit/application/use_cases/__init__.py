# Application use cases, one class per CLI action
