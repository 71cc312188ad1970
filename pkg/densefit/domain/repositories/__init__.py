# Repository interfaces
