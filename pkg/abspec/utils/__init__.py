"""Common utilities: logging, artifact writers, run configuration and errors."""
