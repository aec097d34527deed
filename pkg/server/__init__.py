"""Command line, runtime settings, logging and the verify report."""
