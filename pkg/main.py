"""Main entry point for the steam command line - imports main from server package."""

import sys

from server.cli import main

if __name__ == "__main__":
    sys.exit(main())
