"""Allow ``python -m narramine`` as an alternative to the console script."""

import sys

from narramine.cli import main

if __name__ == "__main__":
    sys.exit(main())
