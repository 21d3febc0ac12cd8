"""Allow ``python -m fracmat``."""

from __future__ import annotations

import sys

from fracmat.cli import main

if __name__ == "__main__":
    sys.exit(main())
