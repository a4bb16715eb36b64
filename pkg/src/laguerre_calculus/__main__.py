# Copyright 2025 laguerre-calculus contributors.
# See LICENSE file for licensing details.

"""Run `laguerre-calc` as `python -m laguerre_calculus`."""

import sys

from laguerre_calculus.cli import main

if __name__ == "__main__":
    sys.exit(main())
