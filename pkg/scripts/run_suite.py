#!/usr/bin/env python3
"""Convenience launcher for the full verification battery.

Equivalent to `conebessel suite`; extra arguments are passed through, so
`scripts/run_suite.py --quick --seed 3 --json out.json` works the same as
the installed entry point.  Exit status 0 means every identity passed.
"""

import sys

from conebessel.cli import main

if __name__ == "__main__":
    sys.exit(main(["suite"] + sys.argv[1:]))
