"""
lincomp command-line entry point.

Run with:
    python lincomp_cli.py interval "[1,2] + ~[1,2]"
    python lincomp_cli.py sample spec.json --seed 7 --n 100000
"""

import sys

from lincomp import create_cli

if __name__ == '__main__':
    sys.exit(create_cli().main())
