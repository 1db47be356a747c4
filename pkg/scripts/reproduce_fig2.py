#!/usr/bin/env python3
"""DNA copying with proofreading: 50-step potential and production trace.

Extra arguments are passed through, e.g. ``--out DIR`` or ``--set KEY=VALUE``.
"""

import sys
from pathlib import Path

from klrep.cli import main

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "fig2.yaml"

if __name__ == "__main__":
    sys.exit(main(["dna-timeseries", "--config", str(CONFIG), *sys.argv[1:]]))
