#!/usr/bin/env python3
"""KL potential landscape of the GC-biased DNA preset on a 101x101 grid.

Extra arguments are passed through, e.g. ``--out DIR`` or ``--set KEY=VALUE``.
"""

import sys
from pathlib import Path

from klrep.cli import main

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "fig3.yaml"

if __name__ == "__main__":
    sys.exit(main(["dna-landscape", "--config", str(CONFIG), *sys.argv[1:]]))
