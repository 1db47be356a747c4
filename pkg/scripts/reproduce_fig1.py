#!/usr/bin/env python3
"""Image copying: ergodic and 4x4 blockwise Gaussian blur of the checkerboard.

Extra arguments are passed through, e.g. ``--out DIR`` or ``--set KEY=VALUE``.
"""

import sys
from pathlib import Path

from klrep.cli import main

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "fig1.yaml"

if __name__ == "__main__":
    sys.exit(main(["image-replicate", "--config", str(CONFIG), *sys.argv[1:]]))
