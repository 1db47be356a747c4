#!/usr/bin/env python3
"""Seeded invariant checks; exit status 1 if any check fails.

Extra arguments are passed through, e.g. ``--out DIR`` or ``--set KEY=VALUE``.
"""

import sys
from pathlib import Path

from klrep.cli import main

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "verify.yaml"

if __name__ == "__main__":
    sys.exit(main(["verify", "--config", str(CONFIG), *sys.argv[1:]]))
