#!/usr/bin/env python3
"""Run every acceptance criterion and write reports/reproduce.json.

Equivalent to `serialquota reproduce-paper --out reports/reproduce.json`.
"""

import sys
from pathlib import Path

from serialquota.cli import main

if __name__ == "__main__":
    out = Path(__file__).resolve().parent.parent / "reports" / "reproduce.json"
    out.parent.mkdir(exist_ok=True)
    sys.exit(main(["reproduce-paper", "--out", str(out), *sys.argv[1:]]))
