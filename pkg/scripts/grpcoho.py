#!/usr/bin/env python
"""
grpcoho runner.

Usage:
    python scripts/grpcoho.py cd-bounds -i inputs/z16_z4.grp --out cert.json
    python scripts/grpcoho.py verify-cert -i cert.json
    python scripts/grpcoho.py survey --json
"""
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parents[1] / "src"))

from cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
