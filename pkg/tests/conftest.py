import sys
from pathlib import Path

# make the package importable without installation, and oracles.py importable
ROOT = Path(__file__).resolve().parent.parent
for p in (str(ROOT / "src"), str(ROOT / "tests")):
    if p not in sys.path:
        sys.path.insert(0, p)
