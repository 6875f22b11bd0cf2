"""Regenerate the bundled .fib catalog from the fixture builders and mirror
the report schema into schemas/v1."""

from __future__ import annotations

import argparse
import shutil
from pathlib import Path

from fibalg import catalog

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "src" / "fibalg" / "catalog")
    args = ap.parse_args()
    for p in catalog.write_all(args.out):
        print(p)
    schema = ROOT / "schemas" / "v1" / "report.json"
    schema.parent.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(ROOT / "src" / "fibalg" / "schemas" / "report.v1.json", schema)
    print(schema)


if __name__ == "__main__":
    main()
