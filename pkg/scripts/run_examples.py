#!/usr/bin/env python3
"""Emit the full geometry report of every bundled example.

Usage: python scripts/run_examples.py [outdir]

Without an output directory the reports stream to stdout, separated by a
header line per example."""

import sys
from pathlib import Path

from ghl.fileio import build_report, bundled_path, load_ghl, serialize_report

EXAMPLES = ("abelian2", "sphere", "iwasawa", "kodaira", "kodaira-thurston")


def main(argv) -> int:
    outdir = Path(argv[1]) if len(argv) > 1 else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for name in EXAMPLES:
        loaded = load_ghl(bundled_path(name))
        text = serialize_report(build_report(loaded))
        if outdir:
            (outdir / f"{name}.report.json").write_text(text, encoding="utf-8")
            print(f"wrote {outdir / (name + '.report.json')}")
        else:
            print(f"==== {name} " + "=" * (60 - len(name)))
            sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
