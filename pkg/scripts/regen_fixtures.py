#!/usr/bin/env python3
"""Regenerate the bundled expected-report fixtures (regression snapshots).

The snapshots freeze the engine's current output; the worked-example values
themselves are asserted directly against hand-transcribed tables in
tests/test_acceptance.py, so these files only guard against regressions."""

from pathlib import Path

from ghl.fileio import build_report, bundled_path, load_ghl, serialize_report

DATA = Path(__file__).resolve().parent.parent / "src" / "ghl" / "data"


def main() -> None:
    for name in ("abelian2", "sphere", "iwasawa", "kodaira", "kodaira-thurston"):
        loaded = load_ghl(bundled_path(name))
        text = serialize_report(build_report(loaded))
        out = DATA / f"{name}.expected.json"
        out.write_text(text, encoding="utf-8")
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
