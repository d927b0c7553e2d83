#!/usr/bin/env python3
"""Run the bundled analysis requests and print their text reports.

Usage: python scripts/run_bundled_requests.py [--format json|text]
"""

import argparse
import json
import pathlib
import sys

from eulerchar.cli import parse_request, render_text, report_to_dict
from eulerchar.euler import analyze

REQUEST_DIR = pathlib.Path(__file__).resolve().parent.parent / "data" / "requests"


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--format", choices=("json", "text"), default="text")
    args = ap.parse_args()
    for path in sorted(REQUEST_DIR.glob("*.json")):
        parsed = parse_request(json.loads(path.read_text()))
        report = analyze(
            parsed["curve"],
            parsed["prime"],
            parsed["conductor"],
            parsed["abelian_variety"],
            parsed["external"],
            samples=parsed["samples"],
            precision=parsed["precision_digits"],
            target_chi_sigma_exponent=parsed["target_chi_sigma_exponent"],
        )
        doc = report_to_dict(report)
        print(f"=== {path.name} ===")
        if args.format == "json":
            print(json.dumps(doc, indent=2))
        else:
            print(render_text(doc))
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
