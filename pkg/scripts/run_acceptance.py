"""Run the acceptance criteria and print one line per criterion.

    python scripts/run_acceptance.py            # all nine
    python scripts/run_acceptance.py 7 8 --json results.json
"""

import argparse
import json
import sys

from twisted_sutherland.acceptance import CRITERIA, run_criterion


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("numbers", nargs="*", type=int, help="criteria to run (default: all)")
    parser.add_argument("--json", help="also write results to this file")
    args = parser.parse_args()

    numbers = args.numbers or [num for num, *_ in CRITERIA]
    results = []
    for num in numbers:
        res = run_criterion(num)
        print(res.line(), flush=True)
        results.append(res)
    passed = sum(r.ok for r in results)
    print(f"{passed}/{len(results)} criteria pass")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.to_json() for r in results], fh, indent=2)
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
