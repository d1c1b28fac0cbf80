"""Compare the two coefficient conventions for the [sum (n_i - m)]^2 term.

For odd N the closed-form constant carries c * [sum (n_i - m)]^2. The generic
assembly gives c = 1/(2n+1); the alternative c = 1/(2n) is kept for
comparison. This script prints the exact constant terms of both and the
FD spectra against the representation-theory prediction.
"""

import argparse

from twisted_sutherland.fdspectra import verify_variants
from twisted_sutherland.fockspin import matrix_to_json
from twisted_sutherland.hamassembly import assemble_closed_form, assemble_generic, compare_specs


def main() -> None:
    parser = argparse.ArgumentParser(description="S^2 coefficient conventions, side by side")
    parser.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--grid", type=int, default=16384)
    parser.add_argument("--levels", type=int, default=5)
    parser.add_argument("--tol", type=float, default=1e-4)
    args = parser.parse_args()

    for k in args.k:
        generic = assemble_generic(3, k)
        print(f"== su(3), k={k}, spin dimension {generic.dim}")
        for variant in ("derived", "printed"):
            spec = assemble_closed_form(3, k, variant)
            diff = compare_specs(generic, spec)
            print(f"  {variant:8s} constant {matrix_to_json(spec.constant_term)}  "
                  f"{'matches generic' if not diff else 'differs from generic'}")
        dual = verify_variants(3, k, args.grid, args.levels, args.tol)
        print(dual.derived.table())
        print(dual.printed.table())
        print(f"verdict: {dual.verdict}\n")


if __name__ == "__main__":
    main()
