"""Grid-refinement study: FD error against exact levels for the calibration problems.

Prints the error on successive doublings, the observed order and the
Richardson-extrapolated error.
"""

import argparse
import math

import numpy as np

from twisted_sutherland.fdspectra import FDProblem, fd_eigenvalues
from twisted_sutherland.hamassembly import assemble_closed_form, free_particle_spec, poschl_teller_spec
from twisted_sutherland.repcalc import spectrum_twisted

PROBLEMS = {
    "box": lambda m: (free_particle_spec(), [j * j / 2 for j in range(1, m + 1)]),
    "poschl-teller": lambda m: (poschl_teller_spec(2), [(j + 2) ** 2 for j in range(m)]),
    "su3-k1": lambda m: (assemble_closed_form(3, 1), [float(x) for x in spectrum_twisted(1, 3, 200).expanded()[:m]]),
    "su3-k2": lambda m: (assemble_closed_form(3, 2), [float(x) for x in spectrum_twisted(2, 3, 200).expanded()[:m]]),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("problem", choices=sorted(PROBLEMS))
    parser.add_argument("--levels", type=int, default=4)
    parser.add_argument("--start", type=int, default=512)
    parser.add_argument("--steps", type=int, default=6)
    args = parser.parse_args()

    spec, exact = PROBLEMS[args.problem](args.levels)
    exact = np.array(exact)
    grids = [args.start * 2**i for i in range(args.steps)]
    prev_vals, prev_err = None, None
    print(f"{'grid':>8} {'max rel err':>12} {'order':>6} {'richardson':>12}")
    for g in grids:
        vals = fd_eigenvalues(FDProblem(spec, g, args.levels))
        err = float(np.max(np.abs(vals - exact) / exact))
        order = f"{math.log2(prev_err / err):6.2f}" if prev_err else " " * 6
        extra = ""
        if prev_vals is not None:
            rich = (4 * vals - prev_vals) / 3
            extra = f"{float(np.max(np.abs(rich - exact) / exact)):12.2e}"
        print(f"{g:>8} {err:12.2e} {order} {extra}")
        prev_vals, prev_err = vals, err


if __name__ == "__main__":
    main()
