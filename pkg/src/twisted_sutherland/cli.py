"""Command-line front end.

Every command prints JSON by default (``--format table`` or ``csv`` for
the tabular ones). Exit status: 0 pass, 1 verification failure, 2 usage
error. Options may also come from ``--config FILE`` (JSON object keyed by
option name, plus an optional ``command``); explicit flags win. When
``TWISTED_SUTHERLAND_OUTPUT_DIR`` is set and ``--output`` is not, output
goes to ``<dir>/<command>.<format>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from .acceptance import CRITERIA, run_criterion
from .fdspectra import compare, verify_variants
from .fockspin import dim_invariant, invariant_basis, invariant_basis_bruteforce
from .hamassembly import assemble_closed_form, standard_sutherland_spec
from .repcalc import (
    DominantWeight,
    pieri_decompose,
    spectrum_standard,
    spectrum_twisted,
    spectrum_untwisted,
)
from .rootfold import (
    Family,
    build_folded_roots,
    rho_theta,
    rho_theta_from_p_plus,
    rho_theta_norm,
    trace_form,
)
from .weylgrp import build_group, check_density_invariance, check_translation_normal, expected_order

OUTPUT_DIR_ENV = "TWISTED_SUTHERLAND_OUTPUT_DIR"


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    payload: Any
    rows: list[dict] = field(default_factory=list)
    ok: bool = True
    text: str = ""  # preferred table rendering, if any


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _table(rows: list[dict]) -> str:
    if not rows:
        return "(empty)"
    cols = list(rows[0])
    cells = [[_fmt(r.get(c, "")) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows({k: _fmt(v) for k, v in r.items()} for r in rows)
    return buf.getvalue()


# --- commands ---------------------------------------------------------------

def cmd_roots(args) -> Outcome:
    try:
        data = build_folded_roots(args.family, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    family = Family(args.family)
    checks: dict[str, Any] = {
        "rho_from_roots": str(rho_theta(data)),
        "rho_from_p_plus": str(rho_theta_from_p_plus(data)),
    }
    ok = rho_theta(data) == rho_theta_from_p_plus(data)
    payload = data.to_json()
    payload["readable"] = {
        "positive_roots": [str(f) for f in data.positive_roots],
        "positive_weights": [str(f) for f in data.positive_weights],
        "p_plus": [str(f) for f in data.p_plus],
    }
    if family.is_a_series:
        norm = rho_theta_norm(data, trace_form(family, args.n))
        payload["rho_norm"] = str(norm)
        n = args.n
        if family is Family.A_ODD:
            expected = Fraction(n * (2 * n - 1) * (2 * n + 1), 6)
        elif family is Family.A_EVEN:
            expected = Fraction(2 * n * (n + 1) * (2 * n + 1), 6)
        else:
            expected = Fraction(n * (n + 1) * (n + 2), 12)  # su(n+1): dim * h / 12
        checks["rho_norm_expected"] = str(expected)
        ok = ok and norm == expected
    checks["passed"] = ok
    payload["verification"] = checks
    rows = [{"set": k, "forms": ", ".join(v)} for k, v in payload["readable"].items()]
    return Outcome(payload, rows, ok)


def cmd_spectrum(args) -> Outcome:
    kind = args.kind or "twisted"
    cutoff = Fraction(args.cutoff)
    try:
        if kind == "twisted":
            pred = spectrum_twisted(_need(args, "k"), args.N, cutoff)
        elif kind == "untwisted":
            pred = spectrum_untwisted(_need(args, "gamma"), args.N, cutoff)
        else:
            pred = spectrum_standard(_need(args, "gamma"), args.N, cutoff)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = [
        {"eigenvalue": str(e.eigenvalue), "multiplicity": e.multiplicity,
         "weights": " ".join(",".join(map(str, w.coeffs)) for w in e.weights)}
        for e in pred.entries
    ]
    payload = {"kind": kind, "N": args.N, **pred.to_json()}
    return Outcome(payload, rows, True)


def cmd_verify(args) -> Outcome:
    levels, grid = args.levels, args.grid
    if args.untwisted:
        gamma = _need(args, "gamma")
        spec = standard_sutherland_spec(args.N, gamma + 1)
        pred = spectrum_standard(gamma, args.N, _cutoff(lambda c: spectrum_standard(gamma, args.N, c), levels))
        if spec.n != 1:
            raise UsageError("FD verification is rank one: use N=2 for the untwisted model")
        report = compare(spec, pred, grid, levels, args.tol, extrapolate=args.richardson,
                         label=f"standard su({args.N}) g={gamma + 1}")
        return Outcome(report.to_json(), _level_rows(report), report.passed, report.table())
    k = _need(args, "k")
    if args.N % 2 == 0 and k % 2 == 1:
        raise UsageError(f"no reduced system at N={args.N}, k={k}: the invariant subspace is empty")
    if args.N != 3:
        raise UsageError("FD verification is rank one: the twisted case needs N=3")
    if args.variant == "both":
        dual = verify_variants(args.N, k, grid, levels, args.tol)
        text = "\n\n".join([dual.derived.table(), dual.printed.table(), f"verdict: {dual.verdict}"])
        ok = dual.derived.passed and not dual.printed.passed
        return Outcome(dual.to_json(), _level_rows(dual.derived), ok, text)
    spec = assemble_closed_form(args.N, k, args.variant)
    pred = spectrum_twisted(k, args.N, _cutoff(lambda c: spectrum_twisted(k, args.N, c), levels))
    report = compare(spec, pred, grid, levels, args.tol, extrapolate=args.richardson,
                     label=f"twisted su({args.N}) k={k} [{args.variant}]")
    payload = report.to_json()
    text = report.table()
    if not report.passed:
        off = report.offsets
        payload["offset_mean"] = float(off.mean())
        payload["offset_spread"] = float(off.max() - off.min())
        text += f"\nuniform offset diagnosis: mean {off.mean():+.6f}, spread {off.max() - off.min():.2e}"
    return Outcome(payload, _level_rows(report), report.passed, text)


def _level_rows(report) -> list[dict]:
    return [
        {"level": lv.index, "predicted": str(lv.predicted), "computed": lv.computed, "rel_error": lv.error}
        for lv in report.levels
    ]


def _cutoff(make: Callable[[Fraction], Any], levels: int) -> Fraction:
    cutoff = Fraction(20)
    while len(make(cutoff).expanded()) < levels:
        cutoff *= 2
    return cutoff


def cmd_weyl(args) -> Outcome:
    try:
        group = build_group(args.N)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload = group.to_json()
    ok = group.order == expected_order(args.N)
    if group.n <= 3:
        payload["translations_normal"] = check_translation_normal(group)
        ok = ok and payload["translations_normal"]
    if args.trials:
        k = args.k if args.k is not None else 2
        res = check_density_invariance(args.N, k, args.trials, args.seed)
        payload["invariance"] = {"k": k, "trials": res.trials, "passed": res.passed, "witness": res.witness}
        ok = ok and res.passed
    rows = [{"N": args.N, "order": group.order, "expected": expected_order(args.N)}]
    return Outcome(payload, rows, ok)


def cmd_dims(args) -> Outcome:
    k = _need(args, "k")
    try:
        dim = dim_invariant(args.N, k)
        basis = invariant_basis(args.N, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload = {"N": args.N, "k": k, "dim": dim, "basis": basis.to_json()}
    ok = dim == basis.dim
    if args.bruteforce:
        brute = len(invariant_basis_bruteforce(args.N, k))
        payload["bruteforce_dim"] = brute
        ok = ok and brute == dim
    return Outcome(payload, [{"N": args.N, "k": k, "dim": dim}], ok)


def cmd_pieri(args) -> Outcome:
    k = _need(args, "k")
    try:
        coeffs = tuple(int(x) for x in str(args.weight).split(",")) if args.weight else ()
        weight = DominantWeight(args.N, coeffs)
        result = sorted((w.coeffs for w in pieri_decompose(weight, k)), reverse=True)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = [{"weight": ",".join(map(str, c))} for c in result]
    return Outcome([list(c) for c in result], rows, True)


def cmd_check_all(args) -> Outcome:
    numbers = [num for num, *_ in CRITERIA]
    if args.only:
        try:
            wanted = sorted({int(x) for x in str(args.only).split(",")})
        except ValueError as exc:
            raise UsageError(f"--only expects comma-separated numbers: {exc}") from exc
        if not set(wanted) <= set(numbers):
            raise UsageError(f"criteria are numbered {numbers[0]}..{numbers[-1]}")
        numbers = wanted
    results = []
    for num in numbers:
        res = run_criterion(num)
        results.append(res)
        if args.format == "table":
            print(res.line(), file=sys.stderr, flush=True)
    rows = [
        {"criterion": r.number, "title": r.title, "status": "PASS" if r.ok else "FAIL",
         "seconds": round(r.seconds, 2), "detail": r.detail}
        for r in results
    ]
    payload = {"passed": all(r.ok for r in results), "criteria": [r.to_json() for r in results]}
    return Outcome(payload, rows, payload["passed"], "\n".join(r.line() for r in results))


def _need(args, name: str):
    value = getattr(args, name, None)
    if value is None:
        raise UsageError(f"--{name} is required here")
    return value


# --- parser -----------------------------------------------------------------

COMMANDS: dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "roots": cmd_roots,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "weyl": cmd_weyl,
    "dims": cmd_dims,
    "pieri": cmd_pieri,
    "check-all": cmd_check_all,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 already; keep the message on stderr
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table", "csv"), default="json")
    common.add_argument("--output", help="write here instead of stdout")
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="twisted-sutherland", description=__doc__.split("\n\n")[0], parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("roots", parents=[common], help="folded root data and rho checks")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("spectrum", parents=[common], help="predicted spectrum from representation theory")
    g = p.add_mutually_exclusive_group()
    for kind in ("twisted", "untwisted", "standard"):
        g.add_argument(f"--{kind}", dest="kind", action="store_const", const=kind)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--gamma", type=int)
    p.add_argument("--cutoff", default="40")

    p = sub.add_parser("verify", parents=[common], help="finite differences against the prediction")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--untwisted", action="store_true")
    p.add_argument("--gamma", type=int)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--grid", type=int, default=16384)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--variant", choices=("derived", "printed", "both"), default="derived")
    p.add_argument("--richardson", action="store_true")

    p = sub.add_parser("weyl", parents=[common], help="twisted Weyl group order and invariance")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=0)

    p = sub.add_parser("dims", parents=[common], help="invariant Fock subspace")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--bruteforce", action="store_true")

    p = sub.add_parser("pieri", parents=[common], help="tensor product with a symmetric power")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--weight", required=True, help="comma-separated fundamental-weight coefficients")
    p.add_argument("--k", type=int)

    p = sub.add_parser("check-all", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return parser


def _load_config(argv: list[str]) -> tuple[list[str], dict]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv, {}
    try:
        config = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from exc
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    command = config.pop("command", None)
    if command and not any(a in COMMANDS for a in argv):
        argv = [command, *argv]
    return argv, {k.replace("-", "_"): v for k, v in config.items()}


def _parse(argv: list[str]) -> argparse.Namespace:
    argv, config = _load_config(argv)
    parser = build_parser()
    if config:
        sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        for name, sp in sub.choices.items():
            valid = {a.dest for a in sp._actions}
            unknown = set(config) - valid
            if name in argv and unknown:
                raise UsageError(f"unknown config keys for {name}: {sorted(unknown)}")
            sp.set_defaults(**{k: v for k, v in config.items() if k in valid})
            for action in sp._actions:  # config may satisfy required flags
                if action.dest in config:
                    action.required = False
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a command is required: " + ", ".join(COMMANDS))
    return args


def _render(outcome: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(outcome.payload, indent=2, default=str)
    if fmt == "csv":
        return _csv(outcome.rows)
    return outcome.text or _table(outcome.rows)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        outcome = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    text = _render(outcome, args.format)
    out = args.output
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{args.command}.{args.format}")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + ("\n" if not text.endswith("\n") else ""))
    else:
        print(text)
    return 0 if outcome.ok else 1


if __name__ == "__main__":
    sys.exit(main())
