"""The nine end-to-end acceptance checks, shared by ``check-all`` and the test suite."""

from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .fdspectra import compare, verify_variants
from .fockspin import dim_invariant, invariant_basis_bruteforce
from .hamassembly import assemble_closed_form, assemble_generic, compare_specs, standard_sutherland_spec
from .repcalc import (
    DominantWeight,
    admissible_twisted,
    conjugate,
    pieri_capacities,
    pieri_decompose,
    pieri_multiplicity,
    pieri_oracle,
    spectrum_standard,
    spectrum_twisted,
)
from .rootfold import (
    Family,
    build_folded_roots,
    density_sqrt,
    density_sqrt_p_plus,
    family_for_su,
    laplace_identity_residual,
    rho_theta_norm,
    sample_alcove,
    trace_form,
)
from .weylgrp import build_group, check_density_invariance, expected_order

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    time_limit: float

    @property
    def within_time(self) -> bool:
        return self.seconds <= self.time_limit

    @property
    def ok(self) -> bool:
        return self.passed and self.within_time

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        timing = f"{self.seconds:.2f}s/{self.time_limit:g}s"
        return f"[{status}] {self.number}. {self.title} ({timing}): {self.detail}"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.ok,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
            "time_limit": self.time_limit,
        }


def _rho_constants() -> tuple[bool, str]:
    bad = []
    for n in range(1, 6):
        for family, N, expected in (
            (Family.A_ODD, 2 * n, Fraction(n * (2 * n - 1) * (2 * n + 1), 6)),
            (Family.A_EVEN, 2 * n + 1, Fraction(2 * n * (n + 1) * (2 * n + 1), 6)),
        ):
            got = rho_theta_norm(build_folded_roots(family, n))
            if got != expected:
                bad.append(f"su({N}): {got} != {expected}")
    return not bad, "; ".join(bad) or "10 exact values, su(2)..su(11)"


def _laplace_identity(seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    cases = [(N, True) for N in range(3, 8)] + [(N, False) for N in range(2, 5)]
    worst_lap, worst_prop = 0.0, 0.0
    for N, twisted in cases:
        family, n = family_for_su(N, twisted)
        data = build_folded_roots(family, n)
        form = trace_form(family, n)
        points = sample_alcove(family, n, 100, rng, margin=0.01)
        for q in points:
            worst_lap = max(worst_lap, laplace_identity_residual(data, form, q, h=1e-4))
        if twisted:
            a, b = density_sqrt(data, points), density_sqrt_p_plus(data, points)
            c = a[0] / b[0]
            worst_prop = max(worst_prop, float(np.max(np.abs(a - c * b) / np.abs(a))))
    ok = worst_lap <= 1e-6 and worst_prop <= 1e-10
    return ok, f"max Laplacian residual {worst_lap:.2e}, max P+ deviation {worst_prop:.2e}"


def _dimensions() -> tuple[bool, str]:
    bad = [
        (N, k)
        for N in range(3, 10)
        for k in range(0, 11)
        if dim_invariant(N, k) != len(invariant_basis_bruteforce(N, k))
    ]
    return not bad, f"mismatches {bad}" if bad else "N=3..9, k=0..10 all equal"


def _box_weights(N: int, box: int):
    for coeffs in itertools.product(range(box + 1), repeat=N - 1):
        yield DominantWeight(N, coeffs)


def _theorem_bruteforce(box: int = 6, literal_up_to: int = 4) -> tuple[bool, str]:
    """Scan the box. Membership is solved directly; for ``N <= literal_up_to``
    and for every hit it is also read off the full ``pieri_decompose`` list."""
    problems = []
    checked = 0
    for N in range(3, 7):
        for k in range(0, 7):
            hits, chis = set(), set()
            for lam in _box_weights(N, box):
                target = conjugate(lam)
                mult = pieri_multiplicity(lam, target, k)
                if N <= literal_up_to or mult:
                    literal = pieri_decompose(lam, k).count(target)
                    if literal != mult:
                        problems.append(f"N={N} k={k} {lam.coeffs}: solver {mult}, list {literal}")
                if not mult:
                    continue
                if mult != 1:
                    problems.append(f"N={N} k={k} {lam.coeffs}: multiplicity {mult}")
                hits.add(lam)
                # the capacity vector is determined by lam; its tail is chi
                caps = [c for c in pieri_capacities(lam, k) if c.image(lam) == target]
                chis.add(caps[0].values[1:])
            predicted = set(admissible_twisted(k, N, box=box))
            if hits != predicted:
                problems.append(f"N={N} k={k}: {len(hits ^ predicted)} weights differ")
            if len(chis) != dim_invariant(N, k):
                problems.append(f"N={N} k={k}: {len(chis)} chi values, dim {dim_invariant(N, k)}")
            checked += 1
    return not problems, "; ".join(problems[:5]) or f"{checked} (N,k) cases, box {box}"


def _pieri_oracle() -> tuple[bool, str]:
    bad = []
    count = 0
    for N in range(2, 6):
        for lam in _box_weights(N, 3):
            for k in range(0, 5):
                count += 1
                if Counter(pieri_decompose(lam, k)) != Counter(pieri_oracle(lam, k)):
                    bad.append((N, lam.coeffs, k))
    return not bad, f"mismatches {bad[:5]}" if bad else f"{count} products agree"


def _route_equivalence() -> tuple[bool, str]:
    problems = []
    count = 0
    for N in range(3, 7):
        for k in range(0, 5):
            if N % 2 == 0 and k % 2 == 1:
                continue
            diff = compare_specs(assemble_generic(N, k), assemble_closed_form(N, k))
            count += 1
            if diff:
                problems.append(f"N={N} k={k}: {diff[0]}")
    return not problems, "; ".join(problems) or f"{count} specs identical (odd k at even N has no reduced system)"


def _untwisted_spectrum(grid: int = 16384) -> tuple[bool, str]:
    parts, ok = [], True
    for g in (2, 3):
        spec = standard_sutherland_spec(2, g)
        prediction = spectrum_standard(g - 1, 2, 200)
        plain = compare(spec, prediction, grid, 5, 1e-4)
        extra = compare(spec, prediction, grid, 5, 1e-6, extrapolate=True)
        ok = ok and plain.passed and extra.passed
        parts.append(f"g={g}: {plain.max_error:.1e} / richardson {extra.max_error:.1e}")
    return ok, "; ".join(parts)


def _twisted_spectrum(grid: int = 16384) -> tuple[bool, str]:
    dual = verify_variants(3, 1, grid, 5, 1e-4)
    offset_ok = (
        not dual.printed.passed
        and abs(abs(dual.printed_offset) - 1 / 6) < 1e-3
        and dual.printed_offset_spread < 1e-3
    )
    k2 = compare(assemble_closed_form(3, 2), spectrum_twisted(2, 3, 60), grid, 6, 1e-3)
    ok = dual.derived.passed and offset_ok and k2.passed
    detail = (
        f"k=1 {dual.derived.max_error:.1e}; printed offset {dual.printed_offset:+.5f} "
        f"(spread {dual.printed_offset_spread:.1e}); k=2 {k2.max_error:.1e}"
    )
    return ok, detail


def _weyl_groups() -> tuple[bool, str]:
    problems = []
    for N in range(3, 10):
        order = build_group(N).order
        if order != expected_order(N):
            problems.append(f"N={N}: order {order} != {expected_order(N)}")
    cases = [(3, 1), (3, 2), (4, 2), (5, 2), (6, 2), (7, 2)]
    for N, k in cases:
        res = check_density_invariance(N, k, trials=100, seed=N * 10 + k)
        if not res:
            problems.append(f"N={N} k={k}: {res.witness}")
    return not problems, "; ".join(problems) or f"orders n=1..4 match, invariance in {len(cases)} cases"


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]], float]] = [
    (1, "rho norms exact", _rho_constants, 1.0),
    (2, "density Laplacian identity", _laplace_identity, 10.0),
    (3, "invariant-space dimensions", _dimensions, 5.0),
    (4, "admissible weights vs brute force", _theorem_bruteforce, 60.0),
    (5, "Pieri rule vs horizontal strips", _pieri_oracle, 30.0),
    (6, "generic vs closed-form assembly", _route_equivalence, 60.0),
    (7, "standard Sutherland FD spectrum", _untwisted_spectrum, 30.0),
    (8, "twisted FD spectrum", _twisted_spectrum, 120.0),
    (9, "twisted Weyl groups", _weyl_groups, 30.0),
]


def run_criterion(number: int) -> CriterionResult:
    for num, title, fn, limit in CRITERIA:
        if num == number:
            start = time.perf_counter()
            try:
                passed, detail = fn()
            except Exception as exc:  # a crash is a failed criterion, reported as such
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            return CriterionResult(num, title, passed, detail, time.perf_counter() - start, limit)
    raise ValueError(f"no acceptance criterion {number}")


def run_all() -> list[CriterionResult]:
    return [run_criterion(num) for num, *_ in CRITERIA]
