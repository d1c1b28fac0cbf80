"""Folded root data for involutive diagram automorphisms.

Positive roots of the fixed subalgebra, positive weights of the anti-fixed
module and the auxiliary root set ``P_plus`` are stored as exact linear
forms in the coordinate functionals ``e_m : q -> q_m`` of the diagonal
realizations

    D_{n+1}:  q = diag(q_1..q_n, 0, 0, -q_n..-q_1)
    A_{2n-1}: q = diag(q_1..q_n, -q_n..-q_1)
    A_{2n}:   q = diag(q_1..q_n, 0, -q_n..-q_1)

The untwisted ``su(N)`` case uses the free coordinates ``q_1..q_{N-1}`` with
``q_N = -(q_1 + ... + q_{N-1})``.

All three diagonal twisted realizations have ``tr(q^2) = 2 sum q_i^2``, so the
dual pairing of the functionals is ``<e_i, e_j> = delta_ij / 2`` and the
orthonormal coordinate belonging to ``q_i`` is ``sqrt(2) * q_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Family",
    "LinearForm",
    "FoldedRootData",
    "TraceForm",
    "Alcove",
    "build_folded_roots",
    "trace_form",
    "rho_theta",
    "rho_theta_from_p_plus",
    "rho_theta_norm",
    "density_sqrt",
    "density_sqrt_p_plus",
    "laplace_identity_residual",
    "alcove",
    "alcove_contains",
    "sample_alcove",
    "family_for_su",
]


class Family(str, Enum):
    A_EVEN = "a-even"  # su(2n+1), A_{2n} folded to B_n
    A_ODD = "a-odd"  # su(2n), A_{2n-1} folded to C_n
    D = "d"  # so(2n+2), D_{n+1} folded to B_n
    A_UNTWISTED = "a-untwisted"  # su(n+1), theta = id

    @property
    def is_a_series(self) -> bool:
        return self is not Family.D


def family_for_su(N: int, twisted: bool = True) -> tuple[Family, int]:
    """Return the ``(family, n)`` pair describing ``su(N)``."""
    if N < 2:
        raise ValueError(f"su(N) needs N >= 2, got {N}")
    if not twisted:
        return Family.A_UNTWISTED, N - 1
    return (Family.A_ODD, N // 2) if N % 2 == 0 else (Family.A_EVEN, (N - 1) // 2)


def _as_real(q) -> np.ndarray:
    q = np.asarray(q)
    return q if q.dtype == np.longdouble else q.astype(float)


@dataclass(frozen=True)
class LinearForm:
    """Exact linear functional ``sum_m c_m e_m``."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coefficients", tuple(Fraction(c) for c in self.coefficients)
        )

    @classmethod
    def basis(cls, n: int, *terms: tuple[int, int]) -> "LinearForm":
        """Build ``sum c * e_m`` from ``(c, m)`` pairs, ``m`` one-based."""
        coeffs = [Fraction(0)] * n
        for c, m in terms:
            coeffs[m - 1] += c
        return cls(tuple(coeffs))

    @classmethod
    def zero(cls, n: int) -> "LinearForm":
        return cls((Fraction(0),) * n)

    @property
    def n(self) -> int:
        return len(self.coefficients)

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "LinearForm":
        return LinearForm(tuple(-a for a in self.coefficients))

    def scale(self, s) -> "LinearForm":
        s = Fraction(s)
        return LinearForm(tuple(s * a for a in self.coefficients))

    def __call__(self, q) -> float | np.ndarray:
        """Evaluate on a point (last axis of ``q`` holds the coordinates)."""
        q = _as_real(q)
        return q @ np.array([float(c) for c in self.coefficients], dtype=q.dtype)

    def pair(self, other: "LinearForm", gram: Sequence[Sequence[Fraction]]) -> Fraction:
        total = Fraction(0)
        for i, a in enumerate(self.coefficients):
            if a:
                for j, b in enumerate(other.coefficients):
                    if b:
                        total += a * gram[i][j] * b
        return total

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coefficients]

    def __str__(self) -> str:
        parts = []
        for m, c in enumerate(self.coefficients, start=1):
            if c:
                coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
                parts.append(f"{coef}e{m}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def _sum_forms(forms: Iterable[LinearForm], n: int) -> LinearForm:
    total = LinearForm.zero(n)
    for f in forms:
        total = total + f
    return total


@dataclass(frozen=True)
class FoldedRootData:
    family: Family
    n: int
    positive_roots: tuple[LinearForm, ...]
    positive_weights: tuple[LinearForm, ...]
    p_plus: tuple[LinearForm, ...]

    def __post_init__(self) -> None:
        for f in (*self.positive_roots, *self.positive_weights, *self.p_plus):
            if f.is_zero():
                raise ValueError("zero form inside a root/weight set")
            if f.n != self.n:
                raise ValueError("form of the wrong length")

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "n": self.n,
            "positive_roots": [f.to_json() for f in self.positive_roots],
            "positive_weights": [f.to_json() for f in self.positive_weights],
            "p_plus": [f.to_json() for f in self.p_plus],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FoldedRootData":
        def forms(key):
            return tuple(LinearForm(tuple(Fraction(c) for c in f)) for f in doc[key])

        return cls(
            Family(doc["family"]),
            int(doc["n"]),
            forms("positive_roots"),
            forms("positive_weights"),
            forms("p_plus"),
        )


def _pairs(n: int) -> list[tuple[LinearForm, LinearForm]]:
    """``(e_k - e_l, e_k + e_l)`` for ``k < l``."""
    out = []
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            out.append((LinearForm.basis(n, (1, k), (-1, l)), LinearForm.basis(n, (1, k), (1, l))))
    return out


def _short(n: int, c: int = 1) -> list[LinearForm]:
    return [LinearForm.basis(n, (c, m)) for m in range(1, n + 1)]


def _phi_b(n: int) -> list[LinearForm]:
    return [f for pair in _pairs(n) for f in pair] + _short(n)


def _phi_c(n: int) -> list[LinearForm]:
    return [f for pair in _pairs(n) for f in pair] + _short(n, 2)


def build_folded_roots(family: Family | str, n: int) -> FoldedRootData:
    family = Family(family)
    if n < 1:
        raise ValueError(f"rank n must be >= 1 for family {family.value}, got {n}")
    pm = [f for pair in _pairs(n) for f in pair]
    if family is Family.A_EVEN:
        roots = pm + _short(n)
        weights = pm + _short(n) + _short(n, 2)
        p_plus = [f.scale(2) for f in _phi_c(n)]
    elif family is Family.A_ODD:
        roots = pm + _short(n, 2)
        weights = list(pm)
        p_plus = [f.scale(2) for f in _phi_b(n)]
    elif family is Family.D:
        roots = pm + _short(n)
        weights = _short(n)
        p_plus = _phi_c(n)
    else:
        # su(n+1): e_i - e_j with e_{n+1} = -(e_1 + ... + e_n)
        N = n + 1

        def e(i: int) -> LinearForm:
            if i <= n:
                return LinearForm.basis(n, (1, i))
            return LinearForm(tuple(Fraction(-1) for _ in range(n)))

        roots = [e(i) - e(j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]
        weights = []
        p_plus = list(roots)
    data = FoldedRootData(family, n, tuple(roots), tuple(weights), tuple(p_plus))
    if rho_theta(data) != rho_theta_from_p_plus(data):
        raise AssertionError("rho identity violated")  # pragma: no cover
    return data


@dataclass(frozen=True)
class TraceForm:
    """Pairings ``<e_i, e_j>`` dual to the trace form on the Cartan subalgebra."""

    n: int
    gram: tuple[tuple[Fraction, ...], ...]

    def pair(self, a: LinearForm, b: LinearForm) -> Fraction:
        return a.pair(b, self.gram)

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.gram])

    def orthonormal_frame(self) -> np.ndarray:
        """Matrix ``F`` with ``q = F @ y`` for orthonormal coordinates ``y``.

        ``F F^T`` equals the gram matrix; for the twisted realizations this is
        ``I / sqrt(2)``, i.e. ``y_i = sqrt(2) q_i``.
        """
        return np.linalg.cholesky(self.as_array())


def trace_form(family: Family | str, n: int) -> TraceForm:
    family = Family(family)
    if family is Family.A_UNTWISTED:
        N = n + 1
        gram = tuple(
            tuple((Fraction(1) if i == j else Fraction(0)) - Fraction(1, N) for j in range(n))
            for i in range(n)
        )
    else:
        gram = tuple(
            tuple(Fraction(1, 2) if i == j else Fraction(0) for j in range(n)) for i in range(n)
        )
    return TraceForm(n, gram)


def rho_theta(data: FoldedRootData) -> LinearForm:
    half = Fraction(1, 2)
    return (
        _sum_forms(data.positive_roots, data.n) + _sum_forms(data.positive_weights, data.n)
    ).scale(half)


def rho_theta_from_p_plus(data: FoldedRootData) -> LinearForm:
    return _sum_forms(data.p_plus, data.n).scale(Fraction(1, 2))


def rho_theta_norm(data: FoldedRootData, form: TraceForm | None = None) -> Fraction:
    if not data.family.is_a_series:
        raise ValueError("rho_theta_norm uses the su(N) trace form; family must be A-series")
    form = form or trace_form(data.family, data.n)
    rho = rho_theta(data)
    return form.pair(rho, rho)


def density_sqrt(data: FoldedRootData, q) -> float | np.ndarray:
    """Square root of the orbit density; vectorized over leading axes of ``q``.

    ``longdouble`` input is evaluated in extended precision.
    """
    q = _as_real(q)
    out = np.ones(q.shape[:-1], dtype=q.dtype)
    for a in data.positive_roots:
        out = out * np.sin(a(q) / 2)
    for lam in data.positive_weights:
        out = out * np.cos(lam(q) / 2)
    return out if out.ndim else float(out)


def density_sqrt_p_plus(data: FoldedRootData, q) -> float | np.ndarray:
    """The untwisted-looking product over ``P_plus`` (equal up to a constant)."""
    q = _as_real(q)
    out = np.ones(q.shape[:-1], dtype=q.dtype)
    for phi in data.p_plus:
        out = out * np.sin(phi(q) / 2)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Alcove:
    """Open domain ``{q : form(q) < bound * pi for every constraint}``."""

    family: Family | None
    n: int
    constraints: tuple[tuple[LinearForm, Fraction], ...]

    def slack(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return np.array([float(b) * math.pi - f(q) for f, b in self.constraints])

    def contains(self, q, margin: float = 0.0) -> bool:
        return bool(np.all(self.slack(q) > margin))

    def interval(self) -> tuple[float, float]:
        """Endpoints of a rank-one alcove."""
        if self.n != 1:
            raise ValueError("interval() needs a rank-one alcove")
        lo, hi = -math.inf, math.inf
        for f, b in self.constraints:
            c = float(f.coefficients[0])
            bound = float(b) * math.pi / c
            if c > 0:
                hi = min(hi, bound)
            else:
                lo = max(lo, bound)
        return lo, hi

    def bounding_box(self) -> tuple[float, float]:
        if self.family is None or self.n == 1:
            return self.interval()
        if self.family is Family.A_UNTWISTED:
            return -2 * math.pi, 2 * math.pi
        return 0.0, math.pi

    def to_json(self) -> dict:
        return {
            "family": None if self.family is None else self.family.value,
            "n": self.n,
            "constraints": [{"form": f.to_json(), "bound_over_pi": str(b)} for f, b in self.constraints],
        }


def alcove(family: Family | str, n: int) -> Alcove:
    family = Family(family)
    e = lambda *terms: LinearForm.basis(n, *terms)  # noqa: E731
    cons: list[tuple[LinearForm, Fraction]] = []
    if family is Family.A_UNTWISTED:
        data = build_folded_roots(family, n)
        N = n + 1
        # simple roots positive, highest root below 2 pi
        simple = [data.positive_roots[_root_index(N, i, i + 1)] for i in range(1, N)]
        cons = [(-a, Fraction(0)) for a in simple]
        cons.append((data.positive_roots[_root_index(N, 1, N)], Fraction(2)))
        return Alcove(family, n, tuple(cons))
    cons.append((e((-1, n)), Fraction(0)))
    for i in range(1, n):
        cons.append((e((1, i + 1), (-1, i)), Fraction(0)))
    if family is Family.A_EVEN:
        cons.append((e((1, 1)), Fraction(1, 2)))
    else:
        cons.append((e((1, 1)), Fraction(1)))
    if family is Family.A_ODD and n >= 2:
        cons.append((e((-1, 1), (-1, 2)), Fraction(0)))
        cons.append((e((1, 1), (1, 2)), Fraction(1)))
    return Alcove(family, n, tuple(cons))


def _root_index(N: int, i: int, j: int) -> int:
    """Position of ``e_i - e_j`` in the untwisted positive-root list."""
    idx = 0
    for a in range(1, N + 1):
        for b in range(a + 1, N + 1):
            if (a, b) == (i, j):
                return idx
            idx += 1
    raise IndexError((i, j))


def alcove_contains(family: Family | str, n: int, q) -> bool:
    return alcove(family, n).contains(q)


def sample_alcove(
    family: Family | str,
    n: int,
    size: int,
    rng: np.random.Generator,
    margin: float = 0.0,
) -> np.ndarray:
    """Uniform samples from the alcove by rejection, keeping ``margin`` from walls."""
    dom = alcove(family, n)
    lo, hi = dom.bounding_box()
    out: list[np.ndarray] = []
    while len(out) < size:
        batch = rng.uniform(lo, hi, size=(max(64, 4 * size), n))
        slack = np.stack([float(b) * math.pi - f(batch) for f, b in dom.constraints], axis=-1)
        keep = batch[np.all(slack > margin, axis=-1)]
        out.extend(keep[: size - len(out)])
    return np.array(out)


def laplace_identity_residual(
    data: FoldedRootData, form: TraceForm, q, h: float = 1e-4
) -> float:
    """Relative residual of ``Lap(d) + <rho, rho> d`` for ``d = density_sqrt``.

    ``Lap`` is the flat Laplacian of the trace form, ``sum_ij gram_ij d_i d_j``
    in the ``q`` coordinates; for the twisted realizations this is
    ``(1/2) sum d^2/dq_i^2``, the plain Laplacian in the orthonormal
    coordinates ``sqrt(2) q_i``. ``h`` is the step in orthonormal units. The
    step actually used in ``q`` is rounded down to a power of two and ``q`` to
    a dyadic grid, so that every stencil point is exactly representable;
    otherwise position rounding divided by ``h^2`` dominates the residual.
    Stencils at ``h`` and ``2h`` are combined to cancel the ``h^2`` error,
    which near several walls at once would swamp a small ``d``, and ``d`` is
    evaluated in ``longdouble`` so that its rounding stays below the target.
    """
    gram = form.as_array()
    hq = 2.0 ** math.floor(math.log2(h * math.sqrt(gram.diagonal().max())))
    q = np.round(np.asarray(q, dtype=float) * 2.0**40) / 2.0**40
    dom = alcove(data.family, data.n)
    if not dom.contains(q, margin=8 * hq):
        raise ValueError(f"q={q} is too close to an alcove wall for step {hq}")
    n = data.n
    q = q.astype(np.longdouble)
    center = density_sqrt(data, q)

    def laplacian(step: float) -> float:
        eye = np.eye(n, dtype=np.longdouble) * np.longdouble(step)
        d = lambda point: density_sqrt(data, point)  # noqa: E731
        lap = 0.0
        for i in range(n):
            lap += gram[i, i] * (d(q + eye[i]) - 2 * center + d(q - eye[i])) / step**2
            for j in range(i + 1, n):
                if gram[i, j]:
                    mixed = (
                        d(q + eye[i] + eye[j])
                        - d(q + eye[i] - eye[j])
                        - d(q - eye[i] + eye[j])
                        + d(q - eye[i] - eye[j])
                    ) / (4 * step**2)
                    lap += 2 * gram[i, j] * mixed
        return lap

    lap = (4 * laplacian(hq) - laplacian(2 * hq)) / 3
    rho = rho_theta(data)
    rho_sq = float(form.pair(rho, rho))
    return float(abs(lap + rho_sq * center) / abs(center))
