"""Assembly of the reduced operator ``Delta_red`` as an exact :class:`HamiltonianSpec`.

A spec stands for

    Delta_red = sum_ij K_ij d_i d_j + constant_term
                + sum_terms coefficient / trig^2(scale * argument(q))

with exact spin-space matrices in the monomial basis of the invariant
subspace (see :mod:`twisted_sutherland.fockspin`). Two independent routes
build the twisted specs: :func:`assemble_generic` from explicit root and
weight vectors in ``sl(N)``, and :func:`assemble_closed_form` from the
``A, B, C, D`` operators.

The closed form uses ``1/(2n+1)`` as the coefficient of
``[sum_i (n_i - m)]^2`` for odd ``N``; this is what the dual Cartan basis
``L^j = L_j/2 - sum_i L_i/(2n+1)`` produces. ``variant="printed"`` switches
to ``1/(2n)`` for comparison runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal

import numpy as np

from .fockspin import (
    InvariantFockBasis,
    exact_matrix,
    generator_matrix,
    invariant_basis,
    matrix_to_json,
    number_operator,
    restrict_to_invariant,
    spin_operator,
    symmetrize,
)
from .rootfold import (
    Alcove,
    Family,
    LinearForm,
    alcove,
    build_folded_roots,
    family_for_su,
    rho_theta_norm,
    trace_form,
)

__all__ = [
    "PotentialTerm",
    "HamiltonianSpec",
    "SingularPointError",
    "root_vectors",
    "cartan_term",
    "assemble_generic",
    "assemble_closed_form",
    "assemble_untwisted_scalar",
    "standard_sutherland_spec",
    "free_particle_spec",
    "poschl_teller_spec",
    "compare_specs",
    "evaluate_potential",
    "potential_on_grid",
]

Kind = Literal["inv_sin_sq", "inv_cos_sq"]
Variant = Literal["derived", "printed"]

SINGULAR_GUARD = 1e-8


class SingularPointError(ValueError):
    pass


def _zeros(d: int) -> np.ndarray:
    return exact_matrix([[0] * d for _ in range(d)]) if d else np.empty((0, 0), dtype=object)


def _identity(d: int) -> np.ndarray:
    return exact_matrix([[1 if i == j else 0 for j in range(d)] for i in range(d)])


@dataclass(frozen=True)
class PotentialTerm:
    coefficient: np.ndarray  # exact, monomial basis
    kind: Kind
    argument: LinearForm
    scale: Fraction = Fraction(1, 2)

    def __post_init__(self) -> None:
        if self.kind not in ("inv_sin_sq", "inv_cos_sq"):
            raise ValueError(f"unknown kind {self.kind}")
        if self.argument.is_zero():
            raise ValueError("potential argument must be nonzero")
        object.__setattr__(self, "scale", Fraction(self.scale))

    def canonical_key(self) -> tuple[str, tuple[Fraction, ...]]:
        """``(kind, 2 * scale * argument)``: the argument at scale one half."""
        return self.kind, self.argument.scale(2 * self.scale).coefficients

    def denominator(self, q) -> np.ndarray:
        x = float(self.scale) * self.argument(q)
        return np.sin(x) ** 2 if self.kind == "inv_sin_sq" else np.cos(x) ** 2

    def to_json(self) -> dict:
        return {
            "coefficient": matrix_to_json(self.coefficient),
            "kind": self.kind,
            "argument": self.argument.to_json(),
            "scale": str(self.scale),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PotentialTerm":
        return cls(
            exact_matrix(doc["coefficient"]) if doc["coefficient"] else _zeros(0),
            doc["kind"],
            LinearForm(tuple(Fraction(c) for c in doc["argument"])),
            Fraction(doc["scale"]),
        )


@dataclass(frozen=True)
class HamiltonianSpec:
    family: Family | None
    N: int | None
    k: int | None
    kinetic: tuple[tuple[Fraction, ...], ...]
    constant_term: np.ndarray
    potential_terms: tuple[PotentialTerm, ...]
    domain: Alcove
    norms_sq: tuple[int, ...]
    route: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        d = len(self.norms_sq)
        if self.constant_term.shape != (d, d):
            raise ValueError("constant term has the wrong dimension")
        for t in self.potential_terms:
            if t.coefficient.shape != (d, d):
                raise ValueError("potential coefficient has the wrong dimension")

    @property
    def n(self) -> int:
        return len(self.kinetic)

    @property
    def dim(self) -> int:
        return len(self.norms_sq)

    @property
    def kinetic_coefficient(self) -> Fraction:
        """``c`` when the kinetic part is ``c * sum_i d_i^2``."""
        c = self.kinetic[0][0]
        for i, row in enumerate(self.kinetic):
            for j, x in enumerate(row):
                if x != (c if i == j else 0):
                    raise ValueError("kinetic part is not a multiple of the flat Laplacian")
        return c

    def to_json(self) -> dict:
        return {
            "family": None if self.family is None else self.family.value,
            "N": self.N,
            "k": self.k,
            "route": self.route,
            "kinetic": [[str(x) for x in row] for row in self.kinetic],
            "constant_term": matrix_to_json(self.constant_term),
            "potential_terms": [t.to_json() for t in self.potential_terms],
            "domain": self.domain.to_json(),
            "norms_sq": list(self.norms_sq),
        }


# --- explicit generators ----------------------------------------------------

def _E(N: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((N, N), dtype=np.int64)
    m[i - 1, j - 1] = 1
    return m


@dataclass(frozen=True)
class RootVector:
    """``X = sqrt(norm) * matrix`` with integer ``matrix``."""

    form: LinearForm
    sector: Literal["+", "-"]
    matrix: np.ndarray
    norm: Fraction


def root_vectors(N: int) -> list[RootVector]:
    """Normalized root (``+``) and weight (``-``) vectors of positive forms."""
    family, n = family_for_su(N)
    e = lambda *t: LinearForm.basis(n, *t)  # noqa: E731
    half = Fraction(1, 2)
    out: list[RootVector] = []
    if N == 2 * n:
        for k in range(1, n + 1):
            out.append(RootVector(e((2, k)), "+", _E(N, k, N + 1 - k), Fraction(1)))
        for k in range(1, n + 1):
            for l in range(k + 1, n + 1):
                s = (-1) ** (k + l)
                for sector, pm in (("+", 1), ("-", -1)):
                    minus = _E(N, k, l) - pm * s * _E(N, N + 1 - l, N + 1 - k)
                    plus = _E(N, k, N + 1 - l) + pm * s * _E(N, l, N + 1 - k)
                    out.append(RootVector(e((1, k), (-1, l)), sector, minus, half))
                    out.append(RootVector(e((1, k), (1, l)), sector, plus, half))
    else:
        mid = n + 1
        for k in range(1, n + 1):
            out.append(RootVector(e((2, k)), "-", _E(N, k, N + 1 - k), Fraction(1)))
        for k in range(1, n + 1):
            s = (-1) ** (k + n)
            for sector, pm in (("+", 1), ("-", -1)):
                short = _E(N, k, mid) + pm * s * _E(N, mid, N + 1 - k)
                out.append(RootVector(e((1, k)), sector, short, half))
        for k in range(1, n + 1):
            for l in range(k + 1, n + 1):
                s = (-1) ** (k + l)
                for sector, pm in (("+", 1), ("-", -1)):
                    minus = _E(N, k, l) - pm * s * _E(N, N + 1 - l, N + 1 - k)
                    plus = _E(N, k, N + 1 - l) - pm * s * _E(N, l, N + 1 - k)
                    out.append(RootVector(e((1, k), (-1, l)), sector, minus, half))
                    out.append(RootVector(e((1, k), (1, l)), sector, plus, half))
    return out


def cartan_basis(N: int) -> list[tuple[np.ndarray, np.ndarray, Fraction]]:
    """``(P, Q, c)`` triples with ``sum_j rho'(i K_j)^2 = -sum c rho'(P) rho'(Q)``.

    Even ``N``: the orthonormal ``K_j = sqrt(c_j) * P_j`` of the anti-fixed
    Cartan part, ``c_j = 1 / (2j(j+1))``, with ``P = Q``. Odd ``N``: the dual
    pair ``L^j, L_j`` (``P = L^j`` rational, ``c = 1``).
    """
    n = N // 2
    out = []
    if N % 2 == 0:
        for j in range(1, n):
            P = np.zeros((N, N), dtype=object)
            P[...] = Fraction(0)
            for i in range(1, j + 1):
                P[i - 1, i - 1] += 1
                P[N - i, N - i] += 1
            P[j, j] -= j
            P[N - j - 1, N - j - 1] -= j
            out.append((P, P, Fraction(1, 2 * j * (j + 1))))
    else:
        L = []
        for j in range(1, n + 1):
            m = np.zeros((N, N), dtype=object)
            m[...] = Fraction(0)
            m[j - 1, j - 1] += 1
            m[N - j, N - j] += 1
            m[n, n] -= 2
            L.append(m)
        total = sum(L[1:], L[0].copy())
        for j in range(n):
            upper = L[j] * Fraction(1, 2) - total * Fraction(1, 2 * n + 1)
            out.append((upper, L[j], Fraction(1)))
    return out


def _as_int(X: np.ndarray) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in X], dtype=np.int64)


def _fraction_matrix(M: np.ndarray, factor: Fraction) -> np.ndarray:
    out = np.empty(M.shape, dtype=object)
    for idx, x in np.ndenumerate(M):
        out[idx] = Fraction(int(x)) * factor
    return out


def cartan_term(N: int, k: int) -> np.ndarray:
    """Restriction of ``(1/4) sum_j rho'(i K_j)^2`` to the invariant subspace."""
    basis = invariant_basis(N, k)
    acc = _zeros(basis.dim)
    for P, Q, c in cartan_basis(N):
        denom = math.lcm(*(Fraction(x).denominator for x in P.flat))
        rp = generator_matrix(N, k, _as_int(P * denom))
        rq = generator_matrix(N, k, Q)
        prod = restrict_to_invariant(N, k, rp @ rq)
        acc = acc + _fraction_matrix(prod, -Fraction(1, 4) * c / denom)
    return acc


def _domain_for(N: int) -> Alcove:
    family, n = family_for_su(N)
    return alcove(family, n)


def _base_spec_fields(N: int, k: int):
    family, n = family_for_su(N)
    basis = invariant_basis(N, k)
    if basis.dim == 0:
        raise ValueError(f"no reduced system at this (N,k) = ({N},{k}): invariant subspace is empty")
    form = trace_form(family, n)
    return family, n, basis, form


def assemble_generic(N: int, k: int) -> HamiltonianSpec:
    """``Delta_red`` from explicit generators: one term per positive root and weight."""
    if N < 3:
        raise ValueError("twisted models need N >= 3")
    family, n, basis, form = _base_spec_fields(N, k)
    data = build_folded_roots(family, n)
    rho_sq = rho_theta_norm(data, form)
    terms = []
    vectors = root_vectors(N)
    by_sector = {
        "+": {rv.form: rv for rv in vectors if rv.sector == "+"},
        "-": {rv.form: rv for rv in vectors if rv.sector == "-"},
    }
    for sector, forms, kind in (
        ("+", data.positive_roots, "inv_sin_sq"),
        ("-", data.positive_weights, "inv_cos_sq"),
    ):
        for phi in forms:
            rv = by_sector[sector][phi]
            up = generator_matrix(N, k, rv.matrix)
            down = generator_matrix(N, k, rv.matrix.T)
            sym = restrict_to_invariant(N, k, up @ down + down @ up)
            coeff = _fraction_matrix(sym, -Fraction(1, 4) * rv.norm)
            terms.append(PotentialTerm(coeff, kind, phi, Fraction(1, 2)))
    constant = _identity(basis.dim) * rho_sq + cartan_term(N, k)
    return HamiltonianSpec(
        family, N, k, form.gram, constant, tuple(terms), _domain_for(N), basis.norms_sq(), route="generic"
    )


def assemble_closed_form(N: int, k: int, variant: Variant = "derived") -> HamiltonianSpec:
    """``Delta_red`` from the ``A, B, C, D`` spin operators and explicit scalars."""
    if N < 3:
        raise ValueError("twisted models need N >= 3")
    if variant not in ("derived", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    family, n, basis, form = _base_spec_fields(N, k)
    data = build_folded_roots(family, n)
    rho_sq = rho_theta_norm(data, form)
    q = Fraction(-1, 4)
    e = lambda *t: LinearForm.basis(n, *t)  # noqa: E731
    A = {(i, j): spin_operator(N, k, "A", i, j).matrix for i in range(1, n + 1) for j in range(i, n + 1)}
    B = {(i, j): spin_operator(N, k, "B", i, j).matrix for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    terms: list[PotentialTerm] = []
    sin, cos = "inv_sin_sq", "inv_cos_sq"
    half = Fraction(1, 2)
    odd = N % 2 == 1
    if odd:
        for i in range(1, n + 1):
            C = spin_operator(N, k, "C", i).matrix
            D = spin_operator(N, k, "D", i).matrix
            terms.append(PotentialTerm(q * (C + D), sin, e((1, i)), half))
            terms.append(PotentialTerm(q * (C - D), cos, e((1, i)), half))
            terms.append(PotentialTerm(q * A[i, i], cos, e((1, i)), Fraction(1)))
    else:
        for i in range(1, n + 1):
            terms.append(PotentialTerm(q * A[i, i], sin, e((1, i)), Fraction(1)))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            a, b = A[i, j], B[i, j]
            diff, summ = e((1, i), (-1, j)), e((1, i), (1, j))
            terms.append(PotentialTerm(q * (a - b), sin, diff, half))
            terms.append(PotentialTerm(q * (a + b), cos, diff, half))
            if odd:
                terms.append(PotentialTerm(q * (a - b), sin, summ, half))
                terms.append(PotentialTerm(q * (a + b), cos, summ, half))
            else:
                terms.append(PotentialTerm(q * (a + b), sin, summ, half))
                terms.append(PotentialTerm(q * (a - b), cos, summ, half))

    if odd:
        mid = n
        diffs = lambda o: [o[i] - o[mid] for i in range(n)]  # noqa: E731
        sq_coeff = Fraction(1, 2 * n + 1) if variant == "derived" else Fraction(1, 2 * n)
        scalar = number_operator(
            N,
            k,
            lambda o: -Fraction(1, 2) * sum(x * x for x in diffs(o)) + sq_coeff * sum(diffs(o)) ** 2,
        )
    else:
        scalar = number_operator(
            N,
            k,
            lambda o: Fraction(k // 2) ** 2 / (2 * n) - Fraction(1, 2) * sum(o[i] ** 2 for i in range(n)),
        )
    constant = _identity(basis.dim) * rho_sq + scalar
    return HamiltonianSpec(
        family,
        N,
        k,
        form.gram,
        constant,
        tuple(terms),
        _domain_for(N),
        basis.norms_sq(),
        route=f"closed-form/{variant}",
    )


def assemble_untwisted_scalar(N: int, gamma: int) -> HamiltonianSpec:
    """Scalar Sutherland operator from the untwisted reduction with ``V_{gamma N lambda_1}``.

    Coordinates are ``q_1..q_{N-1}`` of ``diag(q_1, .., q_N)``, ``q_N = -sum``.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    family, n = family_for_su(N, twisted=False)
    data = build_folded_roots(family, n)
    form = trace_form(family, n)
    coupling = -Fraction(gamma * (gamma + 1), 2)
    terms = tuple(
        PotentialTerm(exact_matrix([[coupling]]), "inv_sin_sq", alpha, Fraction(1, 2))
        for alpha in data.positive_roots
    )
    constant = exact_matrix([[rho_theta_norm(data, form)]])
    return HamiltonianSpec(
        family, N, gamma * N, form.gram, constant, terms, alcove(family, n), (1,),
        route="untwisted", meta={"gamma": gamma},
    )


def standard_sutherland_spec(N: int, g: int) -> HamiltonianSpec:
    """``H = 2 (-Delta) + 2 <rho, rho>`` for the untwisted reduction at ``gamma = g - 1``.

    Returned with the overall sign of ``Delta`` (kinetic and potential doubled,
    constant removed), so its FD eigenvalues are those of the standard
    Sutherland Hamiltonian ``-sum d^2 + sum g(g-1)/sin^2((q_i - q_j)/2)``
    in the diagonal angles ``q_i``.
    """
    if g < 1:
        raise ValueError("g must be >= 1")
    base = assemble_untwisted_scalar(N, g - 1)
    two = Fraction(2)
    return HamiltonianSpec(
        base.family,
        N,
        base.k,
        tuple(tuple(two * x for x in row) for row in base.kinetic),
        exact_matrix([[0]]),
        tuple(PotentialTerm(two * t.coefficient, t.kind, t.argument, t.scale) for t in base.potential_terms),
        base.domain,
        (1,),
        route="standard",
        meta={"g": g},
    )


def _interval(length: Fraction) -> Alcove:
    e1 = LinearForm((Fraction(1),))
    return Alcove(None, 1, ((-e1, Fraction(0)), (e1, Fraction(length))))


def free_particle_spec(length_over_pi=1, c=Fraction(1, 2)) -> HamiltonianSpec:
    """``c d^2/dq^2`` on ``(0, length_over_pi * pi)``; no potential."""
    return HamiltonianSpec(
        None, None, None, ((Fraction(c),),), exact_matrix([[0]]), (), _interval(Fraction(length_over_pi)), (1,),
        route="calibration/box",
    )


def poschl_teller_spec(g: int) -> HamiltonianSpec:
    """``d^2 - g(g-1)/sin^2 q`` on ``(0, pi)``, i.e. minus the Poschl-Teller operator."""
    term = PotentialTerm(exact_matrix([[-g * (g - 1)]]), "inv_sin_sq", LinearForm((Fraction(2),)), Fraction(1, 2))
    return HamiltonianSpec(
        None, None, None, ((Fraction(1),),), exact_matrix([[0]]), (term,), _interval(Fraction(1)), (1,),
        route="calibration/poschl-teller", meta={"g": g},
    )


def _grouped(terms: Iterable[PotentialTerm], dim: int) -> dict:
    out: dict = {}
    for t in terms:
        key = t.canonical_key()
        out[key] = out.get(key, _zeros(dim)) + t.coefficient
    return out


def compare_specs(a: HamiltonianSpec, b: HamiltonianSpec) -> list[str]:
    """Exact term-by-term comparison; returns human-readable mismatches."""
    problems = []
    if a.kinetic != b.kinetic:
        problems.append(f"kinetic: {a.kinetic} != {b.kinetic}")
    if a.norms_sq != b.norms_sq:
        problems.append("different spin bases")
        return problems
    if not np.array_equal(a.constant_term, b.constant_term):
        problems.append(
            f"constant_term: {matrix_to_json(a.constant_term)} != {matrix_to_json(b.constant_term)}"
        )
    ga, gb = _grouped(a.potential_terms, a.dim), _grouped(b.potential_terms, b.dim)
    zero = _zeros(a.dim)
    for key in sorted(set(ga) | set(gb), key=str):
        ma, mb = ga.get(key, zero), gb.get(key, zero)
        if not np.array_equal(ma, mb):
            kind, coeffs = key
            arg = LinearForm(coeffs)
            problems.append(
                f"{kind}(({arg})/2): {matrix_to_json(ma)} != {matrix_to_json(mb)}"
            )
    return problems


def _singular_distance(term: PotentialTerm, q) -> np.ndarray:
    x = float(term.scale) * term.argument(q)
    if term.kind == "inv_cos_sq":
        x = x - math.pi / 2
    return np.abs(x - math.pi * np.round(x / math.pi))


def potential_on_grid(spec: HamiltonianSpec, points) -> np.ndarray:
    """Symmetric float potential matrices at each point, shape ``(len(points), d, d)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    d = spec.dim
    out = np.broadcast_to(symmetrize(spec.constant_term, spec.norms_sq), (len(pts), d, d)).copy()
    for term in spec.potential_terms:
        if np.min(_singular_distance(term, pts), initial=np.inf) < SINGULAR_GUARD:
            raise SingularPointError(
                f"{term.kind} with argument {term.argument} is singular within {SINGULAR_GUARD}"
            )
        coeff = symmetrize(term.coefficient, spec.norms_sq)
        if not coeff.any():
            continue
        out += coeff[None, :, :] / term.denominator(pts)[:, None, None]
    return out


def evaluate_potential(spec: HamiltonianSpec, q) -> np.ndarray:
    """``constant_term + sum coefficient / trig^2`` at one point (orthonormal spin basis)."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.shape != (spec.n,):
        raise ValueError(f"expected a point with {spec.n} coordinates")
    return potential_on_grid(spec, q[None, :])[0]
