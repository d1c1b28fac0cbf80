"""Finite twisted Weyl groups of SU(N) acting on alcove coordinates.

An element ``(perm, eps, sigma)`` acts by

    (w q)_i = eps_i * q_{perm(i)} + pi * [sigma_i = -1]

modulo ``2 pi``. The sign-permutation part is the B-type Weyl group of rank
``n = N // 2``; ``sigma`` ranges over ``{+-1}^n`` for odd ``N`` and over
its ``prod sigma = 1`` subgroup for even ``N``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .hamassembly import SingularPointError, assemble_generic, evaluate_potential
from .rootfold import alcove, build_folded_roots, density_sqrt, family_for_su, sample_alcove

__all__ = [
    "TwistedWeylElement",
    "TwistedWeylGroup",
    "build_group",
    "expected_order",
    "act_on_q",
    "InvarianceResult",
    "check_density_invariance",
    "check_translation_normal",
    "check_tiling",
]


@dataclass(frozen=True, order=True)
class TwistedWeylElement:
    perm: tuple[int, ...]  # zero-based; (w q)_i uses q_{perm[i]}
    eps: tuple[int, ...]
    sigma: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ValueError(f"not a permutation: {self.perm}")
        if len(self.eps) != n or len(self.sigma) != n:
            raise ValueError("perm, eps and sigma must have equal length")
        if any(x not in (1, -1) for x in self.eps + self.sigma):
            raise ValueError("eps and sigma entries must be +-1")

    @classmethod
    def identity(cls, n: int) -> "TwistedWeylElement":
        return cls(tuple(range(n)), (1,) * n, (1,) * n)

    @property
    def n(self) -> int:
        return len(self.perm)

    def __mul__(self, other: "TwistedWeylElement") -> "TwistedWeylElement":
        """``(self * other) q = self(other(q))``."""
        p = self.perm
        return TwistedWeylElement(
            tuple(other.perm[p[i]] for i in range(self.n)),
            tuple(self.eps[i] * other.eps[p[i]] for i in range(self.n)),
            tuple(self.sigma[i] * other.sigma[p[i]] for i in range(self.n)),
        )

    def inverse(self) -> "TwistedWeylElement":
        n = self.n
        inv = [0] * n
        for i, j in enumerate(self.perm):
            inv[j] = i
        # w^-1 q: solve q' = eps * x[perm] + pi tau for x
        return TwistedWeylElement(
            tuple(inv),
            tuple(self.eps[inv[j]] for j in range(n)),
            tuple(self.sigma[inv[j]] for j in range(n)),
        )

    def allowed_in(self, N: int) -> bool:
        """Rank matches and, for even ``N``, ``prod sigma = 1``."""
        return self.n == N // 2 and (N % 2 == 1 or math.prod(self.sigma) == 1)

    def is_translation(self) -> bool:
        return self.perm == tuple(range(self.n)) and all(e == 1 for e in self.eps)

    def to_json(self) -> dict:
        return {"perm": [p + 1 for p in self.perm], "eps": list(self.eps), "sigma": list(self.sigma)}


def act_on_q(w: TwistedWeylElement, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != w.n:
        raise ValueError(f"expected {w.n} coordinates")
    shift = np.array([math.pi if s == -1 else 0.0 for s in w.sigma])
    return np.asarray(w.eps) * q[..., list(w.perm)] + shift


def expected_order(N: int) -> int:
    n = N // 2
    weyl_b = 2**n * math.factorial(n)
    return weyl_b * (2 ** (n - 1) if N % 2 == 0 else 2**n)


def _generators(N: int) -> list[TwistedWeylElement]:
    n = N // 2
    ident = list(range(n))
    ones = (1,) * n
    gens = []
    for i in range(n - 1):
        p = ident.copy()
        p[i], p[i + 1] = p[i + 1], p[i]
        gens.append(TwistedWeylElement(tuple(p), ones, ones))
    gens.append(TwistedWeylElement(tuple(ident), ones[:-1] + (-1,), ones))
    if N % 2 == 1:
        gens.append(TwistedWeylElement(tuple(ident), ones, (-1,) + ones[1:]))
    elif n >= 2:
        gens.append(TwistedWeylElement(tuple(ident), ones, (-1, -1) + ones[2:]))
    return gens


@dataclass(frozen=True)
class TwistedWeylGroup:
    N: int
    generators: tuple[TwistedWeylElement, ...]
    elements: tuple[TwistedWeylElement, ...]

    @property
    def n(self) -> int:
        return self.N // 2

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self) -> dict[TwistedWeylElement, int]:
        return {e: i for i, e in enumerate(self.elements)}

    def multiplication_table(self) -> np.ndarray:
        idx = self.index()
        m = len(self.elements)
        table = np.empty((m, m), dtype=np.int64)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                table[i, j] = idx[a * b]
        return table

    def translations(self) -> list[TwistedWeylElement]:
        return [e for e in self.elements if e.is_translation()]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "n": self.n,
            "order": self.order,
            "expected_order": expected_order(self.N),
            "generators": [g.to_json() for g in self.generators],
        }


def _check_group_axioms(group: TwistedWeylGroup) -> None:
    table = group.multiplication_table()
    m = group.order
    e = group.index()[TwistedWeylElement.identity(group.n)]
    if not (np.array_equal(table[e], np.arange(m)) and np.array_equal(table[:, e], np.arange(m))):
        raise AssertionError("identity element fails")
    for row in table:
        if sorted(row) != list(range(m)):
            raise AssertionError("multiplication table is not a Latin square")
    rng = np.random.default_rng(0)
    triples = rng.integers(0, m, size=(min(m**3, 5000), 3))
    for a, b, c in triples:
        if table[table[a, b], c] != table[a, table[b, c]]:
            raise AssertionError("associativity fails")


def build_group(N: int, verify: bool | None = None) -> TwistedWeylGroup:
    """Closure of the generators. ``verify`` (default for ``n <= 3``) checks the group table."""
    if N < 3:
        raise ValueError("N must be >= 3")
    gens = _generators(N)
    n = N // 2
    seen = {TwistedWeylElement.identity(n)}
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g * x
            if y not in seen:
                seen.add(y)
                queue.append(y)
    if not all(x.allowed_in(N) for x in seen):
        raise AssertionError("closure left the twisted Weyl group")
    group = TwistedWeylGroup(N, tuple(gens), tuple(sorted(seen)))
    if verify if verify is not None else n <= 3:
        _check_group_axioms(group)
    return group


def check_translation_normal(group: TwistedWeylGroup) -> bool:
    """Translations form a normal subgroup on which sign flips act trivially."""
    trans = set(group.translations())
    for g in group.elements:
        ginv = g.inverse()
        for t in trans:
            c = g * t * ginv
            if c not in trans:
                return False
            if g.perm == tuple(range(group.n)) and c != t:
                return False
    return True


@dataclass(frozen=True)
class InvarianceResult:
    passed: bool
    trials: int
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.passed


def check_density_invariance(
    N: int, k: int, trials: int = 100, seed: int = 0, *, margin: float = 0.02
) -> InvarianceResult:
    """``delta(w q)^2 = delta(q)^2`` and isospectral potentials at ``q`` and ``w q``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    family, n = family_for_su(N)
    data = build_folded_roots(family, n)
    spec = assemble_generic(N, k)
    group = build_group(N, verify=False)
    rng = np.random.default_rng(seed)
    points = sample_alcove(family, n, trials, rng, margin=margin)
    picks = rng.integers(0, group.order, size=trials)
    for q, idx in zip(points, picks):
        w = group.elements[idx]
        wq = act_on_q(w, q)
        d0, d1 = density_sqrt(data, q) ** 2, density_sqrt(data, wq) ** 2
        if abs(d1 - d0) > 1e-10 * abs(d0):
            return InvarianceResult(False, trials, {"q": q.tolist(), "w": w.to_json(), "density_sq": [d0, d1]})
        try:
            v0 = np.linalg.eigvalsh(evaluate_potential(spec, q))
            v1 = np.linalg.eigvalsh(evaluate_potential(spec, wq))
        except SingularPointError as exc:
            return InvarianceResult(False, trials, {"q": q.tolist(), "w": w.to_json(), "error": str(exc)})
        scale = max(1.0, float(np.max(np.abs(v0))))
        if np.max(np.abs(v1 - v0)) > 1e-8 * scale:
            return InvarianceResult(
                False, trials, {"q": q.tolist(), "w": w.to_json(), "eigenvalues": [v0.tolist(), v1.tolist()]}
            )
    return InvarianceResult(True, trials)


def check_tiling(N: int, samples: int = 2000, seed: int = 0) -> bool:
    """Generic points of the period box lie in exactly one image of the alcove."""
    family, n = family_for_su(N)
    cell = alcove(family, n)
    group = build_group(N, verify=False)
    inverses = [g.inverse() for g in group.elements]
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 2 * math.pi, size=(samples, n))
    for x in pts:
        hits = sum(
            cell.contains(np.mod(act_on_q(ginv, x), 2 * math.pi)) for ginv in inverses
        )
        if hits != 1:
            return False
    return True
