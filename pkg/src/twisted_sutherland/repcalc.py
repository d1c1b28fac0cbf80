"""Exact weight-lattice arithmetic for su(N).

Weights are integer coefficient vectors over the fundamental weights
``lambda_1 .. lambda_{N-1}``. The pairing is the one induced by
``<X, Y> = tr(XY)``, for which ``<lambda_i, lambda_j> = min(i, j) - ij/N``.
Nothing here touches floating point.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

__all__ = [
    "DominantWeight",
    "FundamentalGram",
    "PieriCapacities",
    "SpectrumEntry",
    "SpectrumPrediction",
    "BudgetExceeded",
    "gram",
    "gram_from_traces",
    "casimir",
    "conjugate",
    "rho",
    "pieri_capacities",
    "pieri_decompose",
    "pieri_multiplicity",
    "pieri_oracle",
    "admissible_untwisted",
    "admissible_twisted",
    "twisted_chis",
    "spectrum_twisted",
    "spectrum_untwisted",
    "spectrum_standard",
]


class BudgetExceeded(ValueError):
    """Raised when a brute-force routine is asked for more than it can enumerate."""


@dataclass(frozen=True, order=True)
class DominantWeight:
    N: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if self.N < 2:
            raise ValueError(f"su(N) needs N >= 2, got {self.N}")
        if len(self.coeffs) != self.N - 1:
            raise ValueError(f"su({self.N}) weight needs {self.N - 1} coefficients, got {self.coeffs}")
        if any(c < 0 for c in self.coeffs):
            raise ValueError(f"not dominant: {self.coeffs}")

    @classmethod
    def zero(cls, N: int) -> "DominantWeight":
        return cls(N, (0,) * (N - 1))

    @classmethod
    def fundamental(cls, N: int, i: int) -> "DominantWeight":
        coeffs = [0] * (N - 1)
        coeffs[i - 1] = 1
        return cls(N, tuple(coeffs))

    def __add__(self, other: "DominantWeight") -> "DominantWeight":
        if other.N != self.N:
            raise ValueError("weights of different su(N)")
        return DominantWeight(self.N, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c: int) -> "DominantWeight":
        return DominantWeight(self.N, tuple(c * a for a in self.coeffs))

    def is_self_conjugate(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def to_json(self) -> list[int]:
        return list(self.coeffs)


@dataclass(frozen=True)
class FundamentalGram:
    N: int
    gram: tuple[tuple[Fraction, ...], ...]

    def pair(self, a: Sequence[int | Fraction], b: Sequence[int | Fraction]) -> Fraction:
        total = Fraction(0)
        for i, x in enumerate(a):
            if x:
                row = self.gram[i]
                for j, y in enumerate(b):
                    if y:
                        total += x * row[j] * y
        return total


@functools.lru_cache(maxsize=None)
def gram(N: int) -> FundamentalGram:
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    g = tuple(
        tuple(Fraction(min(i, j)) - Fraction(i * j, N) for j in range(1, N)) for i in range(1, N)
    )
    return FundamentalGram(N, g)


def gram_from_traces(N: int) -> FundamentalGram:
    """Same pairing via traces of the diagonal matrices representing ``lambda_i``.

    ``lambda_i <-> diag(1 - i/N, ..., 1 - i/N, -i/N, ..., -i/N)`` with ``i``
    leading entries.
    """
    def diag(i: int) -> list[Fraction]:
        return [Fraction(1) - Fraction(i, N) if r < i else -Fraction(i, N) for r in range(N)]

    mats = [diag(i) for i in range(1, N)]
    g = tuple(tuple(sum(x * y for x, y in zip(a, b)) for b in mats) for a in mats)
    return FundamentalGram(N, g)


def rho(N: int) -> DominantWeight:
    return DominantWeight(N, (1,) * (N - 1))


def casimir(weight: DominantWeight) -> Fraction:
    """``<Lambda + 2 rho, Lambda>``."""
    g = gram(weight.N)
    shifted = [c + 2 for c in weight.coeffs]
    return g.pair(shifted, weight.coeffs)


def conjugate(weight: DominantWeight) -> DominantWeight:
    return DominantWeight(weight.N, weight.coeffs[::-1])


@dataclass(frozen=True)
class PieriCapacities:
    values: tuple[int, ...]  # C^1 .. C^N

    def image(self, weight: DominantWeight) -> DominantWeight:
        C = self.values
        return DominantWeight(
            weight.N, tuple(M + C[i] - C[i + 1] for i, M in enumerate(weight.coeffs))
        )


def pieri_capacities(weight: DominantWeight, k: int) -> Iterator[PieriCapacities]:
    """All ``(C^1..C^N)`` with ``C^{i+1} <= M^i`` and ``sum C = k``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    M = weight.coeffs
    N = weight.N

    def rec(i: int, remaining: int, acc: list[int]) -> Iterator[tuple[int, ...]]:
        # acc holds C^1..C^i; choose C^{i+1} <= M^i
        if i == N:
            if remaining == 0:
                yield tuple(acc)
            return
        for c in range(min(M[i - 1], remaining) + 1):
            acc.append(c)
            yield from rec(i + 1, remaining - c, acc)
            acc.pop()

    for c1 in range(k + 1):
        for values in rec(1, k - c1, [c1]):
            yield PieriCapacities(values)


def pieri_decompose(weight: DominantWeight, k: int) -> list[DominantWeight]:
    """Highest weights in ``V_weight (x) V_{k lambda_1}``, one per capacity vector."""
    return [caps.image(weight) for caps in pieri_capacities(weight, k)]


def pieri_multiplicity(weight: DominantWeight, target: DominantWeight, k: int) -> int:
    """Multiplicity of ``target`` in ``V_weight (x) V_{k lambda_1}``.

    Equals ``pieri_decompose(weight, k).count(target)`` without enumerating:
    ``m^i = M^i + C^i - C^{i+1}`` fixes every ``C`` once ``C^1`` is chosen.
    """
    if target.N != weight.N:
        raise ValueError("weights of different su(N)")
    M, m = weight.coeffs, target.coeffs
    count = 0
    for c1 in range(k + 1):
        C = [c1]
        for i in range(weight.N - 1):
            C.append(C[-1] + M[i] - m[i])
        if sum(C) == k and all(C[i + 1] >= 0 and C[i + 1] <= M[i] for i in range(weight.N - 1)):
            count += 1
    return count


def _to_partition(weight: DominantWeight) -> list[int]:
    M = weight.coeffs
    return [sum(M[j:]) for j in range(len(M))] + [0]


def _from_partition(N: int, parts: Sequence[int]) -> DominantWeight:
    return DominantWeight(N, tuple(parts[i] - parts[i + 1] for i in range(N - 1)))


def pieri_oracle(weight: DominantWeight, k: int) -> list[DominantWeight]:
    """Independent Pieri rule: add every horizontal ``k``-strip to the Young diagram.

    Rows of the resulting diagram are capped at ``N``; full columns drop out
    when mapping back to fundamental-weight coefficients.
    """
    N = weight.N
    if N > 8 or max(weight.coeffs, default=0) > 8 or k > 10:
        raise BudgetExceeded(
            f"pieri_oracle budget is N <= 8, coefficients <= 8, k <= 10; got N={N}, "
            f"weight={weight.coeffs}, k={k}"
        )
    mu = _to_partition(weight)  # N rows, last row 0
    results: list[DominantWeight] = []

    def rec(row: int, remaining: int, parts: list[int]) -> None:
        if row == N:
            if remaining == 0:
                results.append(_from_partition(N, parts))
            return
        # horizontal strip: mu[row] <= nu[row] <= mu[row - 1]
        upper = mu[row] + remaining if row == 0 else min(mu[row - 1], mu[row] + remaining)
        for nu_row in range(mu[row], upper + 1):
            parts.append(nu_row)
            rec(row + 1, remaining - (nu_row - mu[row]), parts)
            parts.pop()

    rec(0, k, [])
    return results


def _enumerate_cone(
    base: Sequence[int],
    directions: Sequence[Sequence[int]],
    within: Callable[[tuple[int, ...]], bool],
) -> Iterator[tuple[int, ...]]:
    """Points ``base + sum c_d * direction_d`` (``c_d >= 0``) accepted by ``within``.

    ``within`` must be monotone: rejecting a point rejects everything further
    out along any direction. Every direction has nonnegative entries and the
    Casimir strictly increases along each of them, so Casimir cutoffs qualify.
    """
    def rec(d: int, point: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if d == len(directions):
            yield point
            return
        current = point
        while within(current):
            yield from rec(d + 1, current)
            current = tuple(a + b for a, b in zip(current, directions[d]))

    if within(tuple(base)):
        yield from rec(0, tuple(base))


def _self_conjugate_directions(N: int) -> list[tuple[int, ...]]:
    dirs = []
    for i in range(1, N // 2 + 1):
        v = [0] * (N - 1)
        v[i - 1] += 1
        if i != N - i:
            v[N - i - 1] += 1
        dirs.append(tuple(v))
    return dirs


def _unit_directions(N: int) -> list[tuple[int, ...]]:
    return [tuple(1 if j == i else 0 for j in range(N - 1)) for i in range(N - 1)]


def _casimir_bound(N: int, cutoff) -> Callable[[tuple[int, ...]], bool]:
    cutoff = Fraction(cutoff)
    return lambda c: casimir(DominantWeight(N, c)) <= cutoff


def _box_bound(box: int) -> Callable[[tuple[int, ...]], bool]:
    return lambda c: max(c, default=0) <= box


def admissible_untwisted(
    gamma: int, N: int, cutoff, *, verify: bool = True
) -> list[DominantWeight]:
    """``Lambda = gamma * rho + mu`` with Casimir at most ``cutoff``."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    base = (gamma,) * (N - 1)
    found = sorted(
        DominantWeight(N, c)
        for c in _enumerate_cone(base, _unit_directions(N), _casimir_bound(N, cutoff))
    )
    if verify:
        for lam in found:
            if pieri_decompose(lam, gamma * N).count(lam) != 1:
                raise AssertionError(f"{lam} fails N^L_(L, gamma N lambda_1) = 1")
    return found


def twisted_chis(k: int, N: int) -> list[DominantWeight]:
    """``chi = sum C^{i+1} lambda_i`` over palindromic ``C`` with ``sum C = k``."""
    out = set()
    half = (N + 1) // 2  # free entries C^1..C^half
    for free in itertools.product(range(k + 1), repeat=half):
        C = list(free) + [free[N - i - 1] for i in range(half, N)]
        if sum(C) == k:
            out.add(DominantWeight(N, tuple(C[1:])))
    return sorted(out)


def admissible_twisted(
    k: int, N: int, cutoff=None, *, box: int | None = None, verify: bool = False
) -> list[DominantWeight]:
    """Weights ``mu + chi`` with ``mu`` self-conjugate, below a Casimir cutoff or in a box.

    Exactly one of ``cutoff`` and ``box`` must be given; ``box`` bounds every
    fundamental-weight coefficient of the returned weights.
    """
    if k < 0 or N < 3:
        raise ValueError("need k >= 0 and N >= 3")
    if (cutoff is None) == (box is None):
        raise ValueError("give exactly one of cutoff and box")
    within = _casimir_bound(N, cutoff) if box is None else _box_bound(box)
    dirs = _self_conjugate_directions(N)
    found: set[DominantWeight] = set()
    for chi in twisted_chis(k, N):
        found.update(DominantWeight(N, c) for c in _enumerate_cone(chi.coeffs, dirs, within))
    result = sorted(found)
    if verify:
        for lam in result:
            if pieri_multiplicity(lam, conjugate(lam), k) != 1:
                raise AssertionError(f"{lam} fails N^(L*)_(L, k lambda_1) = 1")
    return result


@dataclass(frozen=True)
class SpectrumEntry:
    eigenvalue: Fraction
    multiplicity: int
    weights: tuple[DominantWeight, ...]

    def to_json(self) -> dict:
        return {
            "eigenvalue": str(self.eigenvalue),
            "multiplicity": self.multiplicity,
            "weights": [w.to_json() for w in self.weights],
        }


@dataclass(frozen=True)
class SpectrumPrediction:
    """Sorted eigenvalues with multiplicities; complete below ``cutoff``."""

    entries: tuple[SpectrumEntry, ...]
    cutoff: Fraction | None = None
    note: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_weights(
        cls,
        weights: Iterable[DominantWeight],
        value: Callable[[DominantWeight], Fraction] = casimir,
        cutoff=None,
        note: str = "",
        meta: dict | None = None,
    ) -> "SpectrumPrediction":
        groups: dict[Fraction, list[DominantWeight]] = {}
        for w in weights:
            groups.setdefault(value(w), []).append(w)
        entries = tuple(
            SpectrumEntry(ev, len(ws), tuple(sorted(ws))) for ev, ws in sorted(groups.items())
        )
        return cls(entries, None if cutoff is None else Fraction(cutoff), note, meta or {})

    def eigenvalues(self) -> list[Fraction]:
        return [e.eigenvalue for e in self.entries]

    def expanded(self) -> list[Fraction]:
        return [e.eigenvalue for e in self.entries for _ in range(e.multiplicity)]

    def to_json(self) -> dict:
        doc = {
            "entries": [e.to_json() for e in self.entries],
            "cutoff": None if self.cutoff is None else str(self.cutoff),
        }
        if self.note:
            doc["note"] = self.note
        doc.update(self.meta)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SpectrumPrediction":
        entries = []
        for e in doc["entries"]:
            ws = tuple(DominantWeight(len(w) + 1, tuple(w)) for w in e["weights"])
            entries.append(SpectrumEntry(Fraction(e["eigenvalue"]), int(e["multiplicity"]), ws))
        cutoff = doc.get("cutoff")
        return cls(tuple(entries), None if cutoff is None else Fraction(cutoff), doc.get("note", ""))


def spectrum_twisted(k: int, N: int, cutoff) -> SpectrumPrediction:
    """Spectrum of ``-Delta_red`` for the twisted model with spin space ``V_{k lambda_1}``."""
    weights = admissible_twisted(k, N, cutoff)
    note = ""
    if N % 2 == 0 and k % 2 == 1:
        note = f"empty: k={k} is odd and N={N} is even, so no palindromic capacity vector exists"
    return SpectrumPrediction.from_weights(weights, cutoff=cutoff, note=note)


def spectrum_untwisted(gamma: int, N: int, cutoff) -> SpectrumPrediction:
    """Spectrum of ``-Delta_red`` for the untwisted model, ``Lambda = gamma rho + mu``."""
    return SpectrumPrediction.from_weights(admissible_untwisted(gamma, N, cutoff), cutoff=cutoff)


def spectrum_standard(gamma: int, N: int, cutoff) -> SpectrumPrediction:
    """Spectrum of the standard Sutherland Hamiltonian at coupling ``g = gamma + 1``.

    Eigenvalues ``2 <mu + g rho, mu + g rho>``; ``cutoff`` bounds these
    eigenvalues. Source weights are ``Lambda = gamma rho + mu``.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    g = gamma + 1
    G = gram(N)
    cutoff = Fraction(cutoff)

    def energy(lam: DominantWeight) -> Fraction:
        shifted = [c + 1 for c in lam.coeffs]  # Lambda + rho = mu + g rho
        return 2 * G.pair(shifted, shifted)

    base = (gamma,) * (N - 1)
    weights = [
        DominantWeight(N, c)
        for c in _enumerate_cone(
            base, _unit_directions(N), lambda c: energy(DominantWeight(N, c)) <= cutoff
        )
    ]
    return SpectrumPrediction.from_weights(weights, value=energy, cutoff=cutoff, meta={"g": g})
