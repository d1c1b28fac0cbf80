"""Bosonic oscillator realization of ``V_{k lambda_1}`` and its invariant subspaces.

Everything is computed in the *monomial* basis ``prod_i (a_i^+)^{n_i} v_0``,
where ``a_i^+ a_j`` has nonnegative integer matrix elements. The basis is
orthogonal with ``||monomial||^2 = prod_i n_i!``; :func:`symmetrize` converts
an exact matrix to the orthonormal (symmetric) float form. In that form the
odd-``N`` operators ``D_i`` carry entries ``sqrt(m(m-1)) (n_i + 1)``, which
is why exact arithmetic stays in the monomial basis.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "FockSpace",
    "InvariantFockBasis",
    "SpinOperator",
    "SubspaceNotPreserved",
    "fock_space",
    "invariant_basis",
    "invariant_basis_bruteforce",
    "dim_invariant",
    "ladder_matrix",
    "generator_matrix",
    "restrict_to_invariant",
    "spin_operator",
    "apply_word",
    "symmetrize",
    "exact_matrix",
    "matrix_to_json",
    "number_operator",
    "monomial_norm_sq",
]

_BUDGET = 200_000


class SubspaceNotPreserved(ValueError):
    def __init__(self, message: str, witness: np.ndarray):
        super().__init__(message)
        self.witness = witness


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


@dataclass(frozen=True)
class FockSpace:
    """Monomial basis of ``V_k``: occupation vectors with ``sum n_i = k``."""

    N: int
    k: int
    states: tuple[tuple[int, ...], ...]

    @functools.cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)


@functools.lru_cache(maxsize=64)
def fock_space(N: int, k: int) -> FockSpace:
    dim = math.comb(k + N - 1, N - 1)
    if dim > _BUDGET:
        raise ValueError(f"dim V_k = {dim} exceeds the budget {_BUDGET}")
    return FockSpace(N, k, tuple(_compositions(k, N)))


def monomial_norm_sq(occupations: Sequence[int]) -> int:
    return math.prod(math.factorial(n) for n in occupations)


@dataclass(frozen=True)
class InvariantFockBasis:
    """Basis of ``V_k`` annihilated by the theta-fixed Cartan generators.

    ``labels`` are ``(n_1..n_n)`` for ``N = 2n`` and ``(m, n_1..n_n)`` for
    ``N = 2n + 1`` (``m`` is the middle-mode count), sorted lexicographically
    descending. ``occupations`` are the corresponding full monomials.
    """

    N: int
    k: int
    labels: tuple[tuple[int, ...], ...]
    occupations: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.N // 2

    @property
    def odd(self) -> bool:
        return self.N % 2 == 1

    @property
    def dim(self) -> int:
        return len(self.labels)

    def norms_sq(self) -> tuple[int, ...]:
        return tuple(monomial_norm_sq(o) for o in self.occupations)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "k": self.k,
            "labels": [list(l) for l in self.labels],
            "occupations": [list(o) for o in self.occupations],
        }


def _occupation(N: int, label: Sequence[int]) -> tuple[int, ...]:
    n = N // 2
    occ = [0] * N
    pairs = label[1:] if N % 2 else label
    for i, p in enumerate(pairs):
        occ[i] = occ[N - 1 - i] = p
    if N % 2:
        occ[n] = label[0]
    return tuple(occ)


@functools.lru_cache(maxsize=None)
def invariant_basis(N: int, k: int) -> InvariantFockBasis:
    if N < 3 or k < 0:
        raise ValueError(f"need N >= 3 and k >= 0, got N={N}, k={k}")
    n = N // 2
    labels = []
    if N % 2 == 0:
        if k % 2 == 0:
            labels = list(_compositions(k // 2, n))
    else:
        for m in range(k, -1, -1):
            if (k - m) % 2 == 0:
                labels += [(m, *rest) for rest in _compositions((k - m) // 2, n)]
    labels.sort(reverse=True)
    return InvariantFockBasis(
        N, k, tuple(labels), tuple(_occupation(N, l) for l in labels)
    )


def invariant_basis_bruteforce(N: int, k: int) -> list[tuple[int, ...]]:
    """Monomials of ``V_k`` on which every theta-fixed Cartan generator vanishes.

    The fixed Cartan subalgebra is spanned by ``E_jj - E_{N+1-j,N+1-j}``.
    """
    out = []
    for occ in _compositions(k, N):
        if all(occ[j] - occ[N - 1 - j] == 0 for j in range(N // 2)):
            out.append(occ)
    return out


def dim_invariant(N: int, k: int) -> int:
    if N < 3:
        raise ValueError("N must be >= 3")
    n = N // 2
    if N % 2 == 0:
        return math.comb(k // 2 + n - 1, n - 1) if k % 2 == 0 else 0
    return sum(math.comb(kappa + n - 1, n - 1) for kappa in range(k // 2 + 1))


# --- oscillator words -------------------------------------------------------

def apply_word(word: Sequence[tuple[str, int]], vector: dict[tuple[int, ...], int]) -> dict:
    """Apply a product of ladder operators to a monomial-basis vector.

    ``word`` lists ``("c", i)`` (creation ``a_i^+``) and ``("a", i)``
    (annihilation ``a_i``), zero-based modes, written left to right as in the
    operator product; the rightmost factor acts first.
    """
    out = dict(vector)
    for kind, i in reversed(word):
        nxt: dict[tuple[int, ...], int] = {}
        for occ, coef in out.items():
            if kind == "c":
                new = list(occ)
                new[i] += 1
                key, val = tuple(new), coef
            else:
                if occ[i] == 0:
                    continue
                new = list(occ)
                new[i] -= 1
                key, val = tuple(new), coef * occ[i]
            nxt[key] = nxt.get(key, 0) + val
        out = {o: c for o, c in nxt.items() if c}
    return out


def ladder_matrix(space: FockSpace, i: int, j: int) -> np.ndarray:
    """Integer matrix of ``a_i^+ a_j`` (zero-based) on the monomial basis."""
    dim = space.dim
    mat = np.zeros((dim, dim), dtype=np.int64)
    for col, occ in enumerate(space.states):
        if occ[j] == 0:
            continue
        new = list(occ)
        new[j] -= 1
        new[i] += 1
        mat[space.index[tuple(new)], col] = occ[j]
    return mat


def generator_matrix(N: int, k: int, X) -> np.ndarray:
    """``rho'(X) = sum X_ij a_i^+ a_j`` on the monomial basis of ``V_k``.

    Integer ``X`` gives an ``int64`` matrix, anything else an object array of
    :class:`~fractions.Fraction`.
    """
    X = np.asarray(X, dtype=object)
    if X.shape != (N, N):
        raise ValueError(f"X must be {N}x{N}")
    space = fock_space(N, k)
    integral = all(Fraction(x).denominator == 1 for x in X.flat)
    out = np.zeros((space.dim, space.dim), dtype=np.int64 if integral else object)
    if not integral:
        out[...] = Fraction(0)
    for i, j in itertools.product(range(N), repeat=2):
        x = Fraction(X[i, j])
        if x:
            lad = ladder_matrix(space, i, j)
            out = out + (int(x) * lad if integral else lad.astype(object) * x)
    return out


def restrict_to_invariant(N: int, k: int, M: np.ndarray) -> np.ndarray:
    """Submatrix of ``M`` (on ``V_k``) on the invariant basis.

    Raises :class:`SubspaceNotPreserved`, carrying the offending image vector,
    if ``M`` maps an invariant state outside the invariant subspace.
    """
    space = fock_space(N, k)
    basis = invariant_basis(N, k)
    idx = [space.index[o] for o in basis.occupations]
    inside = np.zeros(space.dim, dtype=bool)
    inside[idx] = True
    for col in idx:
        column = M[:, col]
        leak = [r for r in np.nonzero(column)[0] if not inside[r]]
        if leak:
            raise SubspaceNotPreserved(
                f"image of invariant state {space.states[col]} leaves the invariant subspace",
                witness=np.array(column),
            )
    return M[np.ix_(idx, idx)]


# --- spin operators ---------------------------------------------------------

@dataclass(frozen=True)
class SpinOperator:
    """Exact operator on the invariant basis (monomial-basis matrix)."""

    label: str
    matrix: np.ndarray  # object array of Fraction
    norms_sq: tuple[int, ...]

    def symmetric(self) -> np.ndarray:
        return symmetrize(self.matrix, self.norms_sq)

    def to_json(self) -> dict:
        return {"label": self.label, "matrix": matrix_to_json(self.matrix), "norms_sq": list(self.norms_sq)}


def exact_matrix(rows) -> np.ndarray:
    arr = np.array(rows, dtype=object)
    if arr.ndim != 2:
        arr = arr.reshape(len(rows), -1)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = Fraction(x)
    return out


def symmetrize(matrix: np.ndarray, norms_sq: Sequence[int]) -> np.ndarray:
    """Float matrix in the orthonormal basis: ``S M S^-1`` with ``S = diag(sqrt(norms))``."""
    s = np.sqrt(np.array(norms_sq, dtype=float))
    mat = np.array([[float(x) for x in row] for row in matrix], dtype=float).reshape(len(s), len(s))
    out = s[:, None] * mat / s[None, :]
    return (out + out.T) / 2


def matrix_to_json(matrix: np.ndarray) -> list[list[str]]:
    return [[str(Fraction(x)) for x in row] for row in matrix]


def _word_operator(basis: InvariantFockBasis, words: list[tuple[int, list[tuple[str, int]]]]) -> np.ndarray:
    """Matrix of ``sum sign * word`` on the invariant basis."""
    index = {o: i for i, o in enumerate(basis.occupations)}
    mat = np.empty((basis.dim, basis.dim), dtype=object)
    mat[...] = Fraction(0)
    for col, occ in enumerate(basis.occupations):
        for sign, word in words:
            for out, coef in apply_word(word, {occ: 1}).items():
                if out not in index:
                    raise SubspaceNotPreserved(f"word {word} leaves the invariant subspace", np.array(out))
                mat[index[out], col] += sign * coef
    return mat


def _number_diag(basis: InvariantFockBasis, fn) -> np.ndarray:
    mat = np.empty((basis.dim, basis.dim), dtype=object)
    mat[...] = Fraction(0)
    for r, occ in enumerate(basis.occupations):
        mat[r, r] = Fraction(fn(occ))
    return mat


def spin_operator(N: int, k: int, label: str, i: int, j: int | None = None) -> SpinOperator:
    """The operators ``A_ij``, ``B_ij`` (any N) and ``C_i``, ``D_i`` (odd N).

    Indices are one-based pair indices. ``label`` is one of ``"A"``, ``"B"``,
    ``"C"``, ``"D"``.
    """
    basis = invariant_basis(N, k)
    n = N // 2
    label = label.upper()
    if label in ("A", "B"):
        if j is None:
            raise ValueError(f"{label} needs two indices")
        ok = 1 <= i <= j <= n if label == "A" else 1 <= i < j <= n
        if not ok:
            raise ValueError(f"invalid indices for {label}: ({i}, {j}) with n={n}")
    elif label in ("C", "D"):
        if N % 2 == 0:
            raise ValueError(f"{label}_i exists only for odd N")
        if not 1 <= i <= n or j is not None:
            raise ValueError(f"invalid index for {label}: {i} with n={n}")
    else:
        raise ValueError(f"unknown spin operator {label!r}")

    def partner(a: int) -> int:  # zero-based N + 1 - a
        return N - a

    a0 = i - 1
    mid = n  # zero-based middle mode for odd N
    if label == "A":
        b0 = j - 1
        mat = _number_diag(basis, lambda o: 2 * o[a0] * o[b0] + o[a0] + o[b0])
        name = f"A_{i}{j}"
    elif label == "C":
        mat = _number_diag(basis, lambda o: 2 * o[a0] * o[mid] + o[mid] + o[a0])
        name = f"C_{i}"
    elif label == "B":
        b0 = j - 1
        sign = (-1) ** (i + j)
        words = [
            (sign, [("c", a0), ("c", partner(i)), ("a", b0), ("a", partner(j))]),
            (sign, [("a", a0), ("a", partner(i)), ("c", b0), ("c", partner(j))]),
        ]
        mat = _word_operator(basis, words)
        name = f"B_{i}{j}"
    else:
        sign = (-1) ** (i + n)
        words = [
            (sign, [("c", a0), ("c", partner(i)), ("a", mid), ("a", mid)]),
            (sign, [("a", a0), ("a", partner(i)), ("c", mid), ("c", mid)]),
        ]
        mat = _word_operator(basis, words)
        name = f"D_{i}"
    return SpinOperator(name, mat, basis.norms_sq())


def number_operator(N: int, k: int, fn) -> np.ndarray:
    """Diagonal exact matrix ``fn(occupations)`` on the invariant basis."""
    return _number_diag(invariant_basis(N, k), fn)
