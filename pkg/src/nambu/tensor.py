"""Sparse fully antisymmetric tensors with polynomial entries.

Index tuples are 1-based, matching the usual ``lambda_{ijk}`` notation and
the ``.sys`` file format. Only strictly increasing tuples with nonzero
entries are stored.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .polyalgebra import Polynomial


class ShapeError(ValueError):
    pass


def permutation_sign(idx: Sequence[int]) -> int:
    """Sign of the permutation sorting ``idx``; 0 if an index repeats."""
    a = list(idx)
    sign = 1
    # bubble sort, counting transpositions
    for i in range(len(a)):
        for j in range(len(a) - 1 - i):
            if a[j] == a[j + 1]:
                return 0
            if a[j] > a[j + 1]:
                a[j], a[j + 1] = a[j + 1], a[j]
                sign = -sign
    for j in range(len(a) - 1):
        if a[j] == a[j + 1]:
            return 0
    return sign


def canonical(idx: Sequence[int]) -> tuple:
    """``(sorted tuple, sign)`` for an index tuple."""
    return tuple(sorted(idx)), permutation_sign(idx)


class AntisymTensor:
    """Rank-``r`` antisymmetric tensor over dimension ``N``.

    ``entries`` may be given with non-canonical keys; they are folded into
    canonical order with the permutation sign. Repeated-index keys must map
    to zero.
    """

    __slots__ = ("dimension", "rank", "_entries", "nvars")

    def __init__(self, dimension: int, rank: int, entries: Mapping[tuple, Polynomial] | None = None,
                 nvars: int | None = None):
        if not 2 <= rank <= dimension:
            raise ShapeError(f"rank {rank} must lie in 2..{dimension}")
        self.dimension = dimension
        self.rank = rank
        self.nvars = dimension if nvars is None else nvars
        store: dict = {}
        for idx, val in (entries or {}).items():
            idx = tuple(idx)
            self._check_index(idx)
            if not isinstance(val, Polynomial):
                val = Polynomial.constant(self.nvars, Fraction(val))
            if val.nvars != self.nvars:
                raise ShapeError(f"entry {idx} has {val.nvars} variables, expected {self.nvars}")
            key, sign = canonical(idx)
            if sign == 0:
                if not val.is_zero():
                    raise ShapeError(f"nonzero entry on repeated indices {idx}")
                continue
            val = val if sign > 0 else -val
            if key in store:
                if store[key] != val:
                    raise ShapeError(f"conflicting values for indices {key}")
            store[key] = val
        self._entries = {k: v for k, v in store.items() if not v.is_zero()}

    def _check_index(self, idx):
        if len(idx) != self.rank:
            raise ShapeError(f"expected {self.rank} indices, got {len(idx)}")
        for i in idx:
            if not 1 <= i <= self.dimension:
                raise IndexError(f"index {i} out of range 1..{self.dimension}")

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    def items(self):
        return sorted(self._entries.items())

    def get(self, *idx) -> Polynomial:
        if len(idx) == 1 and isinstance(idx[0], (tuple, list)):
            idx = tuple(idx[0])
        self._check_index(idx)
        key, sign = canonical(idx)
        val = self._entries.get(key) if sign else None
        if val is None:
            return Polynomial.zero(self.nvars)
        return val if sign > 0 else -val

    __getitem__ = get

    def is_zero(self) -> bool:
        return not self._entries

    def map_entries(self, fn) -> "AntisymTensor":
        out = {k: fn(v) for k, v in self._entries.items()}
        nv = next(iter(out.values())).nvars if out else self.nvars
        return AntisymTensor(self.dimension, self.rank, out, nvars=nv)

    def __eq__(self, other):
        if not isinstance(other, AntisymTensor):
            return NotImplemented
        return (self.dimension, self.rank, self._entries) == (other.dimension, other.rank, other._entries)

    def __repr__(self):
        body = ", ".join(f"{k}: {v.render()}" for k, v in self.items())
        return f"AntisymTensor(N={self.dimension}, r={self.rank}, {{{body}}})"


def levi_civita(dimension: int, support: Sequence[int]) -> AntisymTensor:
    """Unit tensor on one strictly increasing index tuple."""
    support = tuple(support)
    if any(b <= a for a, b in zip(support, support[1:])):
        raise ShapeError(f"support {support} is not strictly increasing")
    if support and not (1 <= support[0] and support[-1] <= dimension):
        raise ShapeError(f"support {support} out of range 1..{dimension}")
    return AntisymTensor(dimension, len(support), {support: Polynomial.constant(dimension, 1)})


def linear_combination(terms: Iterable[tuple]) -> AntisymTensor:
    """Entrywise sum of ``coefficient * tensor`` pairs.

    Coefficients are rationals or polynomials of the tensors' ring.
    """
    terms = list(terms)
    if not terms:
        raise ShapeError("empty combination")
    first = terms[0][1]
    acc: dict = {}
    for coef, t in terms:
        if (t.dimension, t.rank, t.nvars) != (first.dimension, first.rank, first.nvars):
            raise ShapeError("tensors in a combination must share dimension and rank")
        for k, v in t._entries.items():
            term = v * coef
            acc[k] = acc[k] + term if k in acc else term
    return AntisymTensor(first.dimension, first.rank, acc, nvars=first.nvars)


def as_matrix(t: AntisymTensor) -> list:
    """Dense ``N x N`` list-of-lists for a rank-2 tensor."""
    if t.rank != 2:
        raise ShapeError(f"as_matrix needs rank 2, got {t.rank}")
    n = t.dimension
    return [[t.get(i + 1, j + 1) for j in range(n)] for i in range(n)]


def from_matrix(rows: Sequence[Sequence[Polynomial]]) -> AntisymTensor:
    """Rank-2 tensor from a dense antisymmetric matrix (checked)."""
    n = len(rows)
    entries = {}
    for i in range(n):
        if len(rows[i]) != n:
            raise ShapeError("matrix is not square")
        for j in range(n):
            if not (rows[i][j] + rows[j][i]).is_zero():
                raise ShapeError(f"matrix not antisymmetric at ({i + 1}, {j + 1})")
            if i < j:
                entries[(i + 1, j + 1)] = rows[i][j]
    nv = rows[0][0].nvars if n else 0
    return AntisymTensor(n, 2, entries, nvars=nv)


def canonical_tuples(dimension: int, rank: int):
    return combinations(range(1, dimension + 1), rank)
