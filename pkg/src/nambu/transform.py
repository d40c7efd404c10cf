"""Polynomial coordinate changes and how brackets transform under them.

A map ``x = h(z)`` comes with an explicit polynomial inverse ``z = h~(x)``.
A tensor transforms as ``lambda~_{i1..ir} = {h_i1, ..., h_ir} o h~``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .brackets import nambu_bracket
from .polyalgebra import DimensionError, Polynomial
from .tensor import AntisymTensor, ShapeError, canonical_tuples, levi_civita


class InvalidMapError(ValueError):
    def __init__(self, message, component=None, residual=None):
        super().__init__(message)
        self.component = component
        self.residual = residual


@dataclass(frozen=True)
class CoordinateMap:
    forward: tuple   # h_i(z)
    inverse: tuple   # h~_i(x)

    @property
    def dimension(self) -> int:
        return len(self.forward)

    def inverted(self) -> "CoordinateMap":
        return CoordinateMap(self.inverse, self.forward)

    def then(self, other: "CoordinateMap") -> "CoordinateMap":
        """Apply ``self`` first, then ``other``."""
        if other.dimension != self.dimension:
            raise DimensionError("cannot compose maps of different dimension")
        fwd = tuple(g.compose(self.forward) for g in other.forward)
        inv = tuple(g.compose(other.inverse) for g in self.inverse)
        return CoordinateMap(fwd, inv)


def identity_map(n: int) -> CoordinateMap:
    xs = tuple(Polynomial.var(n, i) for i in range(n))
    return CoordinateMap(xs, xs)


def validate_map(forward: Sequence[Polynomial], inverse: Sequence[Polynomial]) -> CoordinateMap:
    """Check ``h~ o h = id`` and ``h o h~ = id`` exactly."""
    forward, inverse = tuple(forward), tuple(inverse)
    n = len(forward)
    if len(inverse) != n or n == 0:
        raise InvalidMapError("forward and inverse must have the same nonzero length")
    for p in forward + inverse:
        if p.nvars != n:
            raise InvalidMapError(f"component lives in {p.nvars} variables, expected {n}")
    for label, outer, inner in (("inverse o forward", inverse, forward),
                                ("forward o inverse", forward, inverse)):
        for i, g in enumerate(outer):
            res = g.compose(inner) - Polynomial.var(n, i)
            if not res.is_zero():
                raise InvalidMapError(
                    f"{label} differs from the identity in component {i + 1}: {res.render()}",
                    component=i + 1, residual=res)
    return CoordinateMap(forward, inverse)


def transform_tensor(tensor: AntisymTensor, cmap: CoordinateMap) -> AntisymTensor:
    if cmap.dimension != tensor.dimension or tensor.nvars != tensor.dimension:
        raise DimensionError("map and tensor dimensions differ")
    entries = {}
    for idx in canonical_tuples(tensor.dimension, tensor.rank):
        val = nambu_bracket(tensor, [cmap.forward[i - 1] for i in idx])
        if not val.is_zero():
            val = val.compose(cmap.inverse)
            if not val.is_zero():
                entries[idx] = val
    return AntisymTensor(tensor.dimension, tensor.rank, entries)


def transform_poisson(J: AntisymTensor, cmap: CoordinateMap) -> AntisymTensor:
    if J.rank != 2:
        raise ShapeError("transform_poisson needs a rank-2 tensor")
    return transform_tensor(J, cmap)


def pullback_canonical(cmap: CoordinateMap, rank: int) -> AntisymTensor:
    """Levi-Civita tensor on ``(1, 2, 3, ..., rank)`` in Darboux coordinates,
    expressed in the original coordinates of ``cmap``."""
    n = cmap.dimension
    if not 3 <= rank <= n:
        raise ShapeError(f"rank {rank} outside 3..{n}")
    eps = levi_civita(n, tuple(range(1, rank + 1)))
    return transform_tensor(eps, cmap.inverted())
