"""Poisson and n-linear Nambu brackets driven by an antisymmetric tensor.

The bracket of ``r`` observables is evaluated per stored canonical tuple
``t`` of the tensor as ``lambda_t * det(d args[a] / d z_{t_b})``, which is
the full index sum folded by antisymmetry.
"""

from __future__ import annotations

from itertools import permutations
from typing import Sequence

from .polyalgebra import DimensionError, Polynomial
from .tensor import AntisymTensor, ShapeError, permutation_sign


def _perm_table(r: int):
    return [(p, permutation_sign(p)) for p in permutations(range(r))]


_PERMS: dict = {}


def _perms(r):
    if r not in _PERMS:
        _PERMS[r] = _perm_table(r)
    return _PERMS[r]


def bracket_from_gradients(tensor: AntisymTensor, grads: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Bracket given precomputed gradients (each a list of ``N`` partials)."""
    r = tensor.rank
    if len(grads) != r:
        raise ShapeError(f"bracket needs {r} arguments, got {len(grads)}")
    total = Polynomial.zero(tensor.nvars)
    perms = _perms(r)
    for idx, lam in tensor._entries.items():
        cols = [i - 1 for i in idx]
        rows = [[g[c] for c in cols] for g in grads]
        if any(all(x.is_zero() for x in row) for row in rows):
            continue
        det = Polynomial.zero(tensor.nvars)
        for perm, sign in perms:
            prod = None
            for a, b in enumerate(perm):
                f = rows[a][b]
                if f.is_zero():
                    prod = None
                    break
                prod = f if prod is None else prod * f
            if prod is not None:
                det = det + prod if sign > 0 else det - prod
        if not det.is_zero():
            total = total + lam * det
    return total


def _gradient(tensor: AntisymTensor, f: Polynomial) -> list:
    if f.nvars != tensor.nvars:
        raise DimensionError(f"observable has {f.nvars} variables, bracket expects {tensor.nvars}")
    return [f.partial(i) for i in range(tensor.dimension)]


def nambu_bracket(tensor: AntisymTensor, args: Sequence[Polynomial]) -> Polynomial:
    """``{A_1, ..., A_r}`` for the bracket generated by ``tensor``."""
    if len(args) != tensor.rank:
        raise ShapeError(f"bracket needs {tensor.rank} arguments, got {len(args)}")
    return bracket_from_gradients(tensor, [_gradient(tensor, a) for a in args])


def poisson_bracket(J: AntisymTensor, A: Polynomial, B: Polynomial) -> Polynomial:
    if J.rank != 2:
        raise ShapeError("poisson_bracket needs a rank-2 tensor")
    return nambu_bracket(J, [A, B])


def coordinates(tensor: AntisymTensor) -> list:
    return [Polynomial.var(tensor.nvars, i) for i in range(tensor.dimension)]


def derived_poisson(tensor: AntisymTensor, casimirs: Sequence[Polynomial]) -> AntisymTensor:
    """Poisson matrix ``J_ij = {z_i, z_j, C_1, ..., C_{r-2}}``."""
    if len(casimirs) != tensor.rank - 2:
        raise ShapeError(f"need {tensor.rank - 2} Casimir generators, got {len(casimirs)}")
    n = tensor.dimension
    unit = [[Polynomial.constant(tensor.nvars, 1 if i == j else 0) for j in range(n)]
            for i in range(n)]
    cgrads = [_gradient(tensor, c) for c in casimirs]
    entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            val = bracket_from_gradients(tensor, [unit[i], unit[j]] + cgrads)
            if not val.is_zero():
                entries[(i + 1, j + 1)] = val
    return AntisymTensor(n, 2, entries, nvars=tensor.nvars)


def hamiltonian_vector_field(tensor: AntisymTensor, generators: Sequence[Polynomial]) -> list:
    """Components ``dz_i/dt = {z_i, G_1, ..., G_{r-1}}``."""
    if len(generators) != tensor.rank - 1:
        raise ShapeError(f"need {tensor.rank - 1} generators, got {len(generators)}")
    n = tensor.dimension
    ggrads = [_gradient(tensor, g) for g in generators]
    field = []
    for i in range(n):
        unit = [Polynomial.constant(tensor.nvars, 1 if k == i else 0) for k in range(n)]
        field.append(bracket_from_gradients(tensor, [unit] + ggrads))
    return field
