"""Exact checks on Nambu tensors and Poisson matrices.

Every checker walks its index space in lexicographic order and stops at the
first violation, so the reported witness is the lexicographically smallest
violating tuple. Enumeration is pruned by the symmetries of each identity:

* algebraic tensor condition ``S(n, m, i, j, k, p)``: symmetric in
  ``n <-> m`` and totally antisymmetric in ``(i, j, k)``; only
  ``n <= m``, ``i < j < k`` (any ``p``) are evaluated.
* differential tensor condition ``T(j, k, m, n, p)``: antisymmetric in
  ``(j, k)`` and totally antisymmetric in ``(m, n, p)``.
* Jacobi condition ``(i, j, k)``: totally antisymmetric.

The smallest member of every orbit is its sorted representative, and all
members of an orbit share the residual up to sign, so the first violation
of the pruned walk is also the first of the full walk.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Mapping, Sequence

from .brackets import bracket_from_gradients, nambu_bracket
from .polyalgebra import DimensionError, Polynomial
from .tensor import AntisymTensor, ShapeError, canonical_tuples, permutation_sign


class RankParityError(ArithmeticError):
    """Sampled rank of an antisymmetric matrix came out odd."""


@dataclass
class VerificationReport:
    check: str
    passed: bool
    witness: tuple | None = None
    residual: Polynomial | None = None
    examined: int = 0
    extra_vars: tuple = ()

    def to_dict(self, names: Sequence[str] | None = None) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "witness": list(self.witness) if self.witness is not None else None,
            "residual": self._render_residual(names),
            "tuples_examined": self.examined,
        }

    def _render_residual(self, names):
        if self.residual is None:
            return None
        if names is not None:
            names = list(names) + list(self.extra_vars)
        return self.residual.render(names)

    def render(self, names: Sequence[str] | None = None) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"{self.check}: {status} ({self.examined} tuples examined)"
        if not self.passed:
            out += f"\n  witness: {self.witness}\n  residual: {self._render_residual(names)}"
        return out


@dataclass
class AdmissibilityReport:
    dimension: int
    rank: int
    casimir_count: int
    admissible: bool
    samples: int
    seed: int = 0
    ranks: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "rank": self.rank,
            "casimir_count": self.casimir_count,
            "admissible": self.admissible,
            "samples": self.samples,
            "seed": self.seed,
        }

    def render(self) -> str:
        return (f"N = {self.dimension}\nrank = {self.rank}\nK = {self.casimir_count}\n"
                f"admissible: {'yes' if self.admissible else 'no'}")


def _require_rank(t: AntisymTensor, r: int, what: str):
    if t.rank != r:
        raise ShapeError(f"{what} needs a rank-{r} tensor, got rank {t.rank}")


# -- algebraic condition -------------------------------------------------------


def cond_algebraic_residual(lam: AntisymTensor, n, m, i, j, k, p) -> Polynomial:
    g = lam.get
    return (g(n, i, j) * g(m, k, p) + g(n, j, k) * g(m, i, p) + g(n, k, i) * g(m, j, p)
            + g(m, i, j) * g(n, k, p) + g(m, j, k) * g(n, i, p) + g(m, k, i) * g(n, j, p))


def _cond_algebraic_pruned(lam: AntisymTensor):
    """Yield ``(tuple, residual)`` over pruned representatives in lex order."""
    N = lam.dimension
    # rows[a] = {(b, c): value} restricted to nonzero lam_{a b c}
    rows = {a: {} for a in range(1, N + 1)}
    for idx, v in lam._entries.items():
        for perm in permutations(idx):
            rows[perm[0]][perm[1:]] = v if permutation_sign(perm) > 0 else -v
    zero = Polynomial.zero(lam.nvars)
    for n in range(1, N + 1):
        for m in range(n, N + 1):
            for i, j, k in combinations(range(1, N + 1), 3):
                for p in range(1, N + 1):
                    acc = zero
                    for x, y, a, b in ((n, m, (i, j), (k, p)), (n, m, (j, k), (i, p)),
                                       (n, m, (k, i), (j, p)), (m, n, (i, j), (k, p)),
                                       (m, n, (j, k), (i, p)), (m, n, (k, i), (j, p))):
                        u = rows[x].get(a)
                        if u is None:
                            continue
                        w = rows[y].get(b)
                        if w is None:
                            continue
                        acc = acc + u * w
                    yield (n, m, i, j, k, p), acc


def check_cond_algebraic(lam: AntisymTensor) -> VerificationReport:
    """Quadratic condition on a rank-3 tensor (terms in second derivatives)."""
    _require_rank(lam, 3, "check_cond_algebraic")
    count = 0
    for tup, res in _cond_algebraic_pruned(lam):
        count += 1
        if not res.is_zero():
            return VerificationReport("cond_algebraic", False, tup, res, count)
    return VerificationReport("cond_algebraic", True, examined=count)


def cond_algebraic_violations(lam: AntisymTensor) -> dict:
    """Full violation set ``{(n,m,i,j,k,p): residual}`` rebuilt from the
    pruned representatives via the orbit symmetries."""
    _require_rank(lam, 3, "cond_algebraic_violations")
    out = {}
    for (n, m, i, j, k, p), res in _cond_algebraic_pruned(lam):
        if res.is_zero():
            continue
        for nn, mm in {(n, m), (m, n)}:
            for perm in permutations((i, j, k)):
                s = permutation_sign(perm)
                out[(nn, mm) + perm + (p,)] = res if s > 0 else -res
    return out


# -- differential condition ----------------------------------------------------


def _partials_table(t: AntisymTensor) -> dict:
    """``{canonical idx: [d/dz_1, ..., d/dz_N]}`` for stored entries."""
    return {idx: [v.partial(l) for l in range(t.dimension)] for idx, v in t._entries.items()}


def _signed_partial(t: AntisymTensor, table: dict, idx: tuple, l: int):
    key = tuple(sorted(idx))
    s = permutation_sign(idx)
    if s == 0 or key not in table:
        return None
    d = table[key][l]
    if d.is_zero():
        return None
    return d if s > 0 else -d


def cond_differential_residual(lam: AntisymTensor, j, k, m, n, p, _table=None) -> Polynomial:
    table = _partials_table(lam) if _table is None else _table
    acc = Polynomial.zero(lam.nvars)
    g = lam.get
    for i in range(1, lam.dimension + 1):
        l = i - 1
        for coef_idx, deriv_idx, sign in (((i, j, k), (m, n, p), 1),
                                          ((i, n, p), (m, j, k), -1),
                                          ((i, p, m), (n, j, k), -1),
                                          ((i, m, n), (p, j, k), -1)):
            d = _signed_partial(lam, table, deriv_idx, l)
            if d is None:
                continue
            c = g(coef_idx)
            if c.is_zero():
                continue
            acc = acc + c * d if sign > 0 else acc - c * d
    return acc


def check_cond_differential(lam: AntisymTensor) -> VerificationReport:
    """First-derivative condition on a rank-3 tensor."""
    _require_rank(lam, 3, "check_cond_differential")
    N = lam.dimension
    table = _partials_table(lam)
    count = 0
    constant = all(v.is_constant() for v in lam._entries.values())
    for j, k in combinations(range(1, N + 1), 2):
        for m, n, p in combinations(range(1, N + 1), 3):
            count += 1
            if constant:
                continue
            res = cond_differential_residual(lam, j, k, m, n, p, table)
            if not res.is_zero():
                return VerificationReport("cond_differential", False, (j, k, m, n, p), res, count)
    return VerificationReport("cond_differential", True, examined=count)


# -- Jacobi --------------------------------------------------------------------


def jacobi_residual(J: AntisymTensor, i, j, k, _table=None) -> Polynomial:
    table = _partials_table(J) if _table is None else _table
    acc = Polynomial.zero(J.nvars)
    for l in range(1, J.dimension + 1):
        for a, b, c in ((i, j, k), (k, i, j), (j, k, i)):
            d = _signed_partial(J, table, (b, c), l - 1)
            if d is None:
                continue
            coef = J.get(a, l)
            if not coef.is_zero():
                acc = acc + coef * d
    return acc


def check_jacobi(J: AntisymTensor, name: str = "jacobi") -> VerificationReport:
    _require_rank(J, 2, "check_jacobi")
    table = _partials_table(J)
    count = 0
    for i, j, k in combinations(range(1, J.dimension + 1), 3):
        count += 1
        res = jacobi_residual(J, i, j, k, table)
        if not res.is_zero():
            return VerificationReport(name, False, (i, j, k), res, count,
                                      extra_vars=_extra_names(J))
    return VerificationReport(name, True, examined=count)


def _extra_names(t: AntisymTensor) -> tuple:
    extra = t.nvars - t.dimension
    return ("t",) if extra == 1 else tuple(f"t{i + 1}" for i in range(extra))


# -- fundamental identity --------------------------------------------------------


def fi_residual(tensor: AntisymTensor, A, B, Cs: Sequence, D, Es: Sequence) -> Polynomial:
    """LHS - RHS of the fundamental identity for one observable selection."""
    r = tensor.rank
    if len(Cs) != r - 2 or len(Es) != r - 2:
        raise ShapeError(f"rank {r} needs {r - 2} C's and {r - 2} E's")
    gen = [D, *Es]

    def flow(X):
        return nambu_bracket(tensor, [X, *gen])

    slots = [A, B, *Cs]
    lhs = flow(nambu_bracket(tensor, slots))
    rhs = Polynomial.zero(tensor.nvars)
    for s in range(len(slots)):
        args = list(slots)
        args[s] = flow(slots[s])
        rhs = rhs + nambu_bracket(tensor, args)
    return lhs - rhs


def check_fundamental_identity(tensor: AntisymTensor, observables: Mapping[str, Polynomial],
                               tuples: Sequence[Sequence[str]] | None = None) -> VerificationReport:
    """Fundamental identity over observable selections.

    With ``tuples=None`` every selection ``(A, B, C..., D, E...)`` is tried
    where ``A, B, C...`` is an increasing ``r``-subset of ``observables`` and
    ``D, E...`` an increasing ``(r-1)``-subset; the residual is alternating
    in both groups, so this covers all ordered selections. Otherwise each
    entry of ``tuples`` names ``2r - 1`` observables in slot order.
    """
    r = tensor.rank
    names = list(observables)
    for nm in names:
        if observables[nm].nvars != tensor.nvars:
            raise DimensionError(f"observable {nm} lives in the wrong ring")
    if tuples is not None:
        count = 0
        for tup in tuples:
            tup = tuple(tup)
            if len(tup) != 2 * r - 1:
                raise ShapeError(f"each tuple needs {2 * r - 1} observables, got {len(tup)}")
            polys = [observables[t] for t in tup]
            count += 1
            res = fi_residual(tensor, polys[0], polys[1], polys[2:r], polys[r], polys[r + 1:])
            if not res.is_zero():
                return VerificationReport("fundamental_identity", False, tup, res, count)
        return VerificationReport("fundamental_identity", True, examined=count)

    if len(names) < r:
        raise ShapeError(f"exhaustive mode needs at least {r} observables")
    n = tensor.dimension
    grad = {nm: [observables[nm].partial(l) for l in range(n)] for nm in names}
    unit = [[Polynomial.constant(tensor.nvars, 1 if a == b else 0) for b in range(n)]
            for a in range(n)]

    vector_fields: dict = {}

    def field_of(gens):
        if gens not in vector_fields:
            gg = [grad[g] for g in gens]
            vector_fields[gens] = [bracket_from_gradients(tensor, [unit[i], *gg]) for i in range(n)]
        return vector_fields[gens]

    # {X, D, E...} for every observable X and generator group, with gradient
    flows: dict = {}

    def flow_of(nm, gens):
        key = (nm, gens)
        if key not in flows:
            field = field_of(gens)
            val = Polynomial.zero(tensor.nvars)
            for l, f in enumerate(field):
                d = grad[nm][l]
                if not d.is_zero() and not f.is_zero():
                    val = val + d * f
            flows[key] = (val, [val.partial(l) for l in range(n)])
        return flows[key]

    count = 0
    for slots in combinations(names, r):
        outer = bracket_from_gradients(tensor, [grad[s] for s in slots])
        outer_grad = [outer.partial(l) for l in range(n)]
        for gens in combinations(names, r - 1):
            count += 1
            field = field_of(gens)
            lhs = Polynomial.zero(tensor.nvars)
            for l in range(n):
                if not outer_grad[l].is_zero() and not field[l].is_zero():
                    lhs = lhs + outer_grad[l] * field[l]
            rhs = Polynomial.zero(tensor.nvars)
            for s in range(r):
                gl = [grad[x] for x in slots]
                gl[s] = flow_of(slots[s], gens)[1]
                rhs = rhs + bracket_from_gradients(tensor, gl)
            res = lhs - rhs
            if not res.is_zero():
                return VerificationReport("fundamental_identity", False, slots + gens, res, count)
    return VerificationReport("fundamental_identity", True, examined=count)


# -- Casimirs, rank, compatibility -----------------------------------------------------


def casimir_residuals(J: AntisymTensor, C: Polynomial) -> list:
    """Components of ``J grad C``."""
    _require_rank(J, 2, "casimir check")
    if C.nvars != J.nvars:
        raise DimensionError("Casimir candidate lives in the wrong ring")
    grad = [C.partial(l) for l in range(J.dimension)]
    out = []
    for i in range(1, J.dimension + 1):
        acc = Polynomial.zero(J.nvars)
        for j in range(1, J.dimension + 1):
            if not grad[j - 1].is_zero():
                acc = acc + J.get(i, j) * grad[j - 1]
        out.append(acc)
    return out


def check_casimir(J: AntisymTensor, C: Polynomial) -> VerificationReport:
    res = casimir_residuals(J, C)
    for i, r in enumerate(res, start=1):
        if not r.is_zero():
            return VerificationReport("casimir", False, (i,), r, i)
    return VerificationReport("casimir", True, examined=len(res))


def exact_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination."""
    from .polyalgebra import lcm_denominator

    mat = []
    for row in rows:
        scale = lcm_denominator(row)
        mat.append([int(Fraction(x) * scale) for x in row])
    if not mat:
        return 0
    nrows, ncols = len(mat), len(mat[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((r for r in range(rank, nrows) if mat[r][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pv = mat[rank][col]
        for r in range(rank + 1, nrows):
            for c in range(col + 1, ncols):
                mat[r][c] = (mat[r][c] * pv - mat[r][col] * mat[rank][c]) // prev
            mat[r][col] = 0
        prev = pv
        rank += 1
    return rank


SAMPLE_RANGE = (-9, 9)


def generic_rank(J: AntisymTensor, samples: int = 8, seed: int = 0) -> AdmissibilityReport:
    """Generic rank of ``J`` from exact ranks at random integer points."""
    _require_rank(J, 2, "generic_rank")
    if J.nvars != J.dimension:
        raise DimensionError("generic_rank needs a matrix over its own coordinates")
    N = J.dimension
    rng = random.Random(seed)
    lo, hi = SAMPLE_RANGE
    dense = [[J.get(i, j) for j in range(1, N + 1)] for i in range(1, N + 1)]
    ranks = []
    for _ in range(samples):
        for _attempt in range(100):
            point = [rng.randint(lo, hi) for _ in range(N)]
            values = [[e.eval_rat(point) for e in row] for row in dense]
            if J.is_zero() or any(v for row in values for v in row):
                break
        ranks.append(exact_rank(values))
    rank = max(ranks, default=0)
    if rank % 2:
        raise RankParityError(f"odd rank {rank} for an antisymmetric matrix")
    K = N - rank
    return AdmissibilityReport(N, rank, K, K == N - 2, samples, seed, ranks)


def pencil(J1: AntisymTensor, J2: AntisymTensor) -> AntisymTensor:
    """``J1 + t J2`` with ``t`` an extra ring variable that is never differentiated."""
    _require_rank(J1, 2, "pencil")
    _require_rank(J2, 2, "pencil")
    if J1.dimension != J2.dimension or J1.nvars != J2.nvars:
        raise DimensionError("pencil members differ in dimension")
    nv = J1.nvars + 1
    t = Polynomial.var(nv, nv - 1)
    entries = {}
    for idx in canonical_tuples(J1.dimension, 2):
        v = J1.get(idx).embed(nv) + t * J2.get(idx).embed(nv)
        if not v.is_zero():
            entries[idx] = v
    return AntisymTensor(J1.dimension, 2, entries, nvars=nv)


def check_compatibility(J1: AntisymTensor, J2: AntisymTensor) -> VerificationReport:
    return check_jacobi(pencil(J1, J2), name="compatibility")
