"""Exact sparse multivariate polynomials over the rationals.

A :class:`Polynomial` lives in a fixed ambient dimension ``nvars`` and maps
exponent tuples to nonzero :class:`fractions.Fraction` coefficients.
Instances are immutable; every operation returns a new canonical object.

Variable positions are 0-based (``var(3, 0)`` is the first coordinate).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction
Monomial = tuple  # tuple[int, ...] of non-negative exponents, length nvars

Scalar = Union[int, Fraction]


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


def _grlex_key(exps: tuple) -> tuple:
    return (sum(exps), exps)


class Polynomial:
    __slots__ = ("_nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, Scalar] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        clean = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != nvars:
                    raise DimensionError(
                        f"monomial {exps} has length {len(exps)}, expected {nvars}"
                    )
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = Fraction(c)
                if c:
                    clean[exps] = clean.get(exps, 0) + c
                    if not clean[exps]:
                        del clean[exps]
        self._nvars = nvars
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Polynomial":
        # terms already canonical: no zero coefficients, right lengths
        p = object.__new__(cls)
        p._nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: Scalar) -> "Polynomial":
        value = Fraction(value)
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def var(cls, nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for nvars={nvars}")
        exps = [0] * nvars
        exps[index] = 1
        return cls._raw(nvars, {tuple(exps): Fraction(1)})

    # -- basic accessors --------------------------------------------------

    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def terms(self) -> dict:
        """Copy of the term map ``{exponents: coefficient}``."""
        return dict(self._terms)

    def items(self):
        """Terms in canonical (descending graded-lex) order."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and (0,) * self._nvars in self._terms)

    def constant_value(self) -> Fraction:
        """Value of a constant polynomial; raises if it is not constant."""
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self._nvars, Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other._nvars != self._nvars:
                raise DimensionError(f"dimension mismatch: {self._nvars} vs {other._nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self._nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        out = dict(big)
        for e, c in small.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s += c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial._raw(self._nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self._nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial.zero(self._nvars)
            return Polynomial._raw(self._nvars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return Polynomial._raw(self._nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self._nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._nvars == other._nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.constant(self._nvars, other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution ---------------------------------------

    def partial(self, index: int) -> "Polynomial":
        if not 0 <= index < self._nvars:
            raise IndexError(f"variable index {index} out of range for nvars={self._nvars}")
        out = {}
        for e, c in self._terms.items():
            k = e[index]
            if k:
                out[e[:index] + (k - 1,) + e[index + 1:]] = c * k
        return Polynomial._raw(self._nvars, out)

    def gradient(self) -> list:
        return [self.partial(i) for i in range(self._nvars)]

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``subs[i]`` for variable ``i`` and expand."""
        if len(subs) != self._nvars:
            raise DimensionError(f"need {self._nvars} substitutions, got {len(subs)}")
        if not subs:
            return Polynomial._raw(0, dict(self._terms))
        target = subs[0].nvars
        for s in subs:
            if s.nvars != target:
                raise DimensionError("substitutions must share one dimension")
        # power cache per variable
        powers: list = [[Polynomial.constant(target, 1)] for _ in subs]

        def pw(i, k):
            cache = powers[i]
            while len(cache) <= k:
                cache.append(cache[-1] * subs[i])
            return cache[k]

        result = Polynomial.zero(target)
        for e, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            result = result + term
        return result

    def embed(self, nvars: int) -> "Polynomial":
        """Same polynomial viewed in a larger ring (extra trailing variables)."""
        if nvars < self._nvars:
            raise DimensionError("cannot embed into a smaller ring")
        pad = (0,) * (nvars - self._nvars)
        return Polynomial._raw(nvars, {e + pad: c for e, c in self._terms.items()})

    def eval_rat(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self._nvars:
            raise DimensionError(f"point has length {len(point)}, expected {self._nvars}")
        pt = [Fraction(x) for x in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x ** k
            total += v
        return total

    def eval_float(self, point: Sequence[float]) -> float:
        if len(point) != self._nvars:
            raise DimensionError(f"point has length {len(point)}, expected {self._nvars}")
        total = 0.0
        for e, c in self._terms.items():
            v = float(c)
            for x, k in zip(point, e):
                if k:
                    v *= float(x) ** k
            total += v
        return total

    # -- text -------------------------------------------------------------

    def render(self, names: Sequence[str] | None = None) -> str:
        """Canonical text form: descending graded-lex terms, ``*`` and ``^``.

        The output re-parses to the same polynomial.
        """
        if names is None:
            names = [f"z{i + 1}" for i in range(self._nvars)]
        if len(names) != self._nvars:
            raise DimensionError("wrong number of variable names")
        if not self._terms:
            return "0"
        pieces = []
        for idx, (e, c) in enumerate(self.items()):
            factors = [
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            ]
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            if idx == 0:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial({self._nvars}, {self.render()!r})"

    __str__ = render


# Functional forms mirroring the method API.

def add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def partial(a: Polynomial, index: int) -> Polynomial:
    return a.partial(index)


def compose(a: Polynomial, subs: Sequence[Polynomial]) -> Polynomial:
    return a.compose(subs)


def eval_rat(a: Polynomial, point: Sequence[Scalar]) -> Fraction:
    return a.eval_rat(point)


def eval_float(a: Polynomial, point: Sequence[float]) -> float:
    return a.eval_float(point)


def is_zero(a: Polynomial) -> bool:
    return a.is_zero()


def variables(nvars: int) -> list:
    """All coordinate polynomials ``[z1, ..., zN]``."""
    return [Polynomial.var(nvars, i) for i in range(nvars)]


def monomial_basis(nvars: int, max_degree: int, min_degree: int = 1) -> list:
    """Monic monomials with ``min_degree <= degree <= max_degree``, grlex ascending."""
    out = []
    for d in range(min_degree, max_degree + 1):
        exps = []
        _compositions(nvars, d, [], exps)
        for e in sorted(exps):
            out.append(Polynomial._raw(nvars, {e: Fraction(1)}))
    return out


def _compositions(n: int, d: int, prefix: list, out: list) -> None:
    if len(prefix) == n - 1:
        out.append(tuple(prefix + [d]))
        return
    if n == 0:
        if d == 0:
            out.append(())
        return
    for k in range(d + 1):
        _compositions(n, d - k, prefix + [k], out)


def lcm_denominator(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out
