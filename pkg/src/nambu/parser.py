"""Parsing of polynomial expressions and ``.sys`` structure files.

Expression grammar (whitespace between tokens is ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' INT)?
    base   := IDENT | INT | '(' expr ')'

Division is only allowed by a nonzero constant. Parameters are replaced by
their bound rational values while parsing, so results are always plain
polynomials in the phase-space variables.

System files are line oriented::

    vars: q p u
    param m = 1
    param alpha = 1/2
    tensor EPS rank 3
      1 2 3 : 1
    matrix J
      1 2 : 1
      2 3 : -2*q
    obs H = p^2/(2*m) + alpha*u
    map PHI forward = q, p, u - q^2 inverse = x1, x2, x3 + x1^2
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .polyalgebra import Polynomial
from .tensor import AntisymTensor, permutation_sign

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_TOKEN_RE = re.compile(r"\s*(?:(\d+\.\d*|\.\d+)|(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


class ParseError(ValueError):
    """Malformed input; carries a 1-based line/column position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class VariableTable:
    names: tuple
    params: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "params", {k: Fraction(v) for k, v in self.params.items()})
        if not self.names:
            raise ValueError("variable list is empty")
        for n in list(self.names) + list(self.params):
            if not IDENT_RE.match(n):
                raise ValueError(f"invalid identifier {n!r}")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        clash = set(self.names) & set(self.params)
        if clash:
            raise ValueError(f"names used both as variable and parameter: {sorted(clash)}")

    @property
    def dimension(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


# -- expressions -------------------------------------------------------------


def _tokenize(src: str, line: int, col0: int):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m.end() == pos or m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        col = col0 + start
        if m.group(1) is not None:
            raise ParseError(f"decimal literal {m.group(1)!r} not allowed; use a/b", line, col)
        if m.group(2) is not None:
            tokens.append(("int", int(m.group(2)), col))
        elif m.group(3) is not None:
            tokens.append(("ident", m.group(3), col))
        else:
            ch = m.group(4)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", line, col)
            tokens.append((ch, ch, col))
        pos = m.end()
    tokens.append(("end", None, col0 + len(src)))
    return tokens


class _ExprParser:
    def __init__(self, src: str, vars: VariableTable, line: int, col0: int):
        self.vars = vars
        self.line = line
        self.tokens = _tokenize(src, line, col0)
        self.i = 0
        self.n = vars.dimension

    def error(self, msg, tok=None):
        tok = tok or self.tokens[self.i]
        return ParseError(msg, self.line, tok[2])

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            p = p + rhs if op == "+" else p - rhs
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()
            rhs_tok = self.peek()
            rhs = self.unary()
            if op[0] == "*":
                p = p * rhs
            else:
                if not rhs.is_constant():
                    raise self.error("division by a non-constant expression", rhs_tok)
                c = rhs.constant_value()
                if c == 0:
                    raise self.error("division by zero", rhs_tok)
                p = p * (1 / c)
        return p

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        return self.factor()

    def factor(self):
        b = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] == "-":
                raise self.error("negative exponent", tok)
            if tok[0] != "int":
                raise self.error("exponent must be a non-negative integer", tok)
            self.take()
            b = b ** tok[1]
        return b

    def base(self):
        tok = self.take()
        kind = tok[0]
        if kind == "int":
            return Polynomial.constant(self.n, tok[1])
        if kind == "ident":
            name = tok[1]
            if name in self.vars.params:
                return Polynomial.constant(self.n, self.vars.params[name])
            if name in self.vars.names:
                return Polynomial.var(self.n, self.vars.names.index(name))
            raise ParseError(f"unknown identifier {name!r}", self.line, tok[2])
        if kind == "(":
            p = self.expr()
            if self.peek()[0] != ")":
                raise self.error("expected ')'")
            self.take()
            return p
        if kind == "end":
            raise ParseError("unexpected end of expression", self.line, tok[2])
        raise ParseError(f"unexpected token {tok[1]!r}", self.line, tok[2])


def parse_expr(src: str, vars: VariableTable, *, line: int = 1, column: int = 1) -> Polynomial:
    """Parse ``src`` into a polynomial over ``vars.names``."""
    return _ExprParser(src, vars, line, column).parse()


# -- system files ------------------------------------------------------------


@dataclass
class SystemSpec:
    variables: VariableTable
    tensors: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    observables: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.variables.dimension


_HEADER_RE = re.compile(r"(vars|param|tensor|matrix|obs|map)\b")
_ENTRY_RE = re.compile(r"\s*([0-9\s]+?)\s*:(.*)\Z")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_system(text: str, overrides: Mapping[str, Fraction] | None = None) -> SystemSpec:
    """Parse and validate a system file.

    ``overrides`` rebinds declared parameters (e.g. ``{"mu": 0}``).
    """
    from .transform import InvalidMapError, validate_map

    overrides = {k: Fraction(v) for k, v in (overrides or {}).items()}
    names = None
    params: dict = {}
    vt = None
    spec = None
    section = None  # (kind, name, rank, entries dict, header line)

    def table():
        nonlocal vt
        if vt is None:
            if names is None:
                raise ParseError("'vars:' must come before any definition", lineno, 1)
            unknown = sorted(set(overrides) - set(params))
            if unknown:
                raise ParseError(f"override for undeclared parameter(s) {unknown}", lineno, 1)
            bound = {**params, **overrides}
            try:
                vt = VariableTable(names, bound)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, 1) from None
        return vt

    def close_section():
        nonlocal section
        if section is None:
            return
        kind, name, rank, entries, hline = section
        t = AntisymTensor(table().dimension, rank, entries)
        (spec.tensors if kind == "tensor" else spec.matrices)[name] = t
        section = None

    def check_name(bucket, name, col):
        if not IDENT_RE.match(name):
            raise ParseError(f"invalid name {name!r}", lineno, col)
        if name in bucket:
            raise ParseError(f"duplicate name {name!r}", lineno, col)

    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        header = _HEADER_RE.match(body)
        if header is None:
            if section is None:
                raise ParseError(f"unrecognised line {body!r}", lineno, indent + 1)
            m = _ENTRY_RE.match(line)
            if m is None:
                raise ParseError("expected 'i j ... : expr'", lineno, indent + 1)
            kind, name, rank, entries, _ = section
            idx = tuple(int(x) for x in m.group(1).split())
            if len(idx) != rank:
                raise ParseError(f"{kind} {name} expects {rank} indices, got {len(idx)}",
                                 lineno, indent + 1)
            n = table().dimension
            if any(not 1 <= i <= n for i in idx):
                raise ParseError(f"index out of range 1..{n}", lineno, indent + 1)
            value = parse_expr(m.group(2), table(), line=lineno, column=m.start(2) + 1)
            sign = permutation_sign(idx)
            if sign == 0:
                if not value.is_zero():
                    raise ParseError(f"repeated index {idx} with nonzero value", lineno, indent + 1)
                continue
            canon = tuple(sorted(idx))
            value = value * sign
            if canon in entries and entries[canon] != value:
                raise ParseError(f"antisymmetry contradiction for indices {canon}",
                                 lineno, indent + 1)
            entries[canon] = value
            continue

        close_section()
        kind = header.group(1)
        rest = body[header.end():]
        col = indent + header.end() + 1
        if kind == "vars":
            if names is not None:
                raise ParseError("duplicate 'vars:' line", lineno, indent + 1)
            if not rest.lstrip().startswith(":"):
                raise ParseError("expected 'vars: name ...'", lineno, col)
            names = rest.lstrip()[1:].split()
            if not names:
                raise ParseError("empty variable list", lineno, col)
            continue
        if kind == "param":
            if vt is not None:
                raise ParseError("parameters must be declared before definitions", lineno, col)
            m = re.match(r"\s*([A-Za-z][A-Za-z0-9_]*)\s*=(.*)\Z", rest)
            if m is None:
                raise ParseError("expected 'param name = value'", lineno, col)
            pname = m.group(1)
            if pname in params:
                raise ParseError(f"duplicate parameter {pname!r}", lineno, col)
            # scratch variable so that any variable reference in a value is rejected
            scratch = next(f"scratch{i}" for i in range(len(params) + 1)
                           if f"scratch{i}" not in params)
            const_vt = VariableTable((scratch,), params)
            val = parse_expr(m.group(2), const_vt, line=lineno, column=col + m.start(2))
            if not val.is_constant():
                raise ParseError("parameter value must be constant", lineno, col)
            params[pname] = val.constant_value()
            continue

        if spec is None:
            spec = SystemSpec(table())
        if kind in ("tensor", "matrix"):
            parts = rest.split()
            if kind == "tensor":
                if len(parts) != 3 or parts[1] != "rank" or not parts[2].isdigit():
                    raise ParseError("expected 'tensor NAME rank R'", lineno, col)
                rank = int(parts[2])
                if not 2 <= rank <= table().dimension:
                    raise ParseError(f"rank {rank} outside 2..{table().dimension}", lineno, col)
            else:
                if len(parts) != 1:
                    raise ParseError("expected 'matrix NAME'", lineno, col)
                rank = 2
            check_name({**spec.tensors, **spec.matrices}, parts[0], col)
            section = (kind, parts[0], rank, {}, lineno)
        elif kind == "obs":
            m = re.match(r"\s*(\S+)\s*=(.*)\Z", rest)
            if m is None:
                raise ParseError("expected 'obs NAME = expr'", lineno, col)
            check_name(spec.observables, m.group(1), col)
            spec.observables[m.group(1)] = parse_expr(
                m.group(2), table(), line=lineno, column=col + m.start(2))
        elif kind == "map":
            m = re.match(r"\s*(\S+)\s+forward\s*=(.*?)\binverse\s*=(.*)\Z", rest)
            if m is None:
                raise ParseError("expected 'map NAME forward = ... inverse = ...'", lineno, col)
            check_name(spec.maps, m.group(1), col)
            n = table().dimension
            target = VariableTable(tuple(f"x{i + 1}" for i in range(n)),
                                   {k: v for k, v in table().params.items()
                                    if k not in {f"x{i + 1}" for i in range(n)}})
            fwd = _parse_list(m.group(2), table(), lineno, col + m.start(2))
            inv = _parse_list(m.group(3), target, lineno, col + m.start(3))
            if len(fwd) != n or len(inv) != n:
                raise ParseError(f"map {m.group(1)} needs {n} components each way", lineno, col)
            try:
                spec.maps[m.group(1)] = validate_map(fwd, inv)
            except InvalidMapError as exc:
                raise ParseError(f"invalid inverse for map {m.group(1)}: {exc}", lineno, col) from None

    close_section()
    if names is None:
        raise ParseError("missing 'vars:' line", max(lineno, 1), 1)
    if spec is None:
        spec = SystemSpec(table())
    return spec


def _parse_list(src: str, vt: VariableTable, line: int, col: int) -> list:
    out = []
    offset = 0
    for piece in src.split(","):
        out.append(parse_expr(piece, vt, line=line, column=col + offset))
        offset += len(piece) + 1
    return out


def load_system(path, overrides=None) -> SystemSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read(), overrides)


# -- rendering back to file syntax --------------------------------------------


def render_tensor(name: str, t: AntisymTensor, names: Sequence[str]) -> str:
    head = f"matrix {name}" if t.rank == 2 else f"tensor {name} rank {t.rank}"
    lines = [head]
    for idx, val in sorted(t.entries.items()):
        lines.append("  " + " ".join(map(str, idx)) + " : " + val.render(names))
    return "\n".join(lines)


def render_system(spec: SystemSpec) -> str:
    vt = spec.variables
    lines = ["vars: " + " ".join(vt.names)]
    for k, v in vt.params.items():
        lines.append(f"param {k} = {v}")
    for name, t in spec.tensors.items():
        lines.append(render_tensor(name, t, vt.names))
    for name, t in spec.matrices.items():
        lines.append(render_tensor(name, t, vt.names))
    for name, p in spec.observables.items():
        lines.append(f"obs {name} = {p.render(vt.names)}")
    xs = [f"x{i + 1}" for i in range(vt.dimension)]
    for name, cm in spec.maps.items():
        fwd = ", ".join(p.render(vt.names) for p in cm.forward)
        inv = ", ".join(p.render(xs) for p in cm.inverse)
        lines.append(f"map {name} forward = {fwd} inverse = {inv}")
    return "\n".join(lines) + "\n"
