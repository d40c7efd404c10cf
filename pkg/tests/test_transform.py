import pytest

from nambu.brackets import nambu_bracket
from nambu.parser import VariableTable, parse_expr
from nambu.polyalgebra import Polynomial
from nambu.tensor import levi_civita
from nambu.transform import (CoordinateMap, InvalidMapError, identity_map, pullback_canonical,
                             transform_poisson, transform_tensor, validate_map)
from nambu.verify import check_cond_algebraic, check_cond_differential


def exprs(spec, *srcs):
    return [parse_expr(s, spec.variables) for s in srcs]


def test_validate_examples(n3):
    cmap = n3.maps["PHI"]
    assert isinstance(cmap, CoordinateMap)
    ident = identity_map(3)
    assert validate_map(ident.forward, ident.inverse) == ident
    fwd = exprs(n3, "q^2", "p", "u")
    with pytest.raises(InvalidMapError) as exc:
        validate_map(fwd, exprs(n3, "q", "p", "u"))
    assert exc.value.component == 1 and not exc.value.residual.is_zero()


def test_transform_tensor_examples(n3, n4):
    assert transform_tensor(n4.tensors["L1"], n4.maps["PHI2"]) == levi_civita(4, [1, 2, 3])
    assert transform_tensor(n4.tensors["L2"], n4.maps["PHI3"]) == levi_civita(4, [1, 2, 3])
    assert transform_tensor(n4.tensors["L3"], n4.maps["PHI4"]) == levi_civita(4, [1, 2, 3])
    for t in list(n4.tensors.values()):
        assert transform_tensor(t, identity_map(4)) == t
    assert transform_tensor(n3.tensors["EPS"], n3.maps["PHI"]) == n3.tensors["EPS"]


def test_transform_poisson_examples(n3, n4, n6):
    assert transform_poisson(n3.matrices["J"], n3.maps["PHI"]) == n3.matrices["J0"]
    assert transform_poisson(n4.matrices["J"], n4.maps["PHI"]) == n4.matrices["J0"]
    assert transform_poisson(n6.matrices["J1"], n6.maps["PHI"]) == n6.matrices["JT1"]


def test_n6_darboux_form(n6):
    J0 = transform_poisson(n6.matrices["J"], n6.maps["PHI0"])
    assert J0.entries == {(1, 3): Polynomial.constant(6, 1), (2, 4): Polynomial.constant(6, 1)}


def test_jbar_darboux(n3):
    # JBAR reduces to the canonical matrix in x = (q/alpha, p, H)
    v = n3.variables
    fwd = [parse_expr("q/alpha", v), parse_expr("p", v), n3.observables["H"]]
    xs = VariableTable(("x1", "x2", "x3"), v.params)
    inv = [parse_expr(s, xs) for s in ("alpha*x1", "x2", "(x3 - x2^2/(2*m))/alpha")]
    cmap = validate_map(fwd, inv)
    assert transform_poisson(n3.matrices["JBAR"], cmap) == n3.matrices["J0"]


def test_pullback_examples(n3, n4):
    assert pullback_canonical(n3.maps["PHI"], 3) == n3.tensors["EPS"]
    assert pullback_canonical(n4.maps["PHI"], 4) == n4.tensors["EPS4"]
    assert pullback_canonical(identity_map(5), 3) == levi_civita(5, [1, 2, 3])
    with pytest.raises(ValueError):
        pullback_canonical(identity_map(3), 2)


def test_pullback_reproduces_noncanonical_tensors(n4):
    # eps on (1,2,3) pulled back along (q, p, u, C2) is L1
    assert transform_tensor(levi_civita(4, [1, 2, 3]), n4.maps["PHI2"].inverted()) == n4.tensors["L1"]


def test_functoriality(n4):
    m1, m2 = n4.maps["PHI2"], n4.maps["PHI4"]
    for t in (n4.tensors["L1"], n4.tensors["L2"], n4.matrices["J"]):
        assert transform_tensor(transform_tensor(t, m1), m2) == transform_tensor(t, m1.then(m2))


def test_structure_preservation(n4):
    cmap = n4.maps["PHI4"]
    for name in ("L1", "L2", "L3"):
        t = transform_tensor(n4.tensors[name], cmap)
        assert check_cond_algebraic(t).passed and check_cond_differential(t).passed


def test_scalar_invariance(n4):
    lam, cmap = n4.tensors["L1"], n4.maps["PHI"]
    lt = transform_tensor(lam, cmap)
    args = exprs(n4, "q*v + u", "p^2 - q*u", "v*u")
    tilde = [a.compose(cmap.inverse) for a in args]
    assert nambu_bracket(lt, tilde) == nambu_bracket(lam, args).compose(cmap.inverse)
