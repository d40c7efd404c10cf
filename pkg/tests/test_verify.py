import json
from fractions import Fraction
from itertools import combinations

import pytest
import sympy as sp

from nambu.brackets import coordinates
from nambu.parser import VariableTable, parse_expr
from nambu.polyalgebra import Polynomial, monomial_basis
from nambu.tensor import AntisymTensor, ShapeError, levi_civita, linear_combination
from nambu.verify import (RankParityError, check_casimir, check_compatibility,
                          check_cond_algebraic, check_cond_differential, check_fundamental_identity,
                          check_jacobi, cond_algebraic_residual, cond_algebraic_violations,
                          cond_differential_residual, exact_rank, fi_residual, generic_rank,
                          jacobi_residual, pencil)

from . import oracles

QPU = VariableTable(("q", "p", "u"))
QPUV = VariableTable(("q", "p", "u", "v"))


def P3(src):
    return parse_expr(src, QPU)


def P4(src):
    return parse_expr(src, QPUV)


def sym_dict(d, syms):
    return {k: oracles.to_sym(v, syms) for k, v in d.items()}


# -- algebraic condition -------------------------------------------------------------


def test_linear_tensor_passes():
    lam = AntisymTensor(3, 3, {(1, 2, 3): P3("q")})
    assert check_cond_algebraic(lam).passed
    assert check_cond_differential(lam).passed


def test_sum_of_two_eps_fails_with_witness():
    lam = linear_combination([(1, levi_civita(4, [1, 2, 3])), (P4("u"), levi_civita(4, [1, 3, 4]))])
    assert check_cond_algebraic(lam).passed
    rep = check_cond_differential(lam)
    assert not rep.passed
    assert rep.witness == (1, 2, 1, 3, 4)
    assert rep.residual == 1
    syms = oracles.symbols(4)
    viol = oracles.cond2_violations(oracles.dense(lam, syms), 4, syms)
    assert viol[(1, 2, 1, 3, 4)] == 1
    assert min(k for k in viol if k[0] < k[1] and k[2] < k[3] < k[4]) == rep.witness


def test_algebraic_violations_match_oracle_n4():
    lam = linear_combination([(1, levi_civita(4, [1, 2, 3])), (P4("p"), levi_civita(4, [2, 3, 4])),
                              (P4("q*v"), levi_civita(4, [1, 2, 4]))])
    syms = oracles.symbols(4)
    expected = oracles.cond1_violations(oracles.dense(lam, syms), 4)
    got = sym_dict(cond_algebraic_violations(lam), syms)
    assert got == expected
    rep = check_cond_algebraic(lam)
    assert rep.passed == (not expected)


def test_algebraic_witness_is_lex_min_in_pruned_domain(n6):
    lam = n6.tensors["LBLOCK"]
    rep = check_cond_algebraic(lam)
    viol = cond_algebraic_violations(lam)
    pruned = [k for k in viol if k[0] <= k[1] and k[2] < k[3] < k[4]]
    assert rep.witness == min(pruned) == (1, 4, 2, 3, 5, 6)
    assert cond_algebraic_residual(lam, *rep.witness) == rep.residual == 1


def test_differential_matches_oracle_on_fixtures(n4):
    syms = oracles.symbols(4)
    for name in ("L1", "L2", "L3"):
        lam = n4.tensors[name]
        assert oracles.cond2_violations(oracles.dense(lam, syms), 4, syms) == {}
        assert check_cond_differential(lam).passed


def test_differential_residual_matches_oracle():
    lam = AntisymTensor(4, 3, {(1, 2, 3): P4("q*u"), (2, 3, 4): P4("v^2"), (1, 3, 4): P4("p")})
    syms = oracles.symbols(4)
    viol = oracles.cond2_violations(oracles.dense(lam, syms), 4, syms)
    for j, k in combinations(range(1, 5), 2):
        for m, n, p in combinations(range(1, 5), 3):
            got = oracles.to_sym(cond_differential_residual(lam, j, k, m, n, p), syms)
            assert got == viol.get((j, k, m, n, p), 0)


def test_rank_checks():
    J = AntisymTensor(3, 2, {(1, 2): P3("1")})
    with pytest.raises(ShapeError):
        check_cond_algebraic(J)
    with pytest.raises(ShapeError):
        check_jacobi(levi_civita(3, [1, 2, 3]))


# -- Jacobi / Casimir ------------------------------------------------------------------------


def test_jacobi_examples(n3, n4, n6):
    for J in (n3.matrices["J"], n3.matrices["JBAR"], n4.matrices["J"], n4.matrices["J1"],
              n4.matrices["J2"], n6.matrices["J"], n6.matrices["J1"]):
        assert check_jacobi(J).passed
    bad = AntisymTensor(3, 2, {(1, 2): P3("u"), (2, 3): P3("1"), (1, 3): P3("q")})
    rep = check_jacobi(bad)
    syms = oracles.symbols(3)
    viol = oracles.jacobi_violations(oracles.dense(bad, syms), 3, syms)
    assert not rep.passed
    assert oracles.to_sym(rep.residual, syms) == viol[rep.witness]
    assert oracles.to_sym(jacobi_residual(bad, 1, 2, 3), syms) == viol[(1, 2, 3)]


def test_casimir_examples(n3, n4):
    assert check_casimir(n3.matrices["J"], n3.observables["C"]).passed
    assert check_casimir(n4.matrices["J"], n4.observables["C1"]).passed
    assert check_casimir(n4.matrices["J"], n4.observables["C2"]).passed
    rep = check_casimir(n3.matrices["J"], n3.observables["H"])
    assert not rep.passed and rep.witness == (1,)


# -- fundamental identity ------------------------------------------------------------------


def test_fi_residual_matches_oracle(n4):
    lam = AntisymTensor(4, 3, {(1, 2, 3): P4("u"), (1, 3, 4): P4("q")})
    A, B, C, D, E = P4("q*p"), P4("u"), P4("v + q^2"), P4("p"), P4("u*v")
    syms = oracles.symbols(4)
    want = oracles.fi_residual(oracles.dense(lam, syms), 4, 3,
                               *[oracles.to_sym(x, syms) for x in (A, B)],
                               [oracles.to_sym(C, syms)], oracles.to_sym(D, syms),
                               [oracles.to_sym(E, syms)], syms)
    assert oracles.to_sym(fi_residual(lam, A, B, [C], D, [E]), syms) == want


def test_rank2_fi_is_jacobi(n3):
    bad = AntisymTensor(3, 2, {(1, 2): P3("u"), (2, 3): P3("1"), (1, 3): P3("q")})
    z = coordinates(bad)
    # at rank 2 the identity is Jacobi up to sign
    assert fi_residual(bad, z[0], z[1], [], z[2], []) == -jacobi_residual(bad, 1, 2, 3)
    obs = {"q": z[0], "p": z[1], "u": z[2]}
    assert not check_fundamental_identity(bad, obs).passed
    assert check_fundamental_identity(n3.matrices["J"], obs).passed


def test_fi_exhaustive_matches_explicit(n4):
    lam = AntisymTensor(4, 3, {(1, 2, 3): P4("u"), (1, 3, 4): P4("q")})
    obs = {n: P4(n) for n in ("q", "p", "u", "v")}
    rep = check_fundamental_identity(lam, obs)
    expect = None
    for slots in combinations(obs, 3):
        for gens in combinations(obs, 2):
            res = fi_residual(lam, *[obs[s] for s in slots[:2]], [obs[slots[2]]],
                              obs[gens[0]], [obs[gens[1]]])
            if expect is None and not res.is_zero():
                expect = (slots + gens, res)
    assert expect is not None and not rep.passed
    assert (rep.witness, rep.residual) == expect


def test_conditions_imply_fi_on_coordinates():
    # a tensor passing both conditions satisfies FI; one failing them does not
    good = AntisymTensor(4, 3, {(1, 2, 3): P4("q")})
    bad = linear_combination([(1, levi_civita(4, [1, 2, 3])), (P4("u"), levi_civita(4, [1, 3, 4]))])
    obs = {n: P4(n) for n in ("q", "p", "u", "v")}
    assert check_fundamental_identity(good, obs).passed
    assert not check_fundamental_identity(bad, obs).passed


def test_fi_tuple_mode_errors(n4):
    obs = {"q": P4("q")}
    with pytest.raises(ShapeError):
        check_fundamental_identity(n4.tensors["L1"], obs, tuples=[("q", "q")])


def test_fi_degree_basis_count():
    assert len(monomial_basis(4, 2)) == 14


# -- rank / admissibility ------------------------------------------------------------------


def test_exact_rank_matches_sympy():
    import random
    rng = random.Random(3)
    for _ in range(50):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        rows = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(c)] for _ in range(r)]
        if rng.random() < 0.4:
            rows.append([a + b for a, b in zip(rows[0], rows[-1])])
        assert exact_rank(rows) == sp.Matrix(rows).rank()


def test_generic_rank_examples(n3, n4, n6):
    rep = generic_rank(n3.matrices["J"])
    assert (rep.rank, rep.casimir_count, rep.admissible) == (2, 1, True)
    rep = generic_rank(n4.matrices["J"])
    assert (rep.rank, rep.casimir_count, rep.admissible) == (2, 2, True)
    rep = generic_rank(n6.matrices["J"])
    assert (rep.rank, rep.casimir_count, rep.admissible) == (4, 2, False)
    assert "admissible: no" in rep.render()


def test_generic_rank_monotone_in_samples(n6):
    J = n6.matrices["J1"]
    ranks = [generic_rank(J, samples=s, seed=11).rank for s in range(1, 9)]
    assert ranks == sorted(ranks)


def test_generic_rank_zero_and_report_determinism(n3):
    Z = AntisymTensor(3, 2)
    rep = generic_rank(Z)
    assert rep.rank == 0 and rep.casimir_count == 3 and not rep.admissible
    a = json.dumps(generic_rank(n3.matrices["J"], seed=5).to_dict(), sort_keys=True)
    b = json.dumps(generic_rank(n3.matrices["J"], seed=5).to_dict(), sort_keys=True)
    assert a == b


def test_rank_parity_error_exists():
    assert issubclass(RankParityError, ArithmeticError)


# -- compatibility ------------------------------------------------------------------------------


def test_compatibility_examples(n3, n6):
    assert check_compatibility(n6.matrices["J"], n6.matrices["J1"]).passed
    assert check_compatibility(n3.matrices["J"], n3.matrices["JBAR"]).passed
    assert check_compatibility(n3.matrices["J0"], n3.matrices["J"]).passed


def test_incompatible_pair():
    # both Poisson, but the pencil violates Jacobi
    J1 = AntisymTensor(3, 2, {(1, 2): P3("1")})
    J2 = AntisymTensor(3, 2, {(2, 3): P3("p")})
    assert check_jacobi(J1).passed and check_jacobi(J2).passed
    rep = check_compatibility(J1, J2)
    syms = sp.symbols("z1:4 t")
    P = pencil(J1, J2)
    dense = oracles.dense(P, syms)
    viol = oracles.jacobi_violations(dense, 3, syms)
    assert viol and not rep.passed
    assert oracles.to_sym(rep.residual, syms) == viol[rep.witness]
    assert "t" in rep.render(["q", "p", "u"])
