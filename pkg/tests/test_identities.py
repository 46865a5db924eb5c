import itertools

import pytest
from hypothesis import given, settings, strategies as st

from xcartier.identities import (
    commuting_nilpotent_family,
    f_poly,
    symmetrized_f,
    taylor_cocycle_identity,
    verify_symmetrized_vanishing,
    wilson_unit_check,
)
from xcartier.ring import LaurentPoly, PolyMatrix, PrimeContext, RingError, VarSpec


def tvars(k):
    return VarSpec.make([f"T{i}" for i in range(1, k + 1)])


# ---------------------------------------------------------------- f and F


def test_f_p3_k2_by_hand():
    # tuples (0,0), (1,0), (0,1): 1 + (1+T2+T1) + (1+T2) = 3 + T1 + 2 T2
    assert f_poly(3, 2) == LaurentPoly.parse("T1 + 2*T2", tvars(2), 3)


def test_f_p3_k1_by_hand():
    # 1 + (1+T1) + (1+T1)^2 = 3 + 3 T1 + T1^2
    assert f_poly(3, 1) == LaurentPoly.parse("T1^2", tvars(1), 3)


def test_f_top_k_only_low_tuples():
    # k = p-1 leaves budget 1: k+1 tuples, each factor degree <= 1
    f = f_poly(5, 4)
    assert max(sum(e) for e in f.terms) <= 1 or f.is_zero()


def test_symmetrized_p3_k2_vanishes_by_hand():
    # (T1 + 2T2) + (T2 + 2T1) = 3(T1 + T2) = 0
    assert symmetrized_f(3, 2).is_zero()


def test_symmetrized_k1_is_not_zero():
    assert symmetrized_f(3, 1) == LaurentPoly.parse("T1^2", tvars(1), 3)
    assert symmetrized_f(5, 1) == LaurentPoly.parse("T1^4", tvars(1), 5)


def test_symmetrized_p5_k3_vanishes():
    assert symmetrized_f(5, 3).is_zero()


def test_symmetrized_p7_k6_vanishes():
    assert symmetrized_f(7, 6).is_zero()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_statement_all_k(p):
    rep = verify_symmetrized_vanishing([p])
    assert rep.ok()
    checked = [e for e in rep.entries if e.status == "pass"]
    assert len(checked) == p - 2  # k = 2 .. p-1


def test_symmetrized_is_symmetric():
    f = symmetrized_f(5, 3)
    for sigma in itertools.permutations(range(3)):
        permuted = {}
        for exps, c in f.terms.items():
            new = [0] * 3
            for pos, e in enumerate(exps):
                new[sigma[pos]] = e
            permuted[tuple(new)] = c
        assert LaurentPoly(f.vars, 5, permuted) == f


def test_k_out_of_range():
    with pytest.raises(RingError):
        f_poly(5, 5)
    with pytest.raises(RingError):
        f_poly(5, 0)
    with pytest.raises(RingError):
        symmetrized_f(23, 9)  # permutation cap


# ---------------------------------------------------------------- Taylor


def e_mat(i, j, n, vars, p):
    return PolyMatrix.from_int_rows(
        [[1 if (a, b) == (i, j) else 0 for b in range(n)] for a in range(n)], vars, p
    )


def test_taylor_single_square_zero():
    ctx = PrimeContext(3)
    vars = VarSpec.make(["t"])
    n = e_mat(0, 1, 2, vars, 3)
    z = LaurentPoly.parse("t", vars, 3)
    assert taylor_cocycle_identity(ctx, [n], [z])


def test_taylor_two_commuting_p5():
    ctx = PrimeContext(5)
    vars = VarSpec.make(["t"])
    n1 = e_mat(0, 1, 3, vars, 5)
    n2 = e_mat(0, 2, 3, vars, 5)
    z1 = LaurentPoly.parse("t", vars, 5)
    z2 = LaurentPoly.parse("t^2", vars, 5)
    assert taylor_cocycle_identity(ctx, [n1, n2], [z1, z2])


def test_taylor_rejects_non_commuting():
    ctx = PrimeContext(5)
    vars = VarSpec.make(["t"])
    n1 = e_mat(0, 1, 3, vars, 5)
    n2 = e_mat(1, 2, 3, vars, 5)
    z = LaurentPoly.parse("t", vars, 5)
    with pytest.raises(RingError, match="commute"):
        taylor_cocycle_identity(ctx, [n1, n2], [z, z])


def test_taylor_rejects_joint_nilpotency_violation():
    ctx = PrimeContext(3)
    vars = VarSpec.make(["t"])
    n = e_mat(0, 1, 3, vars, 3) + e_mat(1, 2, 3, vars, 3)  # n^2 != 0
    z = LaurentPoly.parse("t", vars, 3)
    with pytest.raises(RingError, match="nilpotent"):
        taylor_cocycle_identity(ctx, [n], [z])


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_taylor_on_seeded_families(seed):
    for p in (3, 5):
        ctx = PrimeContext(p)
        mats, funcs = commuting_nilpotent_family(ctx, seed=seed, count=2)
        assert taylor_cocycle_identity(ctx, mats, funcs)


# ---------------------------------------------------------------- Wilson


@pytest.mark.parametrize("p,value", [(3, 2), (5, 24 % 5), (7, 720 % 7)])
def test_wilson_values(p, value):
    assert value == p - 1  # (p-1)! = -1
    assert wilson_unit_check(p).ok()


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_wilson_all_small_primes(p):
    assert wilson_unit_check(p).ok()
