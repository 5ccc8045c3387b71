import numpy as np
import pytest
from flint import arb_mat
from hypothesis import given, settings, strategies as st

from cvpt import precise
from cvpt.expm import expm
from oracles import mp_expm


@pytest.mark.parametrize("scale", [1e-6, 0.05, 0.4, 1.5, 4.0, 30.0])
def test_matches_high_precision_exponential(scale):
    rng = np.random.default_rng(11)
    for _ in range(5):
        A = scale * rng.standard_normal((6, 6))
        ref = mp_expm(A)
        np.testing.assert_allclose(expm(A), ref, rtol=1e-12, atol=1e-12 * np.abs(ref).max())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 6.0))
def test_random_matrices_against_oracle(seed, scale):
    A = scale * np.random.default_rng(seed).standard_normal((4, 4))
    ref = mp_expm(A, dps=40)
    err = np.linalg.norm(expm(A) - ref) / np.linalg.norm(ref)
    assert err < 1e-12


def test_defective_jordan_block_is_exact():
    t = 2.5
    J = np.array([[1.0, 1.0], [0.0, 1.0]]) * t
    np.testing.assert_allclose(expm(J), np.exp(t) * np.array([[1.0, t], [0.0, 1.0]]), rtol=1e-14)


def test_zero_and_identity():
    np.testing.assert_array_equal(expm(np.zeros((3, 3))), np.eye(3))
    np.testing.assert_allclose(expm(np.eye(2)), np.e * np.eye(2), rtol=1e-15)


@given(st.integers(0, 2 ** 32 - 1), st.floats(-2, 2), st.floats(-2, 2))
def test_commuting_times_add(seed, s, t):
    A = np.random.default_rng(seed).standard_normal((4, 4))
    lhs = expm(A * (s + t))
    np.testing.assert_allclose(expm(A * s) @ expm(A * t), lhs, rtol=1e-10,
                               atol=1e-10 * np.abs(lhs).max())


@pytest.mark.parametrize("bad", [np.ones((2, 3)), np.array([[np.nan, 0], [0, 1.0]])])
def test_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        expm(bad)


def test_ball_exponential_agrees_with_float_and_tightens_with_precision():
    rng = np.random.default_rng(5)
    M = rng.standard_normal((4, 4))
    D = np.diag([2.0, 2, 1, 1])
    with precise.workprec(128):
        F, Q = precise.van_loan_blocks(M, D, 1.7)
        r128 = precise.radius(Q)
        F128 = precise.to_float(F)
    with precise.workprec(256):
        F2, Q2 = precise.van_loan_blocks(M, D, 1.7)
        r256 = precise.radius(Q2)
    np.testing.assert_allclose(F128, expm(1.7 * M), rtol=1e-13)
    np.testing.assert_allclose(precise.to_float(Q2), precise.to_float(Q), rtol=1e-30)
    assert r256 < r128 * 1e-30


def test_bits_grow_with_log_norm_and_cap():
    M = np.diag([1.0, -1.0])
    assert precise.bits_for(M, 1.0) == precise.BASE_BITS + int(np.ceil(8 / np.log(2)))
    assert precise.bits_for(-np.eye(2), 100.0) == precise.BASE_BITS
    with pytest.raises(OverflowError):
        precise.bits_for(M, 1e4)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 1e4))
def test_laguerre_smallest_eigenvalue(seed, scale):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((4, 4))
    V = scale * (X @ X.T) + np.eye(4)
    OMEGA = np.kron(np.eye(2), np.array([[0, 1.0], [-1, 0]]))
    ref = np.linalg.eigvalsh(V + 1j * OMEGA)[0]
    with precise.workprec(160):
        got = float(precise.min_eig_hermitian(precise.to_arb_mat(V)))
    assert got == pytest.approx(ref, abs=1e-12 * (1 + np.abs(V).max()))


def test_laguerre_handles_repeated_roots():
    # vacuum: eigenvalues of I + i Omega are 0, 0, 2, 2
    with precise.workprec(128):
        assert abs(float(precise.min_eig_hermitian(arb_mat(np.eye(4).tolist())))) < 1e-15
        thermal = precise.to_arb_mat(3.0 * np.eye(4))
        assert float(precise.min_eig_hermitian(thermal)) == pytest.approx(2.0, abs=1e-15)
