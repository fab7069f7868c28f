import math

import numpy as np
import pytest

from ptchain import (ChainConfig, ConfigurationError, DomainError,
                     build_general_matrix, eigenvector_analytic,
                     general_eigenvalue, general_eigenvector,
                     general_secular_residual, secular_residual,
                     solve_spectrum)
from ptchain.tridiag import (GeneralTridiag, general_secular_scale,
                             general_theta_from_eigenvalue)


def random_instance(rng, n_max=10):
    N = int(rng.integers(4, n_max + 1))
    k = int(rng.integers(1, N // 2 + 1))
    a, b, c, alpha, beta = (complex(rng.normal(), rng.normal()) for _ in range(5))
    if abs(a * c) < 1e-2:
        a += 1.0
    return GeneralTridiag(a=a, b=b, c=c, alpha=alpha, beta=beta, N=N, k=k)


def test_requires_nonzero_offdiagonal_product():
    with pytest.raises(ConfigurationError):
        GeneralTridiag(a=0, b=1, c=1, alpha=0, beta=0, N=6, k=2)


def test_matrix_assembly():
    m = GeneralTridiag(a=2, b=1, c=3, alpha=0.5j, beta=-0.5j, N=4, k=1)
    A = build_general_matrix(m)
    expected = np.array([
        [1 - 0.5j, 3, 0, 0],
        [2, 1, 3, 0],
        [0, 2, 1, 3],
        [0, 0, 2, 1 + 0.5j],
    ], dtype=complex)
    assert np.array_equal(A, expected)


def test_specialization_matches_chain_secular():
    # a = c = t, b = 0, alpha = -i eta, beta = +i eta kills the middle term
    # and reduces the impurity product to eta^2
    cfg = ChainConfig(10, 3, 1.0, 0.8)
    m = GeneralTridiag(a=1, b=0, c=1, alpha=-0.8j, beta=0.8j, N=10, k=3)
    rng = np.random.default_rng(21)
    for _ in range(1000):
        theta = complex(rng.uniform(0.05, math.pi - 0.05), rng.uniform(-1.0, 1.0))
        g = general_secular_residual(theta, m)
        s = secular_residual(theta, cfg)
        assert abs(g - s) <= 1e-13 * general_secular_scale(theta, m)


def test_no_impurities_reduces_to_free_chain():
    m = GeneralTridiag(a=1.5, b=0.2, c=0.4, alpha=0, beta=0, N=8, k=2)
    rng = np.random.default_rng(22)
    for _ in range(50):
        theta = complex(rng.uniform(0.1, 3.0), rng.uniform(-0.5, 0.5))
        assert abs(general_secular_residual(theta, m) - np.sin(9 * theta)) < 1e-12 * (
            1 + abs(np.sin(9 * theta)))


def test_eigenvalue_map_examples():
    m = GeneralTridiag(a=1, b=0, c=1, alpha=0, beta=0, N=6, k=1)
    assert general_eigenvalue(0.7, m) == pytest.approx(2 * math.cos(0.7), abs=1e-14)
    m = GeneralTridiag(a=4, b=2, c=1, alpha=0, beta=0, N=6, k=1)
    assert general_eigenvalue(math.pi / 3, m) == pytest.approx(4.0, abs=1e-14)


def test_dense_eigenvalues_are_secular_roots():
    rng = np.random.default_rng(23)
    for _ in range(30):
        m = random_instance(rng)
        A = build_general_matrix(m)
        for lam in np.linalg.eigvals(A):
            theta = general_theta_from_eigenvalue(lam, m)
            if abs(np.sin(theta)) < 1e-6:
                continue
            res = general_secular_residual(theta, m)
            assert abs(res) <= 1e-9 * general_secular_scale(theta, m)
            assert abs(general_eigenvalue(theta, m) - lam) <= 1e-9 * (1 + abs(lam))


def test_eigenvector_matrix_residual():
    rng = np.random.default_rng(24)
    for _ in range(20):
        m = random_instance(rng, n_max=8)
        A = build_general_matrix(m)
        for lam in np.linalg.eigvals(A):
            theta = general_theta_from_eigenvalue(lam, m)
            if abs(np.sin(theta)) < 1e-6:
                continue
            u = general_eigenvector(theta, m)
            assert np.linalg.norm(A @ u - lam * u) <= 1e-9


def test_eigenvector_without_impurities():
    m = GeneralTridiag(a=2.0, b=0.0, c=0.5, alpha=0, beta=0, N=7, k=2)
    theta = math.pi / 8  # root of sin(8 theta)
    u = general_eigenvector(theta, m)
    j = np.arange(1, 8)
    ref = m.rho ** j * np.sin(j * theta)
    ref = ref / np.linalg.norm(ref)
    peak = np.argmax(np.abs(u))
    ref = ref / (ref[peak] / abs(ref[peak]))
    assert np.allclose(u, ref, atol=1e-12)


def test_pt_specialization_matches_chain_eigenvectors():
    cfg = ChainConfig(23, 6, 1.0, 1.5)
    m = GeneralTridiag(a=1, b=0, c=1, alpha=-1.5j, beta=1.5j, N=23, k=6)
    s = solve_spectrum(cfg)
    for p in s.pairs:
        u_general = general_eigenvector(p.theta, m)
        u_chain = eigenvector_analytic(p.theta, cfg, residual_check=False)
        assert np.allclose(u_general, u_chain, atol=1e-12)


def test_general_eigenvector_rejects_non_root():
    m = GeneralTridiag(a=1, b=0, c=1, alpha=0.3, beta=0.1, N=6, k=2)
    with pytest.raises(DomainError):
        general_eigenvector(0.456, m)


def test_trivial_theta_rejected():
    m = GeneralTridiag(a=1, b=0, c=1, alpha=0.3, beta=0.1, N=6, k=2)
    with pytest.raises(DomainError):
        general_secular_residual(math.pi, m)


def test_rho_consistent_with_principal_root():
    # rho is defined as a / sqrt(ac) so that rho * sqrt(ac) = a exactly,
    # even where the principal branches of sqrt(a/c) and sqrt(ac) disagree
    m = GeneralTridiag(a=-1.0, b=0, c=-1.0, alpha=0, beta=0, N=4, k=1)
    assert m.rho * m.sqrt_ac == pytest.approx(m.a, abs=1e-15)
    assert m.rho ** 2 == pytest.approx(m.a / m.c, abs=1e-15)
