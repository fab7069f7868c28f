import numpy as np
import pytest

from ptchain import (ChainConfig, ConfigurationError, build_hamiltonian,
                     is_pt_symmetric, pt_exchange)


def random_configs(n, seed=0, eta_max=4.0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        N = int(rng.integers(2, 40))
        k = int(rng.integers(1, N // 2 + 1))
        out.append(ChainConfig(N=N, k=k, t=1.0, eta=float(rng.uniform(0, eta_max))))
    return out


def test_hamiltonian_two_site_pure_hopping():
    H = build_hamiltonian(ChainConfig(N=2, k=1, t=1.0, eta=0.0))
    assert np.array_equal(H, np.array([[0, 1], [1, 0]], dtype=complex))


def test_hamiltonian_three_site_gain_loss():
    H = build_hamiltonian(ChainConfig(N=3, k=1, t=1.0, eta=0.5))
    expected = np.array([[0.5j, 1, 0],
                         [1, 0, 1],
                         [0, 1, -0.5j]])
    assert np.array_equal(H, expected)


def test_hamiltonian_structure_general():
    cfg = ChainConfig(N=9, k=3, t=2.5, eta=1.2)
    H = build_hamiltonian(cfg)
    assert H[cfg.k - 1, cfg.k - 1] == 1.2j
    assert H[cfg.k_loss - 1, cfg.k_loss - 1] == -1.2j
    off = np.diag(H, 1)
    assert np.all(off == 2.5)
    # everything else zero
    mask = np.ones_like(H, dtype=bool)
    np.fill_diagonal(mask, False)
    mask[np.arange(8), np.arange(1, 9)] = False
    mask[np.arange(1, 9), np.arange(8)] = False
    assert np.all(H[mask] == 0)


def test_trace_is_zero():
    for cfg in random_configs(20, seed=1):
        assert abs(np.trace(build_hamiltonian(cfg))) == 0.0


def test_exchange_matrix_small():
    assert np.array_equal(pt_exchange(2), np.array([[0., 1.], [1., 0.]]))
    assert np.array_equal(pt_exchange(3), np.eye(3)[::-1])


def test_exchange_is_involution():
    J = pt_exchange(10)
    assert np.array_equal(J @ J, np.eye(10))
    assert np.isrealobj(J)


def test_built_hamiltonians_are_pt_symmetric():
    for cfg in random_configs(25, seed=2):
        assert is_pt_symmetric(build_hamiltonian(cfg), tol=1e-12)


def test_same_sign_contacts_break_pt():
    H = build_hamiltonian(ChainConfig(N=6, k=2, eta=0.8))
    H[5 - 1, 5 - 1] = +0.8j  # same sign at the mirror site
    assert not is_pt_symmetric(H)


def test_non_centrosymmetric_hermitian_is_not_pt():
    # counterexample built by hand and checked by direct matrix arithmetic
    rng = np.random.default_rng(7)
    A = rng.normal(size=(5, 5))
    H = A + A.T
    J = pt_exchange(5)
    deviation = np.max(np.abs(J @ np.conj(H) @ J - H))
    assert deviation > 0.1
    assert not is_pt_symmetric(H)


def test_zero_coupling_is_exactly_centrosymmetric():
    H = build_hamiltonian(ChainConfig(N=12, k=4, eta=0.0))
    J = pt_exchange(12)
    assert np.array_equal(J @ H @ J, H)
    assert np.array_equal(H, H.T)
    assert np.isreal(H).all()


def test_rejects_square_check():
    with pytest.raises(ConfigurationError):
        is_pt_symmetric(np.zeros((3, 4)))


@pytest.mark.parametrize("N,k,t,eta", [
    (1, 1, 1.0, 0.0),     # too short for a distinct loss site
    (10, 0, 1.0, 0.0),    # site below range
    (10, 6, 1.0, 0.0),    # gain site past the midpoint
    (10, 1, 0.0, 0.0),    # dead hopping
    (10, 1, 1.0, -0.5),   # negative coupling strength
])
def test_invalid_configs_rejected(N, k, t, eta):
    with pytest.raises(ConfigurationError):
        ChainConfig(N=N, k=k, t=t, eta=eta)


def test_loss_site_is_mirror():
    cfg = ChainConfig(N=23, k=6)
    assert cfg.k_loss == 18
    assert cfg.k + cfg.k_loss == cfg.N + 1
