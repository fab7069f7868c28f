"""Chain geometry, Hamiltonian assembly, and the parity-time machinery."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class ChainConfig:
    """Parameters of the chain: length N, gain site k, hopping t, strength eta.

    The gain +i*eta sits at site k, the balancing loss -i*eta at the mirror
    site k' = N - k + 1.  Sites are 1-based everywhere in the public API.
    k is restricted to the left half of the chain (k <= floor(N/2)) so that
    the loss site is distinct; mirrored requests are normalized by the CLI.
    """

    N: int
    k: int
    t: float = 1.0
    eta: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ConfigurationError(f"chain length must be an integer >= 2, got N={self.N}")
        if int(self.k) != self.k or not 1 <= self.k <= self.N // 2:
            raise ConfigurationError(
                f"gain site must satisfy 1 <= k <= floor(N/2) = {self.N // 2}, got k={self.k}")
        if self.t == 0:
            raise ConfigurationError("hopping amplitude t must be nonzero")
        if not self.eta >= 0:
            raise ConfigurationError(f"gain/loss strength must satisfy eta >= 0, got eta={self.eta}")

    @property
    def k_loss(self) -> int:
        """1-based site of the loss contact, N - k + 1."""
        return self.N - self.k + 1

    def with_eta(self, eta: float) -> "ChainConfig":
        return ChainConfig(self.N, self.k, self.t, eta)


def build_hamiltonian(cfg: ChainConfig) -> np.ndarray:
    """Dense N x N Hamiltonian: uniform nearest-neighbor hopping t plus the
    imaginary diagonal pair +i*eta at site k and -i*eta at site N-k+1."""
    H = np.zeros((cfg.N, cfg.N), dtype=complex)
    idx = np.arange(cfg.N - 1)
    H[idx, idx + 1] = cfg.t
    H[idx + 1, idx] = cfg.t
    H[cfg.k - 1, cfg.k - 1] = 1j * cfg.eta
    H[cfg.k_loss - 1, cfg.k_loss - 1] = -1j * cfg.eta
    return H


def pt_exchange(N: int) -> np.ndarray:
    """Exchange (anti-diagonal permutation) matrix implementing the parity
    operator: J[i, j] = 1 iff j = N - i + 1.  Real, and J @ J = identity."""
    if int(N) != N or N < 1:
        raise ConfigurationError(f"exchange matrix size must be a positive integer, got {N}")
    return np.eye(N)[::-1].copy()


def is_pt_symmetric(H: np.ndarray, tol: float = 1e-12) -> bool:
    """Check the combined parity/time-reversal invariance J conj(H) J == H.

    Time reversal acts as complex conjugation, parity as the exchange matrix;
    the test is the max-entry deviation against ``tol``.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ConfigurationError(f"expected a square matrix, got shape {H.shape}")
    J = pt_exchange(H.shape[0])
    return bool(np.max(np.abs(J @ np.conj(H) @ J - H)) < tol)
