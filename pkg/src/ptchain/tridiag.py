"""General complex tridiagonal matrix with two diagonal impurities.

This is the fully general form behind the gain/loss chain: constant
subdiagonal a, diagonal b, superdiagonal c, and impurities -alpha, -beta
subtracted on the diagonal at the mirror sites k and N-k+1.  Eigenvalues are
lambda = b + 2 sqrt(ac) cos(theta) with theta a root of the generalized
secular equation; the chain of section-specific formulas is recovered with
a = c = t, b = 0, alpha = -i eta, beta = +i eta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

_TRIVIAL_SIN_FLOOR = 1e-14


@dataclass(frozen=True)
class GeneralTridiag:
    """Parameters (a, b, c, alpha, beta, N, k); requires a*c != 0 and
    1 <= k <= floor(N/2)."""

    a: complex
    b: complex
    c: complex
    alpha: complex
    beta: complex
    N: int
    k: int

    def __post_init__(self):
        if self.a * self.c == 0:
            raise ConfigurationError("off-diagonal product a*c must be nonzero")
        if int(self.N) != self.N or self.N < 2:
            raise ConfigurationError(f"matrix dimension must be an integer >= 2, got {self.N}")
        if int(self.k) != self.k or not 1 <= self.k <= self.N // 2:
            raise ConfigurationError(
                f"impurity site must satisfy 1 <= k <= floor(N/2), got {self.k}")

    @property
    def sqrt_ac(self) -> complex:
        """Principal branch of sqrt(a*c)."""
        return complex(np.sqrt(complex(self.a * self.c)))

    @property
    def rho(self) -> complex:
        """The square root of a/c consistent with the principal sqrt(ac):
        rho = a / sqrt(ac), so that a / rho = sqrt(ac) exactly."""
        return self.a / self.sqrt_ac


def build_general_matrix(m: GeneralTridiag) -> np.ndarray:
    """Assemble the dense matrix (row j: a u_{j-1} + b u_j + c u_{j+1}, with
    b - alpha at site k and b - beta at site N-k+1)."""
    A = np.zeros((m.N, m.N), dtype=complex)
    idx = np.arange(m.N)
    A[idx, idx] = m.b
    A[idx[1:], idx[:-1]] = m.a
    A[idx[:-1], idx[1:]] = m.c
    A[m.k - 1, m.k - 1] -= m.alpha
    A[m.N - m.k, m.N - m.k] -= m.beta
    return A


def _check_theta(theta: complex) -> complex:
    theta = complex(theta)
    if abs(np.sin(theta)) <= _TRIVIAL_SIN_FLOOR:
        raise DomainError(f"theta = {theta} is at (or too close to) a trivial point m*pi")
    return theta


def general_secular_residual(theta: complex, m: GeneralTridiag) -> complex:
    """Generalized secular function

        sin((N+1)t) + (alpha+beta)/(sqrt(ac) sin t) sin((N-k+1)t) sin(kt)
                    + alpha*beta/(ac sin^2 t) sin((N-2k+1)t) sin^2(kt)

    whose non-trivial roots give the full eigenvalue set through
    lambda = b + 2 sqrt(ac) cos(theta)."""
    theta = _check_theta(theta)
    N, k = m.N, m.k
    s = np.sin(theta)
    sac = m.sqrt_ac
    return complex(np.sin((N + 1) * theta)
                   + (m.alpha + m.beta) / (sac * s) * np.sin((N - k + 1) * theta) * np.sin(k * theta)
                   + m.alpha * m.beta / (m.a * m.c * s ** 2)
                   * np.sin((N - 2 * k + 1) * theta) * np.sin(k * theta) ** 2)


def general_secular_scale(theta: complex, m: GeneralTridiag) -> float:
    """Sum of term magnitudes of the generalized secular function."""
    theta = _check_theta(theta)
    N, k = m.N, m.k
    s = np.sin(theta)
    sac = m.sqrt_ac
    return float(1.0 + abs(np.sin((N + 1) * theta))
                 + abs((m.alpha + m.beta) / (sac * s) * np.sin((N - k + 1) * theta) * np.sin(k * theta))
                 + abs(m.alpha * m.beta / (m.a * m.c * s ** 2)
                       * np.sin((N - 2 * k + 1) * theta) * np.sin(k * theta) ** 2))


def general_eigenvalue(theta: complex, m: GeneralTridiag) -> complex:
    """lambda = b + 2 sqrt(ac) cos(theta), principal branch of the root."""
    return complex(m.b + 2.0 * m.sqrt_ac * np.cos(complex(theta)))


def general_theta_from_eigenvalue(lam: complex, m: GeneralTridiag) -> complex:
    """Invert the eigenvalue map: theta = arccos((lambda - b)/(2 sqrt(ac)))."""
    z = np.asarray((complex(lam) - m.b) / (2.0 * m.sqrt_ac), dtype=complex)
    return complex(np.arccos(z))


def general_eigenvector(theta: complex, m: GeneralTridiag, *,
                        residual_check: bool = True,
                        check_tol: float = 1e-6) -> np.ndarray:
    """Closed-form eigenvector components for a root theta of the generalized
    secular equation, unit-normalized, phase fixed like the chain path.

    In the gauge where the constant prefactor is one the components read

        u_j = rho^j [ sin(j t)
                      + step(j-k-1)   alpha sin(kt) sin((j-k)t) / (sqrt(ac) sin t)
                      + step(j-N+k-2) beta  sin((j-N+k-1)t) / (sqrt(ac) sin t)
                        * ( sin((N-k+1)t) + alpha sin((N-2k+1)t) sin(kt) / (sqrt(ac) sin t) ) ]

    with rho = a / sqrt(ac).
    """
    theta = _check_theta(theta)
    if residual_check:
        rel = abs(general_secular_residual(theta, m)) / general_secular_scale(theta, m)
        if rel > check_tol:
            raise DomainError(
                f"theta = {theta} is not a root of the generalized secular equation "
                f"(relative residual {rel:.3e})")
    N, k = m.N, m.k
    s = np.sin(theta)
    sac = m.sqrt_ac
    j = np.arange(1, N + 1)
    u = np.sin(j * theta).astype(complex)
    past_first = j >= k + 1
    if np.any(past_first):
        jj = j[past_first]
        u[past_first] += m.alpha * np.sin(k * theta) * np.sin((jj - k) * theta) / (sac * s)
    past_second = j >= N - k + 2
    if np.any(past_second):
        jj = j[past_second]
        inner = (np.sin((N - k + 1) * theta)
                 + m.alpha * np.sin((N - 2 * k + 1) * theta) * np.sin(k * theta) / (sac * s))
        u[past_second] += m.beta * np.sin((jj - N + k - 1) * theta) / (sac * s) * inner
    u = u * m.rho ** j
    u = u / np.linalg.norm(u)
    from .spectral import anchor_phase
    return anchor_phase(u)
