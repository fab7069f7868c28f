"""Divisor arithmetic behind the eta-independent eigenstates.

Two families of real, coupling-independent states exist whenever N+1 shares
divisors with the contact position: opaque states (nodes at both contacts,
no transport) live on the grid theta = r*pi/g with g = gcd(N+1, k), and
transparent states (finite contact amplitudes, unit transport coefficient)
on theta = r*pi/h with h = gcd(N+1, 2k), minus the opaque subset.  Both the
gcd closed forms and the raw divisor-union definitions are kept; tests pin
them against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ClassificationError, ConfigurationError

TAG_GENERIC = "Generic"
TAG_OPAQUE = "Opaque"
TAG_TRANSPARENT = "Transparent"


def _validate(N: int, k: int):
    if int(N) != N or N < 2:
        raise ConfigurationError(f"chain length must be an integer >= 2, got N={N}")
    if int(k) != k or not 1 <= k <= N // 2:
        raise ConfigurationError(
            f"gain site must satisfy 1 <= k <= floor(N/2) = {N // 2}, got k={k}")


def _divisors(n: int):
    out = set()
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out.add(d)
            out.add(n // d)
    return sorted(out)


def opaque_thetas(N: int, k: int) -> list:
    """Opaque pseudo-momenta as exact fractions of pi: {r/g : r = 1..g-1}
    with g = gcd(N+1, k)."""
    _validate(N, k)
    g = math.gcd(N + 1, k)
    return sorted(Fraction(r, g) for r in range(1, g))


def opaque_thetas_divisors(N: int, k: int) -> list:
    """Reference divisor-union form: all r/M with M > 1 dividing both N+1
    and k; must coincide with the gcd grid."""
    _validate(N, k)
    out = set()
    for M in _divisors(N + 1):
        if M > 1 and k % M == 0:
            out.update(Fraction(r, M) for r in range(1, M))
    return sorted(out)


def transparent_thetas(N: int, k: int) -> list:
    """Transparent pseudo-momenta as fractions of pi: the gcd(N+1, 2k) grid
    minus the opaque subset."""
    _validate(N, k)
    h = math.gcd(N + 1, 2 * k)
    opaque = set(opaque_thetas(N, k))
    return sorted(Fraction(r, h) for r in range(1, h)
                  if Fraction(r, h) not in opaque)


def transparent_thetas_divisors(N: int, k: int) -> list:
    """Reference form: union of r/A over A dividing both N+1 and N-2k+1 but
    not k, minus the opaque set."""
    _validate(N, k)
    out = set()
    for A in _divisors(N + 1):
        if A > 1 and (N - 2 * k + 1) % A == 0 and k % A != 0:
            out.update(Fraction(r, A) for r in range(1, A))
    return sorted(out - set(opaque_thetas_divisors(N, k)))


def count_special_states(N: int, k: int):
    """(number of opaque states, number of transparent states) for (N, k)."""
    _validate(N, k)
    g = math.gcd(N + 1, k)
    h = math.gcd(N + 1, 2 * k)
    return g - 1, h - g


@dataclass(frozen=True)
class SpecialStateCensus:
    """All coupling-independent states of a configuration, carried as exact
    reduced fractions of pi so that matching never relies on float identity."""

    N: int
    k: int
    opaque: tuple
    transparent: tuple

    @property
    def n_opaque(self) -> int:
        return len(self.opaque)

    @property
    def n_transparent(self) -> int:
        return len(self.transparent)

    def opaque_values(self) -> np.ndarray:
        return np.array([float(f) * math.pi for f in self.opaque])

    def transparent_values(self) -> np.ndarray:
        return np.array([float(f) * math.pi for f in self.transparent])

    def to_json_dict(self) -> dict:
        return {
            "N": self.N,
            "k": self.k,
            "opaque": [[f.numerator, f.denominator] for f in self.opaque],
            "transparent": [[f.numerator, f.denominator] for f in self.transparent],
        }


def special_state_census(N: int, k: int) -> SpecialStateCensus:
    return SpecialStateCensus(N=N, k=k,
                              opaque=tuple(opaque_thetas(N, k)),
                              transparent=tuple(transparent_thetas(N, k)))


def match_census_tag(theta: complex, vector: np.ndarray, census: SpecialStateCensus,
                     theta_tol: float = 1e-8, amp_tol: float = 1e-9) -> str:
    """Tag a solved state by matching its theta against the census grid and
    cross-checking the contact amplitudes.

    A theta match without the corresponding node (opaque) or anti-node
    (transparent) amplitude pattern raises ClassificationError rather than
    guessing.
    """
    theta = complex(theta)
    if abs(theta.imag) > theta_tol:
        return TAG_GENERIC
    scale = float(np.max(np.abs(vector)))
    a_gain = abs(vector[census.k - 1]) / scale
    a_loss = abs(vector[census.N - census.k]) / scale
    for frac, tag in ((census.opaque, TAG_OPAQUE), (census.transparent, TAG_TRANSPARENT)):
        for f in frac:
            if abs(theta.real - float(f) * math.pi) <= theta_tol:
                small = a_gain < amp_tol and a_loss < amp_tol
                if tag == TAG_OPAQUE and small:
                    return TAG_OPAQUE
                if tag == TAG_TRANSPARENT and a_gain > amp_tol and a_loss > amp_tol:
                    return TAG_TRANSPARENT
                raise ClassificationError(
                    f"theta = {theta} matches the {tag.lower()} fraction {f} of pi but the "
                    f"contact amplitudes ({a_gain:.3e}, {a_loss:.3e}) contradict it")
    return TAG_GENERIC


def classify_eigenpair(pair, census: SpecialStateCensus,
                       theta_tol: float = 1e-8, amp_tol: float = 1e-9) -> str:
    """Tag an EigenPair against a census built for the same (N, k)."""
    if len(pair.vector) != census.N:
        raise ConfigurationError(
            f"census is for N={census.N} but the eigenvector has {len(pair.vector)} sites")
    return match_census_tag(pair.theta, pair.vector, census,
                            theta_tol=theta_tol, amp_tol=amp_tol)
