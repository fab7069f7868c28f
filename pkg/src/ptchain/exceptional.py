"""Exceptional points: detection along the coupling axis, coalescence order,
and the perturbative and asymptotic spectra around them.

An exceptional point is a coupling where two (or more) eigenvalues and their
eigenvectors coalesce and the chain Hamiltonian becomes defective.  In terms
of the secular function F(theta, eta^2) it is a double root: F = 0 and
dF/dtheta = 0 simultaneously.  Detection sweeps the coupling, seeds from
near-coalescing eigenvalue pairs, and refines each seed with a damped Newton
iteration on the two-equation system in the unknowns (theta, eta^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainConfig, build_hamiltonian
from .errors import ConfigurationError, DomainError
from .spectral import (SolverOptions, normalize_theta, secular_dtheta,
                       secular_residual, theta_from_energy)


@dataclass(frozen=True)
class EPResiduals:
    F: float
    dF: float


@dataclass(frozen=True)
class EPRecord:
    """One coalescence: critical coupling, coalescing pseudo-momentum and
    energy, order p (number of merging eigenvalues), residuals of the double
    root conditions, and qualitative flags ('complex-sector' marks the
    merging of already-complex eigenvalues, 'unresolved' a seed whose
    refinement failed, 'order-ambiguous' disagreeing order estimates)."""

    eta_c: float
    theta_c: complex
    energy_c: complex
    order: int
    residuals: EPResiduals
    flags: tuple = ()


@dataclass(frozen=True)
class CrossingRecord:
    """A near-degeneracy of the sweep that refined to a genuinely complex
    critical coupling: an eigenvalue crossing or avoided crossing, not an
    exceptional point on the real coupling axis."""

    eta_seed: float
    theta_seed: complex
    mu_solution: complex


def _double_root_state(theta: complex, mu: complex, N: int, k: int, t: float):
    """Residual pair (F, dF/dtheta), the mu-derivatives, the curvature, and a
    normalized residual size at one (theta, mu) point.  The secular function
    is affine in mu = eta^2, so everything is assembled from the coupling
    part and its derivatives in a single pass."""
    from .spectral import _coupling_parts
    P, dP, d2P = _coupling_parts(theta, N, k)
    t2 = t * t
    f0 = np.sin((N + 1) * theta)
    f = f0 + mu * P / t2
    df = (N + 1) * np.cos((N + 1) * theta) + mu * dP / t2
    fdd = -(N + 1) ** 2 * f0 + mu * d2P / t2
    scale = 1.0 + abs(f0) + abs(mu * P / t2)
    size = math.hypot(abs(f) / scale, abs(df) / ((N + 1) * scale))
    return f, df, fdd, P / t2, dP / t2, size


def _ep_newton(theta: complex, mu: complex, cfg: ChainConfig,
               max_iters: int = 50):
    """Damped Newton on {F(theta, mu) = 0, dF/dtheta(theta, mu) = 0} with the
    analytic 2x2 Jacobian; mu = eta^2 is allowed to wander into the complex
    plane and reality is judged afterwards."""
    N, k, t = cfg.N, cfg.k, cfg.t
    f, df, fdd, p, dp, size = _double_root_state(theta, mu, N, k, t)
    for _ in range(max_iters):
        if size < 1e-12:
            break
        det = df * dp - p * fdd
        if det == 0:
            return theta, mu, size, False
        step_theta = (f * dp - p * df) / det
        step_mu = (df * df - fdd * f) / det
        accepted = False
        damp = 1.0
        for _half in range(10):
            th_new = theta - damp * step_theta
            mu_new = mu - damp * step_mu
            if abs(np.sin(th_new)) < 1e-12 or abs(th_new.imag) > 12.0:
                damp *= 0.5
                continue
            state = _double_root_state(th_new, mu_new, N, k, t)
            if state[-1] < size:
                theta, mu = th_new, mu_new
                f, df, fdd, p, dp, size = state
                accepted = True
                break
            damp *= 0.5
        if not accepted:
            break
    return theta, mu, size, size < 1e-10


def _sweep_energies(cfg: ChainConfig, etas: np.ndarray):
    out = []
    for eta in etas:
        H = build_hamiltonian(cfg.with_eta(float(eta)))
        out.append(np.sort_complex(np.linalg.eigvals(H)))
    return out


def find_exceptional_points(cfg: ChainConfig, eta_range=(0.0, 5.0),
                            grid: int = 2000, *,
                            seed_gap_fraction: float = 0.05,
                            opts: SolverOptions | None = None,
                            return_crossings: bool = False):
    """Locate all coalescences of the spectrum for couplings in ``eta_range``.

    The coupling axis is swept on ``grid`` points; every eigenvalue pair
    closer than ``seed_gap_fraction`` of the spectral diameter seeds a Newton
    refinement of the double-root system.  Converged solutions with a real
    critical coupling inside the range are kept, deduplicated, ordered by
    (eta_c, Re theta_c), and annotated with the coalescence order.  Seeds
    that refine to a complex coupling are eigenvalue (avoided) crossings and
    are reported separately when ``return_crossings`` is set; seeds with a
    machine-tight gap whose refinement fails are retained with the
    'unresolved' flag.
    """
    if grid < 100:
        raise ConfigurationError(f"coupling grid must have at least 100 points, got {grid}")
    lo, hi = float(eta_range[0]), float(eta_range[1])
    if not 0.0 <= lo < hi:
        raise ConfigurationError(f"invalid coupling range {eta_range}")
    opts = opts or SolverOptions()

    etas = np.linspace(lo, hi, grid)
    energies = _sweep_energies(cfg, etas)
    diameter = max(
        float(np.max(np.abs(E[:, None] - E[None, :]))) for E in energies)
    # the band of slowly-moving eigenvalues has width 4|t|; the imaginary
    # branches can stretch the raw diameter arbitrarily and must not loosen
    # the gap criterion
    threshold = seed_gap_fraction * 4.0 * abs(cfg.t)

    seeds = []
    for eta, E in zip(etas, energies):
        D = np.abs(E[:, None] - E[None, :]) + np.eye(len(E)) * (2 * diameter)
        for a, b in zip(*np.nonzero(D < threshold)):
            if a < b:
                theta0 = theta_from_energy((E[a] + E[b]) / 2.0, cfg)
                seeds.append((float(D[a, b]), theta0, float(eta)))
    # tightest gaps first: every later seed inside the capture neighborhood
    # of an already-processed one would converge to the same solution
    seeds.sort(key=lambda s: (s[0], s[2], s[1].real, s[1].imag))
    eta_pad = 50.0 * (hi - lo) / (grid - 1)

    candidates = []
    crossings = []
    unresolved = []
    processed = []
    for gap, theta0, eta0 in seeds:
        if any(abs(theta0 - t) < 0.02 and abs(eta0 - e) < eta_pad * (1.0 + e)
               for e, t in candidates):
            continue
        if any(abs(theta0 - t) < 0.02 and abs(eta0 - e) < eta_pad * (1.0 + e)
               for t, e in processed):
            continue
        processed.append((theta0, eta0))
        theta, mu, size, ok = _ep_newton(theta0, complex(eta0) ** 2, cfg)
        if not ok:
            if gap < 1e-3 * diameter:
                unresolved.append((theta0, eta0, size))
            continue
        if abs(mu.imag) > 1e-8 * (1.0 + abs(mu)) or mu.real < -1e-12:
            if not any(abs(c.mu_solution - mu) < 1e-6 * (1.0 + abs(mu))
                       for c in crossings):
                crossings.append(CrossingRecord(eta_seed=eta0, theta_seed=theta0,
                                                mu_solution=complex(mu)))
            continue
        eta_c = math.sqrt(max(mu.real, 0.0))
        if not lo - 1e-9 <= eta_c <= hi + 1e-9:
            continue
        candidates.append((eta_c, normalize_theta(theta)))

    deduped = []
    for eta_c, theta in sorted(candidates, key=lambda s: (s[0], s[1].real, s[1].imag)):
        if any(abs(eta_c - e) < 1e-6 * (1.0 + e) and abs(theta - t) < 1e-6
               for e, t in deduped):
            continue
        deduped.append((eta_c, theta))

    records = []
    for eta_c, theta in deduped:
        at_c = cfg.with_eta(eta_c)
        resF = abs(secular_residual(theta, at_c))
        resdF = abs(secular_dtheta(theta, at_c))
        energy = complex(2.0 * cfg.t * np.cos(theta))
        flags = []
        if abs(energy.imag) > 1e-8 * (1.0 + abs(energy)):
            flags.append("complex-sector")
        rec = EPRecord(eta_c=eta_c, theta_c=theta, energy_c=energy,
                       order=2, residuals=EPResiduals(F=resF, dF=resdF),
                       flags=tuple(flags))
        order, ambiguous = _estimate_order(cfg, rec, diameter)
        if ambiguous:
            flags.append("order-ambiguous")
        records.append(EPRecord(eta_c=eta_c, theta_c=theta, energy_c=energy,
                                order=order, residuals=rec.residuals,
                                flags=tuple(flags)))

    for theta0, eta0, size in unresolved:
        theta = normalize_theta(theta0)
        if any(abs(eta0 - r.eta_c) < 1e-4 * (1.0 + r.eta_c) and abs(theta - r.theta_c) < 1e-3
               for r in records):
            continue
        records.append(EPRecord(eta_c=eta0, theta_c=theta,
                                energy_c=complex(2.0 * cfg.t * np.cos(theta)),
                                order=0, residuals=EPResiduals(math.inf, math.inf),
                                flags=("unresolved",)))

    # merge order: couplings equal to solver accuracy sort as equal, then theta
    records.sort(key=lambda r: (round(r.eta_c, 9), r.theta_c.real, r.theta_c.imag))
    if return_crossings:
        return records, crossings
    return records


def _estimate_order(cfg: ChainConfig, ep: EPRecord, diameter: float | None = None):
    """Order by two routes: (a) count of eigenvalues collapsed onto the
    critical energy, (b) the branch exponent read off the splitting just
    above the critical coupling, which scales like (eta - eta_c)^{1/p}.
    Returns (order, ambiguous_flag)."""
    E_at = np.linalg.eigvals(build_hamiltonian(cfg.with_eta(ep.eta_c)))
    if diameter is None:
        diameter = float(np.max(np.abs(E_at[:, None] - E_at[None, :])))
    radius = max(1e-3 * diameter, 1e-8)
    close = np.abs(E_at - ep.energy_c) < radius
    p_count = max(int(np.sum(close)), 2)

    deltas = np.geomspace(1e-4, 1e-2, 6) * max(1.0, ep.eta_c)
    spreads = []
    for d in deltas:
        E = np.linalg.eigvals(build_hamiltonian(cfg.with_eta(ep.eta_c + d)))
        nearest = np.sort(np.abs(E - ep.energy_c))[:p_count]
        spreads.append(max(float(nearest[-1]), 1e-300))
    slope = float(np.polyfit(np.log(deltas), np.log(spreads), 1)[0])
    ambiguous = abs(slope - 1.0 / p_count) > 0.25
    return p_count, ambiguous


def estimate_ep_order(cfg: ChainConfig, ep: EPRecord) -> int:
    """Coalescence order of a detected exceptional point (count of merging
    eigenvalues, cross-checked against the splitting exponent)."""
    order, _ = _estimate_order(cfg, ep)
    return order


# ---------------------------------------------------------------------------
# closed forms around the end-to-end critical point and at large coupling
# ---------------------------------------------------------------------------

def ep_perturbation_theta(N: int, eta: float):
    """Branch pseudo-momenta near the end-to-end critical coupling:

        theta_pm = pi/2 +- i sqrt((eta^2 - 1) / (2 N))

    Real and symmetric about pi/2 below the critical coupling, complex
    conjugates above it.  Scope: end-to-end contacts, even N, |eta-1| <= 0.5.
    """
    if int(N) != N or N < 2 or N % 2:
        raise DomainError(f"the expansion applies to even N >= 2, got N={N}")
    if abs(eta - 1.0) > 0.5:
        raise DomainError(f"the expansion is local to the critical coupling, got eta={eta}")
    s = complex(np.sqrt(complex(eta ** 2 - 1.0) / (2.0 * N)))
    return complex(math.pi / 2.0 + 1j * s), complex(math.pi / 2.0 - 1j * s)


def ep_perturbation_energy(N: int, eta: float):
    """Branch energies near the end-to-end critical coupling:

        E_pm = -+ 2 i sinh(sqrt((eta^2 - 1) / (2 N)))

    a conjugate pair above the critical coupling, a real symmetric pair
    below it."""
    if int(N) != N or N < 2 or N % 2:
        raise DomainError(f"the expansion applies to even N >= 2, got N={N}")
    if abs(eta - 1.0) > 0.5:
        raise DomainError(f"the expansion is local to the critical coupling, got eta={eta}")
    s = complex(np.sqrt(complex(eta ** 2 - 1.0) / (2.0 * N)))
    e = complex(2j * np.sinh(s))
    return -e, e


def asymptotic_imaginary_energies(eta: float):
    """The two purely imaginary energies in the deep-broken regime,
    +- i (eta - 1/eta); independent of the contact position.  Enforced
    range eta >= 5."""
    if eta < 5.0:
        raise DomainError(f"asymptotic form requires eta >= 5, got eta={eta}")
    return complex(0.0, eta - 1.0 / eta), complex(0.0, -(eta - 1.0 / eta))


def asymptotic_real_thetas(N: int, k: int):
    """Large-coupling pseudo-momenta of the real sector: the inner chain grid
    {r pi / (N - 2k + 1)} and the double roots {r pi / k} of the two detached
    edge segments.  Together with the imaginary pair these account for all N
    states: (N - 2k) + 2 (k - 1) + 2 = N."""
    if int(N) != N or N < 2:
        raise ConfigurationError(f"chain length must be an integer >= 2, got N={N}")
    if int(k) != k or not 1 <= k <= N // 2:
        raise ConfigurationError(f"gain site must satisfy 1 <= k <= floor(N/2), got k={k}")
    inner = [r * math.pi / (N - 2 * k + 1) for r in range(1, N - 2 * k + 1)]
    double = [r * math.pi / k for r in range(1, k)]
    return inner, double
