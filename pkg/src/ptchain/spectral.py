"""Spectrum and eigenvectors of the gain/loss chain.

Two independent routes are implemented and cross-checked everywhere: the
transcendental secular equation in the complex pseudo-momentum theta (with
energies E = 2 t cos(theta) and Newton polishing of the roots), and a dense
non-symmetric eigensolver used both as seed generator and as an oracle.

Internally the gain strength always enters through eta/t: dividing the
eigenproblem by t maps the chain onto the unit-hopping chain with coupling
eta/t and energies E/t, so every closed form below is written in that
reduced coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .chain import ChainConfig, build_hamiltonian
from .errors import DenseSolverError, DomainError

_TRIVIAL_SIN_FLOOR = 1e-14

TAG_GENERIC = "Generic"
TAG_OPAQUE = "Opaque"
TAG_TRANSPARENT = "Transparent"


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and guards for the spectrum pipeline."""

    secular_tol: float = 1e-11
    eigen_tol: float = 1e-9
    max_newton_iters: int = 50
    ep_guard_radius: float = 1e-6


@dataclass(frozen=True)
class Residuals:
    secular: float
    eigen: float


@dataclass(frozen=True)
class EigenPair:
    """One eigenstate: pseudo-momentum, energy E = 2 t cos(theta), unit-norm
    site amplitudes, special-state tag, and both quality residuals."""

    theta: complex
    energy: complex
    vector: np.ndarray
    tag: str = TAG_GENERIC
    residuals: Residuals = field(default_factory=lambda: Residuals(0.0, 0.0))
    flags: tuple = ()


@dataclass(frozen=True)
class Spectrum:
    """All N eigenpairs of a configuration, sorted by (Re E, Im E), plus the
    index pairs (i, j) matching each complex energy with its conjugate."""

    config: ChainConfig
    pairs: tuple
    conjugate_pairing: tuple

    @property
    def energies(self) -> np.ndarray:
        return np.array([p.energy for p in self.pairs])

    @property
    def thetas(self) -> np.ndarray:
        return np.array([p.theta for p in self.pairs])


# ---------------------------------------------------------------------------
# secular equation and its derivatives
# ---------------------------------------------------------------------------

def _check_theta(theta: complex) -> complex:
    theta = complex(theta)
    if abs(np.sin(theta)) <= _TRIVIAL_SIN_FLOOR:
        raise DomainError(f"theta = {theta} is at (or too close to) a trivial point m*pi")
    return theta


def secular_residual(theta: complex, cfg: ChainConfig) -> complex:
    """Secular function F(theta) whose non-trivial zeros are the chain's
    pseudo-momenta:

        F = sin((N+1) theta) + (eta/t)^2 sin((N-2k+1) theta) sin^2(k theta) / sin^2(theta)
    """
    theta = _check_theta(theta)
    N, k = cfg.N, cfg.k
    g2 = (cfg.eta / cfg.t) ** 2
    s = np.sin(theta)
    return complex(np.sin((N + 1) * theta)
                   + g2 * np.sin((N - 2 * k + 1) * theta) * np.sin(k * theta) ** 2 / s ** 2)


def secular_scale(theta: complex, cfg: ChainConfig) -> float:
    """Magnitude scale of the secular function's terms, used to turn absolute
    residuals into relative ones (the terms grow like e^{(N+1)|Im theta|})."""
    theta = _check_theta(theta)
    N, k = cfg.N, cfg.k
    g2 = (cfg.eta / cfg.t) ** 2
    s = np.sin(theta)
    return float(1.0 + abs(np.sin((N + 1) * theta))
                 + abs(g2 * np.sin((N - 2 * k + 1) * theta) * np.sin(k * theta) ** 2 / s ** 2))


def _coupling_parts(theta, N, k):
    """Value and first two theta-derivatives of
    P = sin((N-2k+1) theta) sin^2(k theta) / sin^2(theta)."""
    A = N - 2 * k + 1
    s, c = np.sin(theta), np.cos(theta)
    u, du, d2u = np.sin(A * theta), A * np.cos(A * theta), -A * A * np.sin(A * theta)
    v, dv, d2v = np.sin(k * theta) ** 2, k * np.sin(2 * k * theta), 2 * k * k * np.cos(2 * k * theta)
    w = s ** -2.0
    dw = -2.0 * c * s ** -3.0
    d2w = 2.0 * s ** -2.0 + 6.0 * c * c * s ** -4.0
    P = u * v * w
    dP = du * v * w + u * dv * w + u * v * dw
    d2P = (d2u * v * w + u * d2v * w + u * v * d2w
           + 2.0 * (du * dv * w + du * v * dw + u * dv * dw))
    return P, dP, d2P


def secular_dtheta(theta: complex, cfg: ChainConfig) -> complex:
    """Analytic d F / d theta (checked against central differences in tests)."""
    theta = _check_theta(theta)
    N, k = cfg.N, cfg.k
    g2 = (cfg.eta / cfg.t) ** 2
    _, dP, _ = _coupling_parts(theta, N, k)
    return complex((N + 1) * np.cos((N + 1) * theta) + g2 * dP)


def secular_d2theta(theta: complex, cfg: ChainConfig) -> complex:
    """Analytic d^2 F / d theta^2, needed for coalescence refinement."""
    theta = _check_theta(theta)
    N, k = cfg.N, cfg.k
    g2 = (cfg.eta / cfg.t) ** 2
    _, _, d2P = _coupling_parts(theta, N, k)
    return complex(-(N + 1) ** 2 * np.sin((N + 1) * theta) + g2 * d2P)


def secular_deta2(theta: complex, cfg: ChainConfig) -> complex:
    """d F / d(eta^2); F is affine in eta^2 so this is P(theta) / t^2."""
    theta = _check_theta(theta)
    P, _, _ = _coupling_parts(theta, cfg.N, cfg.k)
    return complex(P / cfg.t ** 2)


def secular_dtheta_deta2(theta: complex, cfg: ChainConfig) -> complex:
    """Mixed derivative d^2 F / d theta d(eta^2) = P'(theta) / t^2."""
    theta = _check_theta(theta)
    _, dP, _ = _coupling_parts(theta, cfg.N, cfg.k)
    return complex(dP / cfg.t ** 2)


# ---------------------------------------------------------------------------
# theta branch handling
# ---------------------------------------------------------------------------

def normalize_theta(theta: complex) -> complex:
    """Map theta to the canonical strip Re(theta) in (0, pi).

    The secular function is 2*pi-periodic and shares its root set under
    theta -> 2*pi - theta (same energy), so every root has exactly one
    representative in the strip.
    """
    theta = complex(theta)
    x = theta.real % (2.0 * math.pi)
    y = theta.imag
    if x > math.pi:
        x = 2.0 * math.pi - x
        y = -y
    return complex(x, y)


def theta_from_energy(energy: complex, cfg: ChainConfig) -> complex:
    """Invert E = 2 t cos(theta) into the canonical strip."""
    z = np.asarray(complex(energy) / (2.0 * cfg.t), dtype=complex)
    return normalize_theta(complex(np.arccos(z)))


def polish_theta(theta: complex, cfg: ChainConfig, opts: SolverOptions | None = None):
    """Damped Newton iteration of theta on the secular function.

    Returns ``(theta, relative_residual, converged)``.  Convergence is judged
    on the residual relative to the term scale, which keeps the criterion
    meaningful for strongly complex theta where the terms are exponentially
    large.
    """
    opts = opts or SolverOptions()
    theta = complex(theta)
    f = secular_residual(theta, cfg)
    rel = abs(f) / secular_scale(theta, cfg)
    for _ in range(opts.max_newton_iters):
        # iterate to the rounding floor, not just to the acceptance
        # tolerance: near a coalescence the root error is the residual
        # divided by an almost-vanishing derivative, so every spare digit
        # of residual buys accuracy where it is scarcest
        if rel <= 1e-15:
            break
        d = secular_dtheta(theta, cfg)
        if d == 0:
            break
        step = f / d
        # halve the step until the residual decreases
        accepted = False
        for _half in range(12):
            cand = theta - step
            if abs(np.sin(cand)) <= _TRIVIAL_SIN_FLOOR:
                step *= 0.5
                continue
            fc = secular_residual(cand, cfg)
            relc = abs(fc) / secular_scale(cand, cfg)
            if relc < rel:
                theta, f, rel = cand, fc, relc
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
    return theta, rel, rel <= opts.secular_tol


# ---------------------------------------------------------------------------
# closed-form eigenvectors
# ---------------------------------------------------------------------------

def _scaled_sin(m, theta, damp):
    """sin(m*theta) * exp(-m*damp) for damp = |Im theta|, overflow-safe:
    both exponentials in the sine have non-positive real exponent."""
    z = 1j * np.multiply(m, theta)
    md = np.multiply(m, damp)
    return (np.exp(z - md) - np.exp(-z - md)) / 2j


def _site_brackets_scaled(theta: complex, N: int, k: int, g: float) -> np.ndarray:
    """Scaled site amplitudes b[j-1] = u_j(theta) * exp(-j |Im theta|) in the
    gauge u_1 = sin(theta), for reduced coupling g = eta/t.

    The three pieces are the free standing wave, the correction switched on
    past the gain site, and the correction switched on past the loss site.
    Every term carries exactly the exp(-j |Im theta|) damping, so the array
    stays bounded for any N and Im theta.
    """
    y = abs(theta.imag)
    e = math.exp(-y)
    sy = _scaled_sin(1, theta, y)           # sin(theta) e^{-y}
    j = np.arange(1, N + 1)
    b = _scaled_sin(j, theta, y)
    past_gain = j >= k + 1
    if np.any(past_gain):
        jj = j[past_gain]
        b[past_gain] += (-1j * g) * _scaled_sin(k, theta, y) \
            * _scaled_sin(jj - k, theta, y) / sy * e
    past_loss = j >= N - k + 2
    if np.any(past_loss):
        jj = j[past_loss]
        m = jj - N + k - 1
        inner = (1j * g * _scaled_sin(N - k + 1, theta, y)
                 + g * g * _scaled_sin(N - 2 * k + 1, theta, y)
                 * _scaled_sin(k, theta, y) / sy * e)
        b[past_loss] += _scaled_sin(m, theta, y) * inner / sy * e
    return b


def anchor_phase(u: np.ndarray) -> np.ndarray:
    """Deterministic global phase: the first within-rounding-of-largest
    component is made real positive.  Anchoring on the first near-maximal
    entry (not a bare argmax) keeps the choice stable when several
    components tie in magnitude up to rounding."""
    mags = np.abs(u)
    m = int(np.argmax(mags >= (1.0 - 1e-9) * mags.max()))
    return u / (u[m] / mags[m])


def _two_anchor_assembly(theta: complex, N: int, k: int, g: float):
    """Log-magnitudes and phases of the eigenvector components, assembled
    from closed forms anchored at both chain ends.

    The form anchored at site 1 loses all relative accuracy in the
    exponentially small tail beyond the localization peak of a strongly
    broken state (its absolute rounding noise grows with the term scale),
    so sites past the healthiest common site are taken from the mirror
    chain's form anchored at site N.  Returns (logmag, phase) in a common
    gauge; magnitudes are handled in logs and never overflow.
    """
    y = abs(theta.imag)
    b = _site_brackets_scaled(theta, N, k, g)            # u_j e^{-j y}
    w = _site_brackets_scaled(theta, N, k, -g)[::-1]     # w_j e^{-(N+1-j) y}
    j = np.arange(1, N + 1)
    with np.errstate(divide="ignore"):
        lu = np.log(np.abs(b)) + j * y
        lw = np.log(np.abs(w)) + (N + 1 - j) * y
    m = int(np.argmax(np.minimum(np.abs(b), np.abs(w))))
    if min(abs(b[m]), abs(w[m])) == 0.0:
        # fully degenerate case: fall back to the single-anchor form
        phase = np.where(np.abs(b) > 0, b / np.where(np.abs(b) > 0, np.abs(b), 1.0), 1.0)
        return lu, phase, m
    offset = lu[m] - lw[m]
    phase_align = (b[m] / abs(b[m])) / (w[m] / abs(w[m]))
    logmag = np.where(j <= m + 1, lu, lw + offset)
    phase = np.ones(N, dtype=complex)
    left = j <= m + 1
    bz = np.abs(b) > 0
    wz = np.abs(w) > 0
    phase[left & bz] = (b / np.abs(np.where(bz, b, 1.0)))[left & bz]
    right = ~left
    phase[right & wz] = (w / np.abs(np.where(wz, w, 1.0)) * phase_align)[right & wz]
    return logmag, phase, m


def eigenvector_analytic(theta: complex, cfg: ChainConfig, *,
                         residual_check: bool = True,
                         check_tol: float = 1e-6) -> np.ndarray:
    """Closed-form eigenvector for a secular root theta, unit-normalized with
    the phase fixed by making the largest-magnitude component real positive.

    Raises DomainError when theta is trivial or (with ``residual_check``)
    when it is not actually a root to within ``check_tol`` relative.
    """
    theta = _check_theta(theta)
    if residual_check:
        rel = abs(secular_residual(theta, cfg)) / secular_scale(theta, cfg)
        if rel > check_tol:
            raise DomainError(
                f"theta = {theta} is not a secular root (relative residual {rel:.3e})")
    logmag, phase, _ = _two_anchor_assembly(theta, cfg.N, cfg.k, cfg.eta / cfg.t)
    peak = float(np.max(logmag))
    u = np.exp(logmag - peak) * phase
    u /= np.linalg.norm(u)
    return anchor_phase(u)


# ---------------------------------------------------------------------------
# dense oracle
# ---------------------------------------------------------------------------

def dense_eigensolve(H: np.ndarray, residual_tol: float = 1e-10):
    """Full non-symmetric eigendecomposition via LAPACK, sorted by
    (Re E, Im E).  Returns a list of (energy, unit eigenvector) tuples and
    verifies every residual ||H v - E v|| <= residual_tol."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DenseSolverError(f"expected a square matrix, got shape {H.shape}")
    try:
        values, vectors = scipy.linalg.eig(H)
    except scipy.linalg.LinAlgError as exc:
        raise DenseSolverError(f"dense eigensolver failed: {exc}") from exc
    order = np.lexsort((values.imag, values.real))
    out = []
    for i in order:
        v = vectors[:, i]
        v = v / np.linalg.norm(v)
        res = float(np.linalg.norm(H @ v - values[i] * v))
        if res > residual_tol:
            raise DenseSolverError(
                f"eigenpair residual {res:.3e} exceeds {residual_tol:.1e} "
                f"for eigenvalue {values[i]}")
        out.append((complex(values[i]), v))
    return out


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------

def _pair_conjugates(energies: np.ndarray, tol: float = 1e-9):
    """Index pairs (i, j), i < j, matching complex energies with their
    conjugates through an optimal assignment."""
    idx = [i for i, e in enumerate(energies) if abs(e.imag) > tol]
    if not idx:
        return ()
    sub = energies[idx]
    cost = np.abs(sub[:, None] - np.conj(sub)[None, :])
    rows, cols = linear_sum_assignment(cost)
    seen = set()
    pairs = []
    for r, c in zip(rows, cols):
        i, j = idx[r], idx[c]
        if i == j or (j, i) in seen:
            continue
        seen.add((i, j))
        pairs.append((min(i, j), max(i, j)))
    return tuple(sorted(set(pairs)))


def solve_spectrum(cfg: ChainConfig, opts: SolverOptions | None = None) -> Spectrum:
    """Compute all N eigenpairs of the chain.

    Pipeline: dense eigensolve for seed energies; pin the coupling-
    independent census states to their exact rational-multiple-of-pi
    momenta; map the remaining seeds into the canonical theta strip and
    Newton-polish them on the secular function; evaluate the closed-form
    eigenvectors; tag against the census; canonicalize every conjugate pair
    (the member with Im theta >= 0 is primary, its partner carries the
    exact conjugate).  Pairs whose polish failed or collided (near a
    coalescence) fall back to the dense seed and carry an explanatory flag.
    """
    from .classify import special_state_census, match_census_tag

    opts = opts or SolverOptions()
    H = build_hamiltonian(cfg)
    dense = dense_eigensolve(H)
    census = special_state_census(cfg.N, cfg.k)

    # the census momenta are exact roots for every coupling: assign each to
    # its nearest seed up front, so that a crossing or coalescence riding on
    # top of one cannot blur it.  The tolerance covers the dense solver's
    # eps^(1/p) accuracy at a p-fold defective eigenvalue (about 1e-5 for a
    # third-order coalescence) while staying below half a level spacing.
    census_theta = np.concatenate([census.opaque_values(),
                                   census.transparent_values()])
    claims = {}
    taken = set()
    for theta_c in np.sort(census_theta):
        target = 2.0 * cfg.t * math.cos(theta_c)
        order = np.argsort([abs(e - target) for e, _ in dense])
        for idx in order:
            if idx in taken:
                continue
            if abs(dense[idx][0] - target) < 1e-3 * (1.0 + abs(target)):
                claims[int(idx)] = float(theta_c)
                taken.add(int(idx))
            break

    polished = []
    merged_companions = set()
    for i, (energy, vec) in enumerate(dense):
        if i in claims:
            polished.append((complex(claims[i]), (), energy, vec))
            continue
        theta0 = theta_from_energy(energy, cfg)
        flags = []
        if abs(np.sin(theta0)) <= 1e-8:
            polished.append((theta0, ("trivial-adjacent",), energy, vec))
            continue
        theta, rel, ok = polish_theta(theta0, cfg, opts)
        if not ok:
            theta = theta0
            flags.append("newton-fallback")
        theta = normalize_theta(theta)
        # reality is exact physics in the unbroken sector: an imaginary part
        # below the resolution of a defective cluster is rounding noise
        if 0.0 < abs(theta.imag) < 1e-8:
            theta = complex(theta.real)
        # a non-census root this close to a pinned census momentum is
        # numerically indistinguishable from a multiple root sitting exactly
        # on it (a genuine splitting near even a third-order coalescence is
        # orders of magnitude wider); report the coalescence
        for theta_c in claims.values():
            if abs(theta - theta_c) < 2e-5:
                theta = complex(theta_c)
                flags.append("coalesced")
                merged_companions.add(len(polished))
                break
        polished.append((theta, tuple(flags), energy, vec))

    # inside the guard radius of a coalescence plain Newton degrades (the
    # derivative vanishes) and distinct seeds may collapse onto one root;
    # keep the dense-derived momenta there and say so.  Census-pinned and
    # deliberately coalesced states are exempt.
    protected = merged_companions | set(claims)
    guarded = []
    for i, (theta, flags, energy, vec) in enumerate(polished):
        if i in protected:
            guarded.append((theta, flags, energy, vec))
            continue
        seed_i = theta_from_energy(energy, cfg)
        collided = any(
            j != i and j not in protected
            and abs(theta - polished[j][0]) < opts.ep_guard_radius
            and abs(seed_i - theta_from_energy(polished[j][2], cfg))
            > 0.1 * opts.ep_guard_radius
            for j in range(len(polished)))
        if collided:
            guarded.append((seed_i, flags + ("near-coalescence",), energy, vec))
        else:
            guarded.append((theta, flags, energy, vec))

    # at an exact coalescence the matrix is defective: the double root is
    # listed once per merged eigenvalue, flagged, with its single eigenvector
    # (no generalized eigenvectors are fabricated)
    for i in range(len(guarded)):
        theta_i = guarded[i][0]
        if any(j != i and abs(theta_i - guarded[j][0]) < 1e-9 for j in range(len(guarded))):
            t, f, e, v = guarded[i]
            if "coalesced" not in f:
                guarded[i] = (t, f + ("coalesced",), e, v)

    pairs = []
    for idx, (theta, flags, seed_energy, seed_vec) in enumerate(guarded):
        energy = complex(2.0 * cfg.t * np.cos(theta))
        try:
            vector = eigenvector_analytic(theta, cfg, residual_check=False)
        except DomainError:
            vector = seed_vec / np.linalg.norm(seed_vec)
            flags = flags + ("dense-vector",)
        sec = abs(secular_residual(theta, cfg)) / secular_scale(theta, cfg) \
            if abs(np.sin(theta)) > _TRIVIAL_SIN_FLOOR else math.inf
        eig = float(np.linalg.norm(H @ vector - energy * vector))
        if eig > opts.eigen_tol and "residual-above-tol" not in flags:
            flags = flags + ("residual-above-tol",)
        # a defective copy merged onto a census momentum is not an extra
        # special state; exactly one state carries each census tag
        if idx in merged_companions:
            tag = TAG_GENERIC
        else:
            tag = match_census_tag(theta, vector, census)
        pairs.append(EigenPair(theta=theta, energy=energy, vector=vector, tag=tag,
                               residuals=Residuals(secular=float(sec), eigen=eig),
                               flags=flags))

    # canonical conjugate form: energies of a pair are exact conjugates,
    # with the primary member carrying Im theta >= 0
    pairing = _pair_conjugates(np.array([p.energy for p in pairs]))
    for i, j in pairing:
        a, b = (i, j) if pairs[i].theta.imag >= pairs[j].theta.imag else (j, i)
        theta_b = complex(np.conj(pairs[a].theta))
        energy_b = complex(2.0 * cfg.t * np.cos(theta_b))
        try:
            vector_b = eigenvector_analytic(theta_b, cfg, residual_check=False)
        except DomainError:
            continue
        sec_b = abs(secular_residual(theta_b, cfg)) / secular_scale(theta_b, cfg)
        eig_b = float(np.linalg.norm(H @ vector_b - energy_b * vector_b))
        pairs[b] = EigenPair(theta=theta_b, energy=energy_b, vector=vector_b,
                             tag=match_census_tag(theta_b, vector_b, census),
                             residuals=Residuals(secular=float(sec_b), eigen=eig_b),
                             flags=pairs[b].flags)

    pairs.sort(key=lambda p: (p.energy.real, p.energy.imag))
    energies = np.array([p.energy for p in pairs])
    pairing = _pair_conjugates(energies)
    return Spectrum(config=cfg, pairs=tuple(pairs), conjugate_pairing=pairing)
