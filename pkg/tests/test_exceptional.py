import math

import numpy as np
import pytest

from ptchain import (ChainConfig, ConfigurationError, DomainError,
                     asymptotic_imaginary_energies, asymptotic_real_thetas,
                     ep_perturbation_energy, ep_perturbation_theta,
                     estimate_ep_order, find_exceptional_points,
                     secular_dtheta, secular_residual, solve_spectrum)


def test_single_end_to_end_critical_point():
    records = find_exceptional_points(ChainConfig(10, 1), (0.0, 5.0), grid=2000)
    assert len(records) == 1
    r = records[0]
    assert abs(r.eta_c - 1.0) <= 1e-6
    assert abs(r.theta_c - math.pi / 2) <= 1e-6
    assert r.order == 2
    assert r.flags == ()


def test_two_critical_points_below_one_for_k2():
    records = find_exceptional_points(ChainConfig(10, 2), (0.0, 5.0), grid=2000)
    real_sector = [r for r in records if "complex-sector" not in r.flags]
    assert len(real_sector) == 2
    assert all(r.eta_c < 1.0 for r in real_sector)
    # the two emerge at the same coupling with mirror-symmetric momenta
    assert abs(real_sector[0].eta_c - real_sector[1].eta_c) < 1e-9
    assert abs(real_sector[0].theta_c + real_sector[1].theta_c - math.pi) < 1e-8


def test_complex_sector_coalescence_flagged():
    records = find_exceptional_points(ChainConfig(10, 2), (0.0, 5.0), grid=2000)
    complex_sector = [r for r in records if "complex-sector" in r.flags]
    assert len(complex_sector) == 2
    assert all(r.eta_c > 2.0 for r in complex_sector)
    assert all(abs(r.energy_c.real) < 1e-8 for r in complex_sector)
    # merged pair energies are conjugate
    e1, e2 = (r.energy_c for r in complex_sector)
    assert abs(e1 - np.conj(e2)) < 1e-8


def test_double_root_conditions_hold_on_every_record():
    for k in (1, 2, 3):
        for rec in find_exceptional_points(ChainConfig(10, k), (0.0, 5.0), grid=1000):
            cfg = ChainConfig(10, k, 1.0, rec.eta_c)
            assert abs(secular_residual(rec.theta_c, cfg)) <= 1e-9
            assert abs(secular_dtheta(rec.theta_c, cfg)) <= 1e-9
            assert rec.residuals.F <= 1e-9 and rec.residuals.dF <= 1e-9


def test_one_conjugate_pair_emerges_past_the_critical_point():
    records = find_exceptional_points(ChainConfig(10, 1), (0.5, 1.5), grid=500)
    eta_c = records[0].eta_c
    s = solve_spectrum(ChainConfig(10, 1, 1.0, eta_c + 0.01))
    assert len(s.conjugate_pairing) == 1
    i, j = s.conjugate_pairing[0]
    assert abs(s.pairs[i].energy.imag + s.pairs[j].energy.imag) <= 1e-9


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        find_exceptional_points(ChainConfig(10, 1), (0.0, 5.0), grid=50)
    with pytest.raises(ConfigurationError):
        find_exceptional_points(ChainConfig(10, 1), (3.0, 1.0), grid=500)


def test_order_estimate_square_root_branch():
    records = find_exceptional_points(ChainConfig(10, 1), (0.5, 1.5), grid=500)
    rec = records[0]
    assert estimate_ep_order(ChainConfig(10, 1), rec) == 2
    # read the branch exponent directly: splitting ~ (eta - eta_c)^(1/2)
    deltas = np.geomspace(1e-4, 1e-2, 6)
    spreads = []
    for d in deltas:
        E = solve_spectrum(ChainConfig(10, 1, 1.0, rec.eta_c + d)).energies
        spreads.append(np.max(np.abs(E - rec.energy_c)[np.abs(E - rec.energy_c) < 0.5]))
    slope = np.polyfit(np.log(deltas), np.log(spreads), 1)[0]
    assert abs(slope - 0.5) <= 0.05


def test_perturbation_theta_at_and_below_threshold():
    plus, minus = ep_perturbation_theta(10, 1.0)
    assert plus == pytest.approx(math.pi / 2, abs=1e-14)
    assert minus == pytest.approx(math.pi / 2, abs=1e-14)
    plus, minus = ep_perturbation_theta(10, 0.9)
    assert plus.imag == 0.0 and minus.imag == 0.0
    assert plus.real + minus.real == pytest.approx(math.pi, abs=1e-12)


def test_perturbation_energy_structure():
    ep, em = ep_perturbation_energy(10, 1.0)
    assert ep == 0 and em == 0
    ep, em = ep_perturbation_energy(10, 1.2)
    assert ep == pytest.approx(np.conj(em), abs=1e-15)
    assert ep.real == pytest.approx(0.0, abs=1e-15)
    ep, em = ep_perturbation_energy(10, 0.9)
    assert ep.imag == 0.0 and em.imag == 0.0


def test_perturbation_scope_enforced():
    with pytest.raises(DomainError):
        ep_perturbation_theta(11, 1.1)
    with pytest.raises(DomainError):
        ep_perturbation_theta(10, 1.6)
    with pytest.raises(DomainError):
        ep_perturbation_energy(9, 1.0)


def test_perturbative_energy_error_shrinks_toward_critical_point():
    # leading-order agreement improves at least linearly in eta^2 - 1,
    # measured against the half-bandwidth energy scale
    errors = {}
    for eta in (1.2, 1.1, 1.05, 1.02, 1.01):
        s = solve_spectrum(ChainConfig(10, 1, 1.0, eta))
        measured = max(p.energy.imag for p in s.pairs)
        predicted = max(e.imag for e in ep_perturbation_energy(10, eta))
        errors[eta] = abs(measured - predicted) / 2.0
    seq = [errors[e] for e in (1.2, 1.1, 1.05, 1.02, 1.01)]
    assert all(a > b for a, b in zip(seq, seq[1:]))
    # at-least-linear shrink in eta^2 - 1: the coupling shrinks by a factor
    # (1.2^2-1)/(1.01^2-1) = 21.9, so the error must shrink at least ~linearly
    assert errors[1.2] / errors[1.01] > 10.0


def test_crossings_reported_separately():
    records, crossings = find_exceptional_points(
        ChainConfig(16, 4), (0.0, 5.0), grid=800, return_crossings=True)
    assert all("unresolved" not in r.flags for r in records)
    assert crossings, "this configuration has avoided crossings in range"
    for c in crossings:
        assert abs(c.mu_solution.imag) > 1e-8 * (1 + abs(c.mu_solution))


def test_asymptotic_imaginary_pair():
    ep, em = asymptotic_imaginary_energies(10.0)
    assert ep == pytest.approx(9.9j, abs=1e-12)
    assert em == pytest.approx(-9.9j, abs=1e-12)
    with pytest.raises(DomainError):
        asymptotic_imaginary_energies(4.0)


def test_asymptotic_imaginary_pair_matches_numerics_any_contact():
    for k in range(1, 6):
        s = solve_spectrum(ChainConfig(10, k, 1.0, 100.0))
        top = max(np.abs(s.energies.imag))
        assert top == pytest.approx(100.0 - 0.01, rel=1e-3)


def test_asymptotic_real_momenta_partition():
    inner, double = asymptotic_real_thetas(10, 2)
    assert np.allclose(inner, [r * math.pi / 7 for r in range(1, 7)])
    assert np.allclose(double, [math.pi / 2])
    assert len(inner) + 2 * len(double) + 2 == 10

    inner, double = asymptotic_real_thetas(10, 1)
    assert np.allclose(inner, [r * math.pi / 9 for r in range(1, 9)])
    assert double == []
    with pytest.raises(ConfigurationError):
        asymptotic_real_thetas(10, 7)


def test_real_parts_cluster_at_detached_chain_momenta():
    N, k, eta = 23, 6, 500.0
    s = solve_spectrum(ChainConfig(N, k, 1.0, eta))
    inner, double = asymptotic_real_thetas(N, k)
    targets = sorted(2 * math.cos(th) for th in inner + double + double)
    finite = sorted(p.energy.real for p in s.pairs
                    if abs(p.energy.imag) < eta / 2)
    assert len(finite) == len(targets)
    assert np.allclose(finite, targets, atol=1e-2)


def test_spectral_count_conserved_across_critical_point():
    for eta in (0.95, 1.0, 1.05):
        s = solve_spectrum(ChainConfig(10, 5, 1.0, eta))
        assert len(s.pairs) == 10
