import json
import math
from fractions import Fraction

import numpy as np
import pytest

from ptchain import (ChainConfig, ClassificationError, ConfigurationError,
                     classify_eigenpair, count_special_states, opaque_thetas,
                     secular_residual, solve_spectrum, special_state_census,
                     transparent_thetas)
from ptchain.classify import (opaque_thetas_divisors,
                              transparent_thetas_divisors)
from ptchain.transport import eigenstate_transport_coefficient


def test_opaque_grid_n23():
    assert opaque_thetas(23, 8) == [Fraction(r, 8) for r in range(1, 8)]
    assert opaque_thetas(23, 6) == sorted(Fraction(r, 6) for r in range(1, 6))
    assert opaque_thetas(23, 2) == [Fraction(1, 2)]


def test_no_opaque_states_when_length_plus_one_is_prime():
    for k in range(1, 6):
        assert opaque_thetas(10, k) == []


def test_transparent_grid_n23():
    assert transparent_thetas(23, 6) == sorted(Fraction(r, 12) for r in (1, 3, 5, 7, 9, 11))
    assert transparent_thetas(23, 1) == [Fraction(1, 2)]
    assert transparent_thetas(23, 8) == []
    assert transparent_thetas(23, 2) == [Fraction(1, 4), Fraction(3, 4)]


def test_counts_match_quoted_configurations():
    assert count_special_states(23, 8) == (7, 0)
    assert count_special_states(23, 6) == (5, 6)
    assert count_special_states(23, 2) == (1, 2)
    assert count_special_states(23, 1) == (0, 1)
    assert count_special_states(839, 280) == (279, 0)
    assert count_special_states(839, 210) == (209, 210)
    for k in range(1, 420, 13):
        assert count_special_states(838, k) == (0, 0)


def test_gcd_closed_forms_equal_divisor_unions():
    for N in range(2, 61):
        for k in range(1, N // 2 + 1):
            assert opaque_thetas(N, k) == opaque_thetas_divisors(N, k)
            assert transparent_thetas(N, k) == transparent_thetas_divisors(N, k)
            n_op, n_tr = count_special_states(N, k)
            assert n_op == len(opaque_thetas(N, k))
            assert n_tr == len(transparent_thetas(N, k))


def test_families_are_disjoint():
    for N, k in [(23, 6), (23, 2), (47, 12), (119, 30)]:
        census = special_state_census(N, k)
        assert not set(census.opaque) & set(census.transparent)


def test_half_pi_membership_for_odd_lengths():
    # theta = pi/2 is always a special state for odd N: opaque when the gain
    # site is even, transparent when odd
    for N in (5, 11, 23, 35):
        for k in range(1, N // 2 + 1):
            census = special_state_census(N, k)
            half = Fraction(1, 2)
            if k % 2 == 0:
                assert half in census.opaque
            else:
                assert half in census.transparent


def test_census_thetas_are_coupling_independent_roots():
    for k in range(1, 12):
        census = special_state_census(23, k)
        thetas = list(census.opaque_values()) + list(census.transparent_values())
        for theta in thetas:
            for eta in (0.0, 0.7, 1.0, 3.1, 10.0):
                cfg = ChainConfig(23, k, 1.0, eta)
                assert abs(secular_residual(theta, cfg)) < 1e-10


def test_opaque_states_decouple_transparent_states_conduct():
    census = special_state_census(23, 6)
    from ptchain import eigenvector_analytic
    for eta in (0.4, 1.0, 2.5):
        cfg = ChainConfig(23, 6, 1.0, eta)
        for theta in census.opaque_values():
            u = eigenvector_analytic(theta, cfg)
            assert abs(u[cfg.k - 1]) <= 1e-12
            assert abs(u[cfg.k_loss - 1]) <= 1e-12
        for theta in census.transparent_values():
            xi = eigenstate_transport_coefficient(theta, cfg)
            assert xi == pytest.approx(1.0, abs=1e-10)


def test_classify_solved_pairs():
    # opaque: N=23, k=2 has theta = pi/2 with nodes at both contacts
    s = solve_spectrum(ChainConfig(23, 2, 1.0, 1.3))
    census = special_state_census(23, 2)
    tags = {}
    for p in s.pairs:
        tags.setdefault(classify_eigenpair(p, census), []).append(p)
    assert len(tags.get("Opaque", [])) == 1
    assert abs(tags["Opaque"][0].theta - math.pi / 2) < 1e-8
    assert len(tags.get("Transparent", [])) == 2

    # transparent: the end-to-end N=23 chain conducts through theta = pi/2
    s = solve_spectrum(ChainConfig(23, 1, 1.0, 0.6))
    census = special_state_census(23, 1)
    transparent = [p for p in s.pairs
                   if classify_eigenpair(p, census) == "Transparent"]
    assert len(transparent) == 1
    assert abs(transparent[0].theta - math.pi / 2) < 1e-8

    # prime N+1: everything generic
    s = solve_spectrum(ChainConfig(10, 3, 1.0, 0.5))
    census = special_state_census(10, 3)
    assert all(classify_eigenpair(p, census) == "Generic" for p in s.pairs)


def test_classify_rejects_mismatched_census():
    s = solve_spectrum(ChainConfig(10, 3, 1.0, 0.5))
    census = special_state_census(23, 2)
    with pytest.raises(ConfigurationError):
        classify_eigenpair(s.pairs[0], census)


def test_classification_mismatch_is_loud():
    from ptchain.classify import match_census_tag
    census = special_state_census(23, 2)
    # a vector with large contact amplitudes cannot be the opaque pi/2 state
    fake = np.ones(23) / math.sqrt(23)
    with pytest.raises(ClassificationError):
        match_census_tag(math.pi / 2, fake, census)


def test_census_serialization_round_trip():
    census = special_state_census(23, 6)
    doc = census.to_json_dict()
    blob = json.loads(json.dumps(doc))
    assert blob["N"] == 23 and blob["k"] == 6
    assert [Fraction(r, m) for r, m in blob["opaque"]] == list(census.opaque)
    assert [Fraction(r, m) for r, m in blob["transparent"]] == list(census.transparent)


def test_validation():
    with pytest.raises(ConfigurationError):
        count_special_states(10, 6)
    with pytest.raises(ConfigurationError):
        opaque_thetas(1, 1)
