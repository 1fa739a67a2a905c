import math

import numpy as np
import pytest

from vflux.errors import DegenerateSteadyStateError, UsageError
from vflux.liouvillian import build_generator
from vflux.model import SystemSpec
from vflux.steady import (
    coherence_vanishing_residual,
    evolve,
    steady_state,
    steady_state_resonant_two_bath,
    steady_state_three_terminal,
    steady_state_time_integration,
)

from conftest import BOUND, MAX_BIAS_SPEC, cycle_spec, two_bath_spec

# frozen with 50-digit arithmetic: 1/(1 + 2 e^{-1})
GIBBS_GG = 0.5761168847658291


def test_gibbs_state_at_equilibrium():
    spec = two_bath_spec(tempL=1.0, tempR=1.0)
    ss = steady_state(build_generator(spec))
    assert ss.rhogg == pytest.approx(GIBBS_GG, abs=1e-12)
    assert ss.rho11 == pytest.approx((1.0 - GIBBS_GG) / 2.0, abs=1e-12)
    assert abs(ss.rho12) <= 1e-14
    assert ss.residual <= 1e-10
    assert not ss.positivity_warning


def test_equal_cross_couplings_kill_coherence():
    for factor in (0.25, 0.5, 0.9):
        spec = two_bath_spec(factor * BOUND, factor * BOUND)
        ss = steady_state(build_generator(spec))
        assert abs(ss.rho12) <= 1e-10


def test_numeric_matches_resonant_closed_form():
    ss_num = steady_state(build_generator(MAX_BIAS_SPEC))
    ss_ana = steady_state_resonant_two_bath(MAX_BIAS_SPEC)
    assert np.abs(ss_num.vector - ss_ana.vector).max() <= 1e-10
    assert abs(ss_num.rho12) > 0.01  # the biased configuration sustains coherence


def test_resonant_closed_form_no_interference_reduction():
    spec = two_bath_spec()
    ss = steady_state_resonant_two_bath(spec)
    # no-interference populations: gain/loss products over the norm
    from vflux.model import build_rates

    r = build_rates(spec)
    gp11, gm11 = r.gamma_plus(1, 1, 1), r.gamma_minus(1, 1, 1)
    gp22, gm22 = r.gamma_plus(2, 2, 2), r.gamma_minus(2, 2, 2)
    norm = gm11 * (gm22 + gp22) + gp11 * gm22
    assert ss.rho11 == pytest.approx(gp11 * gm22 / norm, rel=1e-12)
    assert ss.rho22 == pytest.approx(gm11 * gp22 / norm, rel=1e-12)
    assert ss.rhogg == pytest.approx(gm11 * gm22 / norm, rel=1e-12)
    assert ss.rho12 == 0.0


def test_resonant_closed_form_equilibrium_coherence_vanishes():
    spec = two_bath_spec(BOUND, 0.4 * BOUND, tempL=1.3, tempR=1.3)
    ss = steady_state_resonant_two_bath(spec)
    assert abs(ss.rho12) <= 1e-14


def test_resonant_closed_form_preconditions():
    with pytest.raises(UsageError):
        steady_state_resonant_two_bath(cycle_spec())
    detuned = SystemSpec(1.2, 1.0, 2, 1, 1, 0.01, 0.01, 0, 0.01, 0.01, 0, 0)
    with pytest.raises(UsageError):
        steady_state_resonant_two_bath(detuned)


def test_three_terminal_matches_numeric():
    for tm in (0.3, 0.7, 1.5):
        spec = cycle_spec(tm)
        ss_num = steady_state(build_generator(spec))
        ss_ana = steady_state_three_terminal(spec)
        assert np.abs(ss_num.vector - ss_ana.vector).max() <= 1e-10


def test_three_terminal_reduces_to_two_bath_form():
    spec = SystemSpec(1.2, 0.8, 2.0, 1.0, 0.7, 0.012, 0.007, 0.0, 0.009, 0.016, 0.0, 0.0)
    ss = steady_state_three_terminal(spec)
    ss_num = steady_state(build_generator(spec))
    assert np.abs(ss.vector - ss_num.vector).max() <= 1e-12


def test_three_terminal_equilibrium_is_gibbs_with_two_gaps():
    spec = SystemSpec(1.4, 0.6, 1.1, 1.1, 1.1, 0.01, 0.01, 0.0, 0.01, 0.01, 0.0, 0.008)
    ss = steady_state_three_terminal(spec)
    assert ss.rho11 / ss.rhogg == pytest.approx(math.exp(-1.4 / 1.1), rel=1e-10)
    assert ss.rho22 / ss.rhogg == pytest.approx(math.exp(-0.6 / 1.1), rel=1e-10)


def test_three_terminal_precondition():
    with pytest.raises(UsageError):
        steady_state_three_terminal(MAX_BIAS_SPEC)


def test_degenerate_detection_for_decoupled_system():
    spec = SystemSpec(1.0, 1.0, 1.0, 1.0, 1.0, 0, 0, 0, 0, 0, 0, 0)
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(build_generator(spec))


def test_degenerate_detection_at_double_dark_corner():
    spec = two_bath_spec(BOUND, BOUND)
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(build_generator(spec))


def test_evolve_fixed_point():
    gen = build_generator(MAX_BIAS_SPEC)
    ss = steady_state(gen)
    out = evolve(gen, ss.vector, t_end=100.0, tol=1e-9)
    assert np.abs(out - ss.vector).max() <= 1e-9


def test_evolve_reaches_nullspace_steady_state():
    gen = build_generator(MAX_BIAS_SPEC)
    ss = steady_state(gen)
    ti = steady_state_time_integration(gen, t_end=1e6, tol=1e-12)
    assert np.abs(ti.vector - ss.vector).max() <= 1e-8
    assert ti.method == "time_integration"


def test_evolve_decoupled_system_frozen_populations():
    spec = SystemSpec(1.5, 1.0, 1.0, 1.0, 1.0, 0, 0, 0, 0, 0, 0, 0)
    gen = build_generator(spec)
    init = np.array([0.3, 0.3, 0.4, 0.2 + 0.1j, 0.2 - 0.1j], dtype=complex)
    out = evolve(gen, init, t_end=10.0, tol=1e-30)
    assert np.abs(out[:3] - init[:3]).max() <= 1e-9
    # coherences only rotate: magnitude preserved
    assert abs(abs(out[3]) - abs(init[3])) <= 1e-9
    assert abs(out[3] - init[3]) > 1e-3


def test_oracle_three_way_agreement(conserving_corpus):
    for spec in conserving_corpus[:40]:
        gen = build_generator(spec)
        ss = steady_state(gen)
        if spec.eps1 == spec.eps2 and spec.gM == 0.0:
            ana = steady_state_resonant_two_bath(spec)
        else:
            ana = steady_state_three_terminal(spec)
        assert np.abs(ss.vector - ana.vector).max() <= 1e-8
        ti = steady_state_time_integration(gen)
        assert np.abs(ss.vector - ti.vector).max() <= 1e-8


def test_coherence_vanishing_residual_zero_cases():
    # equal cross couplings at resonance
    assert abs(coherence_vanishing_residual(two_bath_spec(0.5 * BOUND, 0.5 * BOUND))) <= 1e-16
    # equal temperatures, including a coupled middle bath
    eq = SystemSpec(1.3, 0.9, 1.2, 1.2, 1.2, 0.01, 0.02, 0.01, 0.015, 0.01, 0.008, 0.01)
    assert abs(coherence_vanishing_residual(eq)) <= 1e-16


def test_coherence_vanishing_residual_cosign():
    # residual and coherence carry opposite signs across the coupling grid
    grid = np.linspace(0.0, BOUND, 20)
    checked = 0
    for gl in grid:
        for gr in grid:
            spec = two_bath_spec(gl, gr)
            residual = coherence_vanishing_residual(spec)
            try:
                rho12 = steady_state(build_generator(spec)).rho12.real
            except DegenerateSteadyStateError:
                continue
            if abs(residual) > 1e-12 and abs(rho12) > 1e-12:
                assert np.sign(rho12) == -np.sign(residual)
                checked += 1
    assert checked > 100


def test_max_bias_residual_and_coherence_both_nonzero():
    assert abs(coherence_vanishing_residual(MAX_BIAS_SPEC)) > 1e-6
    assert abs(steady_state(build_generator(MAX_BIAS_SPEC)).rho12) > 1e-2


def test_coherence_monotone_along_bias_rays():
    # |rho12| does not decrease as the coupling bias grows at fixed sum
    for total in (0.6 * BOUND, BOUND, 1.4 * BOUND):
        values = []
        for d in np.arange(0.0, BOUND / 2, BOUND / 40.0):
            gl = total / 2 + d
            gr = total / 2 - d
            if gl > BOUND or gr < 0.0:
                break
            ss = steady_state(build_generator(two_bath_spec(gl, gr)))
            values.append(abs(ss.rho12))
        diffs = np.diff(values)
        assert np.all(diffs >= -1e-12)


def test_coherence_grows_with_temperature_bias():
    values = []
    for dt in np.arange(0.0, 1.5001, 0.05):
        spec = two_bath_spec(BOUND, 0.0, tempL=0.5 + dt, tempR=0.5)
        values.append(steady_state(build_generator(spec)).coherence_magnitude)
    assert np.all(np.diff(values) > 0.0)


def test_steady_state_coherence_real_at_resonance():
    for spec in (MAX_BIAS_SPEC, two_bath_spec(0.3 * BOUND, 0.9 * BOUND)):
        ss = steady_state(build_generator(spec))
        assert abs(ss.rho12.imag) <= 1e-12
        assert abs(ss.rho21 - np.conj(ss.rho12)) <= 1e-12


def test_steady_state_trace_and_real_populations(conserving_corpus):
    for spec in conserving_corpus[:30]:
        ss = steady_state(build_generator(spec))
        assert abs(ss.vector[:3].sum() - 1.0) <= 1e-15
        assert max(abs(ss.vector[k].imag) for k in range(3)) <= 1e-10
