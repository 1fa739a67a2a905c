"""Steady-state heat and particle currents and their conservation checks.

Sign convention: a positive current flows *into* the named bath.  With that
convention the three energy currents sum to zero and the left and right
particle currents cancel; both residuals are attached to every report.

The closed forms in this module are written out independently of the
generic steady-state path so they can act as oracles for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .fcs import cumulants_finite_difference, cumulants_perturbative
from .liouvillian import build_generator
from .model import ENERGY, SystemSpec, bose_occupation, build_rates
from .steady import SteadyState, steady_state

#: Conservation residuals above this level flag the report.
CONSERVATION_TOL = 1e-10


def _resolve_state(spec: SystemSpec, state, rates) -> np.ndarray:
    if state is None:
        return steady_state(build_generator(spec, rates)).vector
    if isinstance(state, SteadyState):
        return state.vector
    return np.asarray(state, dtype=complex)


def heat_currents(
    spec: SystemSpec,
    state: SteadyState | np.ndarray | None = None,
    *,
    rates=None,
):
    """Energy currents (JeL, JeR, JeM) into the three baths.

    Each left/right current has a population-transfer part and an
    interference part proportional to the real coherence sum; the middle
    current exchanges energy only between the two excited populations.
    """
    r = build_rates(spec) if rates is None else rates
    v = _resolve_state(spec, state, r)
    csum = float((v[3] + v[4]).real)
    eps = (spec.eps1, spec.eps2)
    out = []
    for gain, loss in ((r.gainL, r.lossL), (r.gainR, r.lossR)):
        j = 0.0
        for k in range(2):
            j += eps[k] * (loss[k][k][k] * v[k].real - gain[k][k][k] * v[2].real)
            j += 0.5 * eps[k] * loss[0][1][k] * csum
        out.append(j)
    je_m = spec.delta * (r.loss_M * v[0].real - r.gain_M * v[1].real)
    return out[0], out[1], je_m


def particle_currents(
    spec: SystemSpec,
    state: SteadyState | np.ndarray | None = None,
    *,
    rates=None,
):
    """Excitation-number currents (JpL, JpR, JpM) into the three baths."""
    r = build_rates(spec) if rates is None else rates
    v = _resolve_state(spec, state, r)
    csum = float((v[3] + v[4]).real)
    out = []
    for gain, loss in ((r.gainL, r.lossL), (r.gainR, r.lossR)):
        j = 0.0
        for k in range(2):
            j += loss[k][k][k] * v[k].real - gain[k][k][k] * v[2].real
            j += 0.5 * loss[0][1][k] * csum
        out.append(j)
    jp_m = r.loss_M * v[0].real - r.gain_M * v[1].real
    return out[0], out[1], jp_m


def closed_form_JeR_resonant(spec: SystemSpec) -> float:
    """Right-bath energy current at resonance with equal diagonal couplings.

    Two-bath configuration only.  The expression splits into a population
    term and a coherence term proportional to gR12*(gL12 - gR12); with
    equal cross couplings it collapses to
    2*gamma*eps*(nL - nR) / (2 + 3*nL + 3*nR).
    """
    if spec.eps1 != spec.eps2:
        raise UsageError("resonant closed form needs eps1 == eps2")
    if spec.gM != 0.0:
        raise UsageError("resonant closed form needs gM == 0")
    gamma = spec.gL11
    if not (spec.gL22 == spec.gR11 == spec.gR22 == gamma):
        raise UsageError("resonant closed form needs equal diagonal couplings")
    eps = spec.eps1
    n_l = bose_occupation(eps, spec.tempL)
    n_r = bose_occupation(eps, spec.tempR)
    if spec.gL12 == spec.gR12:
        # equal cross couplings: the interference factors cancel exactly
        # (removing the 0/0 of the general form at the full-interference
        # corner) and the current collapses to the population channel
        return 2.0 * gamma * eps * (n_l - n_r) / (2.0 + 3.0 * n_l + 3.0 * n_r)
    g_plus = gamma * (n_l + n_r)
    g_minus = gamma * (2.0 + n_l + n_r)
    g12_plus = spec.gL12 * n_l + spec.gR12 * n_r
    g12_minus = spec.gL12 * (1.0 + n_l) + spec.gR12 * (1.0 + n_r)
    norm = g_minus**2 + 2.0 * g_plus * g_minus - g12_minus * (2.0 * g12_plus + g12_minus)
    population = (2.0 * eps * gamma / norm) * (g_minus * gamma - g12_minus * spec.gL12) * (
        n_l - n_r
    )
    coherence = (2.0 * eps * gamma * spec.gR12 * (spec.gL12 - spec.gR12) / norm) * (
        1.0 + n_r
    ) * (n_l - n_r)
    return population + coherence


def closed_form_JR_no_interference(spec: SystemSpec) -> float:
    """Right-bath current with both cross couplings off (two-bath case).

    For ``eps2 > 0`` this is the two-frequency expression on the
    no-interference populations.  For ``eps2 == 0`` the lower channel
    thermalizes at zero frequency and the current reduces to the single
    upper channel,

        J = gL11*gR11*(nL - nR)*eps1
            / (gL11*(2 + 3*nL) + gR11*(2 + 3*nR)),

    which is antisymmetric under exchanging the two bath temperatures
    whenever gL11 == gR11.
    """
    if spec.gL12 != 0.0 or spec.gR12 != 0.0:
        raise UsageError("no-interference closed form needs gL12 == gR12 == 0")
    if spec.gM != 0.0:
        raise UsageError("no-interference closed form needs gM == 0")
    n_l1 = bose_occupation(spec.eps1, spec.tempL)
    n_r1 = bose_occupation(spec.eps1, spec.tempR)
    if spec.eps2 == 0.0:
        num = spec.gL11 * spec.gR11 * (n_l1 - n_r1) * spec.eps1
        den = spec.gL11 * (2.0 + 3.0 * n_l1) + spec.gR11 * (2.0 + 3.0 * n_r1)
        return num / den
    n_l2 = bose_occupation(spec.eps2, spec.tempL)
    n_r2 = bose_occupation(spec.eps2, spec.tempR)
    gm11 = spec.gL11 * (1.0 + n_l1) + spec.gR11 * (1.0 + n_r1)
    gp11 = spec.gL11 * n_l1 + spec.gR11 * n_r1
    gm22 = spec.gL22 * (1.0 + n_l2) + spec.gR22 * (1.0 + n_r2)
    gp22 = spec.gL22 * n_l2 + spec.gR22 * n_r2
    norm = gm11 * (gp22 + gm22) + gp11 * gm22
    upper = (spec.gL11 * spec.gR11 / norm) * gm22 * (n_l1 - n_r1) * spec.eps1
    lower = (spec.gL22 * spec.gR22 / norm) * gm11 * (n_l2 - n_r2) * spec.eps2
    return upper + lower


@dataclass(frozen=True)
class NoisePower:
    """Second cumulant with its finite-difference cross-check attached."""

    bath: str
    kind: str
    value: float
    finite_difference: float


def noise_power(spec: SystemSpec, bath: str = "R", kind: str = ENERGY) -> NoisePower:
    """Zero-frequency noise power of the counted flow into one bath."""
    pert = cumulants_perturbative(spec, bath, kind, order=2)
    fd = cumulants_finite_difference(spec, bath, kind, order=2)
    return NoisePower(bath, kind, pert.noise_power, fd.noise_power)


@dataclass(frozen=True)
class CurrentReport:
    """All six steady-state currents plus conservation diagnostics.

    ``warnings`` lists soft violations (conservation residual above
    tolerance, steady-state positivity excursion) without interrupting a
    sweep.
    """

    JeL: float
    JeR: float
    JeM: float
    JpL: float
    JpR: float
    JpM: float
    SeRR: float
    conservation_residual_energy: float
    conservation_residual_particle: float
    warnings: tuple[str, ...] = ()

    @classmethod
    def from_spec(
        cls,
        spec: SystemSpec,
        state: SteadyState | None = None,
        include_noise: bool = True,
    ) -> "CurrentReport":
        ss = state if state is not None else steady_state(build_generator(spec))
        je = heat_currents(spec, ss)
        jp = particle_currents(spec, ss)
        se_rr = (
            cumulants_perturbative(spec, "R", ENERGY, order=2).noise_power
            if include_noise
            else float("nan")
        )
        res_e = abs(je[0] + je[1] + je[2])
        res_p = abs(jp[0] + jp[1])
        warn = []
        if res_e > CONSERVATION_TOL:
            warn.append("energy-conservation")
        if res_p > CONSERVATION_TOL:
            warn.append("particle-conservation")
        if ss.positivity_warning:
            warn.append("positivity")
        return cls(je[0], je[1], je[2], jp[0], jp[1], jp[2], se_rr,
                   res_e, res_p, tuple(warn))
