"""Steady-state solvers: numeric null space, closed forms, time integration.

The three routes are deliberately independent so each can serve as an
oracle for the others:

* ``steady_state`` takes the kernel of the 5x5 generator via a full
  eigendecomposition;
* ``steady_state_resonant_two_bath`` and ``steady_state_three_terminal``
  evaluate closed-form solutions valid in their stated regimes;
* ``steady_state_time_integration`` relaxes an initial state under the
  dynamics with an adaptive explicit integrator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegenerateSteadyStateError, UsageError
from .liouvillian import Generator, build_generator
from .model import SystemSpec, build_rates

NULLSPACE = "nullspace"
ANALYTIC = "analytic"
TIME_INTEGRATION = "time_integration"

#: The second-smallest |Re eigenvalue| must exceed this multiple of the
#: smallest, otherwise the kernel is treated as degenerate.
DEGENERACY_RATIO = 1e3

#: Populations below this (negative) level set the positivity warning.
POSITIVITY_TOL = -1e-8


@dataclass(frozen=True)
class SteadyState:
    """A trace-normalized steady state plus solve diagnostics.

    ``residual`` is the infinity norm of generator times state (for the
    analytic routes, measured against the numerically built generator).
    ``positivity_warning`` flags populations below -1e-8; the weak-coupling
    master equation does not guarantee complete positivity, so excursions
    are reported rather than rejected.
    """

    vector: np.ndarray
    residual: float
    method: str
    positivity_warning: bool = False

    @property
    def rho11(self) -> float:
        return float(self.vector[0].real)

    @property
    def rho22(self) -> float:
        return float(self.vector[1].real)

    @property
    def rhogg(self) -> float:
        return float(self.vector[2].real)

    @property
    def rho12(self) -> complex:
        return complex(self.vector[3])

    @property
    def rho21(self) -> complex:
        return complex(self.vector[4])

    @property
    def coherence_magnitude(self) -> float:
        return float(abs(self.vector[3]))


def _finalize(vector: np.ndarray, gen_matrix: np.ndarray | None, method: str) -> SteadyState:
    trace = vector[0] + vector[1] + vector[2]
    if abs(trace) < 1e-300:
        raise DegenerateSteadyStateError("steady-state candidate has zero trace")
    v = vector / trace
    residual = float(np.abs(gen_matrix @ v).max()) if gen_matrix is not None else 0.0
    warn = bool(min(v[0].real, v[1].real, v[2].real) < POSITIVITY_TOL)
    return SteadyState(v, residual, method, warn)


def steady_state(gen: Generator) -> SteadyState:
    """Unique kernel vector of the bare generator, trace-normalized.

    Raises
    ------
    DegenerateSteadyStateError
        If the kernel is not one-dimensional within tolerance (for example
        when every coupling is zero and the populations decouple).
    """
    if gen.chi is not None and not gen.chi.is_zero:
        raise UsageError("steady_state requires the undressed generator")
    m = gen.matrix
    eigvals, eigvecs = np.linalg.eig(m)
    order = np.argsort(np.abs(eigvals.real))
    smallest, second = np.abs(eigvals.real[order[0]]), np.abs(eigvals.real[order[1]])
    # the ratio test alone is unstable when both values sit at rounding
    # noise, so a second near-zero mode (relative to the spectral scale)
    # also counts as degenerate
    floor = 1e-12 * np.abs(eigvals).max()
    if second <= max(DEGENERACY_RATIO * smallest, floor):
        raise DegenerateSteadyStateError(
            f"kernel not isolated: |Re| eigenvalues {smallest:.3e} and {second:.3e}"
        )
    k = int(np.argmin(np.abs(eigvals)))
    return _finalize(eigvecs[:, k], m, NULLSPACE)


def steady_state_resonant_two_bath(spec: SystemSpec) -> SteadyState:
    """Closed-form steady state at resonance with the middle bath off.

    Valid for ``eps1 == eps2`` and ``gM == 0``; the coherence component is
    real and vanishes identically when the gain/loss ratios of the three
    channels coincide.
    """
    if spec.eps1 != spec.eps2 or spec.gM != 0.0:
        raise UsageError(
            "resonant two-bath closed form needs eps1 == eps2 and gM == 0"
        )
    r = build_rates(spec)
    gp11, gm11 = r.gamma_plus(1, 1, 1), r.gamma_minus(1, 1, 1)
    gp22, gm22 = r.gamma_plus(2, 2, 1), r.gamma_minus(2, 2, 1)
    gp12, gm12 = r.gamma_plus(1, 2, 1), r.gamma_minus(1, 2, 1)
    if gm11 == 0.0 or gm22 == 0.0:
        raise DegenerateSteadyStateError("a fully decoupled channel has no unique steady state")
    norm = gm11 * (gm22 + gp22) + gp11 * gm22 - gm12 * (gm12 + 2.0 * gp12)
    if norm <= 0.0:
        raise DegenerateSteadyStateError("closed-form normalization vanished (dark state)")
    msum = gm11 + gm22
    rho11 = (msum * gp11 * gm22 + (gp22 - gp11) * gm12**2 - 2.0 * gm22 * gm12 * gp12) / (
        msum * norm
    )
    rho22 = (msum * gm11 * gp22 + (gp11 - gp22) * gm12**2 - 2.0 * gm11 * gm12 * gp12) / (
        msum * norm
    )
    rhogg = (gm11 * gm22 - gm12**2) / norm
    # written with the loss rate multiplied through so gm12 = 0 needs no case
    rho12 = (gm11 * gm22 / (msum * norm)) * (
        2.0 * gp12 - gm12 * (gp11 / gm11 + gp22 / gm22)
    )
    vector = np.array([rho11, rho22, rhogg, rho12, rho12], dtype=complex)
    return _finalize(vector, build_generator(spec).matrix, ANALYTIC)


def steady_state_three_terminal(spec: SystemSpec) -> SteadyState:
    """Closed-form populations with interference off (any middle coupling).

    Coherences vanish identically; with ``gM == 0`` this reduces to the
    two-bath no-interference form.
    """
    if spec.gL12 != 0.0 or spec.gR12 != 0.0:
        raise UsageError("three-terminal closed form needs gL12 == gR12 == 0")
    r = build_rates(spec)
    gp11, gm11 = r.gamma_plus(1, 1, 1), r.gamma_minus(1, 1, 1)
    gp22, gm22 = r.gamma_plus(2, 2, 2), r.gamma_minus(2, 2, 2)
    gMp, gMm = r.gain_M, r.loss_M
    norm = (gp22 + gm22 + gMp) * (gp11 + gm11 + gMm) - (gMm - gp22) * (gMp - gp11)
    if norm <= 0.0:
        raise DegenerateSteadyStateError("closed-form normalization vanished")
    rho11 = ((gm22 + gMp) * gp11 + gMp * gp22) / norm
    rho22 = ((gm11 + gMm) * gp22 + gMm * gp11) / norm
    rhogg = (gm22 * gm11 + gm22 * gMm + gMp * gm11) / norm
    vector = np.array([rho11, rho22, rhogg, 0.0, 0.0], dtype=complex)
    return _finalize(vector, build_generator(spec).matrix, ANALYTIC)


def evolve(
    gen: Generator,
    init: np.ndarray,
    t_end: float = 1e6,
    tol: float = 1e-12,
) -> np.ndarray:
    """Integrate dv/dt = L v until the derivative norm drops below ``tol``.

    Uses an adaptive explicit Runge-Kutta scheme (fixed order, step control
    on local error).  Returns the final state vector; if ``t_end`` is
    reached before convergence, the state at ``t_end`` is returned and the
    caller can inspect the residual.
    """
    if tol <= 0:
        raise UsageError("evolve: tol must be positive")
    m = gen.matrix
    v = np.asarray(init, dtype=complex).copy()
    if np.abs(m @ v).max() < tol:
        return v

    def rhs(_t, y):
        return m @ y

    t = 0.0
    chunk = 100.0
    while t < t_end:
        span = min(chunk, t_end - t)
        sol = solve_ivp(rhs, (0.0, span), v, method="DOP853", rtol=1e-10, atol=1e-12)
        v = sol.y[:, -1]
        t += span
        chunk *= 10.0
        if np.abs(m @ v).max() < tol:
            break
    return v


def steady_state_time_integration(
    gen: Generator,
    t_end: float = 1e6,
    tol: float = 1e-12,
) -> SteadyState:
    """Relax the pure ground state under the dynamics (oracle route)."""
    init = np.array([0.0, 0.0, 1.0, 0.0, 0.0], dtype=complex)
    v = evolve(gen, init, t_end=t_end, tol=tol)
    return _finalize(v, gen.matrix, TIME_INTEGRATION)


def coherence_vanishing_residual(spec: SystemSpec) -> float:
    """Signed residual whose zero predicts a vanishing steady-state coherence.

    The coherence components can only be zero at steady state if the
    population-block solution balances the interference gain against the
    interference loss.  The returned value is that balance, evaluated on
    the steady state of the population block alone:

        loss12(eps1)*rho11 + loss12(eps2)*rho22
            - (gain12(eps1) + gain12(eps2))*rhogg

    It vanishes at equal bath temperatures, and for two baths at resonance
    it carries the opposite sign of the steady-state coherence.
    """
    r = build_rates(spec)
    gen = build_generator(spec)
    block = gen.matrix[:3, :3]
    eigvals, eigvecs = np.linalg.eig(block)
    k = int(np.argmin(np.abs(eigvals)))
    pop = eigvecs[:, k]
    pop = (pop / pop.sum()).real
    return float(
        r.gamma_minus(1, 2, 1) * pop[0]
        + r.gamma_minus(1, 2, 2) * pop[1]
        - (r.gamma_plus(1, 2, 1) + r.gamma_plus(1, 2, 2)) * pop[2]
    )
