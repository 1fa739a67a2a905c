"""Rectification and amplification figures of merit.

Temperature convention for rectification: the forward configuration puts
the left bath at ``t0 + deltaT/2`` and the right bath at ``t0 - deltaT/2``;
backward swaps them.  The factor is invariant under the opposite choice
combined with swapping the two coupling sets, so nothing physical hangs on
the convention; it is fixed here once and used everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DomainError,
    IndeterminateAmplificationError,
    IndeterminateRectificationError,
    UsageError,
)
from .model import SystemSpec, build_rates
from .transport import heat_currents, particle_currents

#: Denominators at or below this level make the figure of merit undefined.
RECTIFICATION_FLOOR = 1e-15
AMPLIFICATION_FLOOR = 1e-14


def default_deltaT_grid(t0: float, points: int = 50) -> np.ndarray:
    """Temperature-bias grid spanning (0, 1.9*t0] as used by the scans."""
    return np.linspace(1.9 * t0 / points, 1.9 * t0, points)


def default_tM_grid(points: int = 100) -> np.ndarray:
    """Middle-bath temperature grid [0.1, 2.0] used by the amplification scans."""
    return np.linspace(0.1, 2.0, points)


def _right_current(spec: SystemSpec) -> float:
    rates = build_rates(spec)
    return heat_currents(spec, rates=rates)[1]


@dataclass(frozen=True)
class RectificationResult:
    t0: float
    deltaT: float
    j_forward: float
    j_backward: float
    rj: float


def rectification(spec: SystemSpec, t0: float, deltaT: float) -> RectificationResult:
    """Asymmetry of the right-bath current under exchanging the edge temperatures.

    rj = |J_f + J_b| / max(J_f, -J_b) with J the right-bath energy current
    in the forward and backward configurations.

    Raises
    ------
    IndeterminateRectificationError
        When both configurations carry (numerically) no current, e.g. at
        deltaT = 0.
    """
    if abs(deltaT) >= 2.0 * t0:
        raise UsageError(f"|deltaT| = {abs(deltaT)} must stay below 2*t0 = {2.0 * t0}")
    forward = replace(spec, tempL=t0 + deltaT / 2.0, tempR=t0 - deltaT / 2.0)
    backward = replace(spec, tempL=t0 - deltaT / 2.0, tempR=t0 + deltaT / 2.0)
    j_f = _right_current(forward)
    j_b = _right_current(backward)
    den = max(j_f, -j_b)
    if den <= RECTIFICATION_FLOOR:
        raise IndeterminateRectificationError(
            f"both currents vanish at t0={t0}, deltaT={deltaT}"
        )
    return RectificationResult(t0, deltaT, j_f, j_b, abs(j_f + j_b) / den)


def max_rectification(
    spec: SystemSpec,
    t0: float,
    deltaT_grid: np.ndarray | None = None,
) -> tuple[float, float]:
    """Grid maximum of the rectification factor over the temperature bias.

    Indeterminate grid points are skipped; ties break toward smaller
    |deltaT| (the grid is scanned in increasing-bias order and only a
    strictly larger value moves the argmax).

    Returns
    -------
    (rj_max, deltaT_star)
    """
    grid = default_deltaT_grid(t0) if deltaT_grid is None else np.asarray(deltaT_grid)
    order = np.argsort(np.abs(grid), kind="stable")
    best_rj = -1.0
    best_dt = None
    for idx in order:
        dt = float(grid[idx])
        try:
            result = rectification(spec, t0, dt)
        except IndeterminateRectificationError:
            continue
        if result.rj > best_rj:
            best_rj = result.rj
            best_dt = dt
    if best_dt is None:
        raise IndeterminateRectificationError("every grid point was indeterminate")
    return best_rj, best_dt


@dataclass(frozen=True)
class AmplificationResult:
    """Heat-current response ratios to the middle-bath temperature.

    ``dJdTm`` holds the three central-difference derivatives
    (dJeL/dTM, dJeR/dTM, dJeM/dTM) after one Richardson refinement.
    ``branch_residual`` measures how well betaR equals |betaL +- 1| with
    the sign fixed by the direction of dJeL/dJeM.
    """

    tM: float
    betaL: float
    betaR: float
    dJdTm: tuple[float, float, float]
    stencil_h: float
    branch_theta: int
    branch_residual: float


def _heat_current_derivatives(spec: SystemSpec, tM: float, h: float):
    def je(tm: float) -> np.ndarray:
        local = replace(spec, tempM=tm)
        return np.array(heat_currents(local, rates=build_rates(local)))

    d_h = (je(tM + h) - je(tM - h)) / (2.0 * h)
    d_h2 = (je(tM + h / 2.0) - je(tM - h / 2.0)) / h
    return (4.0 * d_h2 - d_h) / 3.0


def amplification(spec: SystemSpec, tM: float, h: float | None = None) -> AmplificationResult:
    """Amplification factors beta_u = |dJe_u/dTM| / |dJeM/dTM| at fixed edges.

    Central differences with relative step (default 1e-4*tM) and one
    Richardson refinement; the currents are smooth in the middle-bath
    temperature here.
    """
    step = 1e-4 * tM if h is None else h
    if tM - step <= 0.0:
        raise UsageError(f"tM - h = {tM - step} must stay positive")
    d = _heat_current_derivatives(spec, tM, step)
    if abs(d[2]) <= AMPLIFICATION_FLOOR:
        raise IndeterminateAmplificationError(
            f"middle-bath current does not respond to tM at tM={tM}"
        )
    beta_l = abs(d[0]) / abs(d[2])
    beta_r = abs(d[1]) / abs(d[2])
    theta = 0 if d[0] / d[2] > 0.0 else 1
    residual = abs(beta_r - abs(beta_l + (-1.0) ** theta))
    return AmplificationResult(tM, beta_l, beta_r, (d[0], d[1], d[2]), step, theta, residual)


def max_amplification(spec: SystemSpec, tM_grid: np.ndarray | None = None) -> float:
    """Maximal right-bath amplification over the middle-bath temperature.

    Evaluates the closed-form factorization

        betaR_max = |eps2 / (eps1 - eps2)|
                    * max_TM |dJpR/dTM| / |dJpM/dTM|,

    i.e. the cyclic-structure prefactor times the particle-current response
    ratio.  In the cyclic coupling pattern the ratio is identically one and
    the prefactor is exact; switching on the bypass channels suppresses the
    ratio monotonically.
    """
    grid = default_tM_grid() if tM_grid is None else np.asarray(tM_grid)
    prefactor = cyclic_amplification_analytic(spec.eps1, spec.eps2)

    def jp(tm: float) -> np.ndarray:
        local = replace(spec, tempM=tm)
        j = particle_currents(local, rates=build_rates(local))
        return np.array([j[1], j[2]])

    best = None
    for tm in grid:
        h = 1e-4 * float(tm)
        if tm - h <= 0.0:
            continue
        d_h = (jp(tm + h) - jp(tm - h)) / (2.0 * h)
        d_h2 = (jp(tm + h / 2.0) - jp(tm - h / 2.0)) / h
        d = (4.0 * d_h2 - d_h) / 3.0
        if abs(d[1]) <= AMPLIFICATION_FLOOR:
            continue
        ratio = abs(d[0]) / abs(d[1])
        if best is None or ratio > best:
            best = ratio
    if best is None:
        raise IndeterminateAmplificationError("every grid point was indeterminate")
    return prefactor * best


def cyclic_amplification_analytic(eps1: float, eps2: float) -> float:
    """Closed-form amplification |eps2/(eps1 - eps2)| of the pure cycle.

    The two excited energies can never coincide here: the cycle exchanges
    the finite energy eps1 - eps2 with the middle bath on every pass.
    """
    if eps1 == eps2:
        raise DomainError("cyclic amplification needs eps1 != eps2")
    return abs(eps2 / (eps1 - eps2))
