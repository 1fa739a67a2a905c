"""Domain types and transition rates for the three-level V system.

Units: hbar = k_B = 1 throughout; every quantity is dimensionless.

The system has two excited levels at energies ``eps1 >= eps2 > 0`` above a
common ground state at zero energy.  Two bosonic baths (left ``L`` and right
``R``) drive both ground-excited transitions; their cross coefficients
``gL12``/``gR12`` encode noise-induced interference and are bounded by the
geometric mean of the diagonal coefficients.  A third bath (middle ``M``)
drives hopping between the two excited levels across the gap
``delta = eps1 - eps2``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError

# Counted-quantity kinds.
ENERGY = "energy"
PARTICLE = "particle"
KINDS = (ENERGY, PARTICLE)

# Counted baths.
BATHS = ("L", "R")

#: Smallest excited-state gap accepted while the middle bath is coupled;
#: below this the middle-bath thermal occupation diverges.
GAP_MIN = 1e-9


def bose_occupation(omega: float, temp: float) -> float:
    """Thermal occupation 1/(exp(omega/temp) - 1) of a bosonic mode.

    Parameters
    ----------
    omega : float
        Mode frequency, strictly positive.
    temp : float
        Bath temperature, strictly positive.

    Raises
    ------
    DomainError
        If ``omega <= 0`` (zero-frequency divergence) or ``temp <= 0``.
    """
    if omega <= 0.0:
        raise DomainError(f"bose_occupation: omega must be > 0, got {omega}")
    if temp <= 0.0:
        raise DomainError(f"bose_occupation: temp must be > 0, got {temp}")
    return 1.0 / math.expm1(omega / temp)


@dataclass(frozen=True)
class SystemSpec:
    """Complete parameter set for one transport scenario.

    ``eps2 = 0`` is accepted only when the level-2 channel is fully
    decoupled (``gL22 == gR22 == 0``, which the interference bound then
    forces onto ``gL12``/``gR12`` as well); it exists for the single-channel
    limit of the no-interference closed-form current.
    """

    eps1: float
    eps2: float
    tempL: float
    tempM: float
    tempR: float
    gL11: float
    gL22: float
    gL12: float
    gR11: float
    gR22: float
    gR12: float
    gM: float

    @property
    def delta(self) -> float:
        return self.eps1 - self.eps2

    def validate(self) -> list[str]:
        return validate(self)

    def require_valid(self) -> "SystemSpec":
        violations = validate(self)
        if violations:
            raise DomainError("invalid SystemSpec: " + "; ".join(violations))
        return self

    def content_hash(self) -> str:
        """Short stable hash of the resolved parameter set."""
        text = "|".join(f"{f.name}={getattr(self, f.name)!r}" for f in fields(self))
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def validate(spec: SystemSpec) -> list[str]:
    """Collect every invariant violation of ``spec``; empty list when valid.

    Reports rather than raises, so a configuration loader can surface all
    problems at once.
    """
    v: list[str] = []
    for name in ("tempL", "tempM", "tempR"):
        if getattr(spec, name) <= 0.0:
            v.append(f"temperature positivity: {name} = {getattr(spec, name)} must be > 0")
    for name in ("gL11", "gL22", "gL12", "gR11", "gR22", "gR12", "gM"):
        if getattr(spec, name) < 0.0:
            v.append(f"coefficient nonnegativity: {name} = {getattr(spec, name)} must be >= 0")
    if spec.eps1 < spec.eps2:
        v.append(f"level ordering: eps1 = {spec.eps1} must be >= eps2 = {spec.eps2}")
    if spec.eps1 <= 0.0:
        v.append(f"level positivity: eps1 = {spec.eps1} must be > 0")
    if spec.eps2 < 0.0:
        v.append(f"level positivity: eps2 = {spec.eps2} must be >= 0")
    elif spec.eps2 == 0.0 and (spec.gL22 > 0.0 or spec.gR22 > 0.0):
        v.append("level positivity: eps2 = 0 requires gL22 = gR22 = 0 (single-channel limit)")
    for side in ("L", "R"):
        g11 = getattr(spec, f"g{side}11")
        g22 = getattr(spec, f"g{side}22")
        g12 = getattr(spec, f"g{side}12")
        bound = math.sqrt(max(g11, 0.0) * max(g22, 0.0))
        if g12 > bound:
            v.append(
                f"interference bound: g{side}12 = {g12} exceeds sqrt(g{side}11*g{side}22) = {bound}"
            )
    if spec.gM > 0.0 and spec.delta < GAP_MIN:
        v.append(
            f"middle-bath gap: eps1 - eps2 = {spec.delta} must be >= {GAP_MIN} when gM > 0"
        )
    return v


def interference_bound(spec: SystemSpec, side: str) -> float:
    """Upper bound sqrt(g11*g22) for the cross coefficient of one bath."""
    g11 = getattr(spec, f"g{side}11")
    g22 = getattr(spec, f"g{side}22")
    return math.sqrt(g11 * g22)


@dataclass(frozen=True)
class CountingFields:
    """Counting parameters attached to the left and right baths.

    ``kind`` selects what is counted: transferred energy (phase factors
    ``exp(-+ i*omega*chi)``) or transferred excitations (``exp(-+ i*chi)``).
    """

    chiL: float = 0.0
    chiR: float = 0.0
    kind: str = ENERGY

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"counting kind must be one of {KINDS}, got {self.kind!r}")

    @classmethod
    def zero(cls, kind: str = ENERGY) -> "CountingFields":
        return cls(0.0, 0.0, kind)

    def scaled(self, factor: float) -> "CountingFields":
        return CountingFields(self.chiL * factor, self.chiR * factor, self.kind)

    @property
    def is_zero(self) -> bool:
        return self.chiL == 0.0 and self.chiR == 0.0


class RateSet:
    """Bath-resolved gain/loss rates evaluated at both excited energies.

    Gain rates are coefficient times occupation, loss rates coefficient
    times occupation plus one; totals sum the left and right contributions.
    The per-bath split is kept because counting-field dressing multiplies
    each bath's contribution by its own phase before the sum is formed.

    Rates are stored as nested tuples ``[i][j][k]`` with levels
    ``i, j in {0, 1}`` (for excited states 1, 2) and ``k in {0, 1}``
    selecting the energy argument ``eps1`` or ``eps2``.  Plain Python
    storage keeps construction cheap inside parameter sweeps.
    """

    __slots__ = ("spec", "occL", "occR", "occM", "gainL", "gainR", "lossL", "lossR",
                 "gain_M", "loss_M")

    def __init__(self, spec: SystemSpec):
        spec.require_valid()
        self.spec = spec
        eps = (spec.eps1, spec.eps2)
        coefL = ((spec.gL11, spec.gL12), (spec.gL12, spec.gL22))
        coefR = ((spec.gR11, spec.gR12), (spec.gR12, spec.gR22))
        needed = (True, spec.eps2 > 0.0)
        self.occL = tuple(
            bose_occupation(e, spec.tempL) if need else 0.0 for e, need in zip(eps, needed)
        )
        self.occR = tuple(
            bose_occupation(e, spec.tempR) if need else 0.0 for e, need in zip(eps, needed)
        )
        # gain[i][j][k] = coef_ij * n(eps_k); loss[i][j][k] = coef_ij * (1 + n(eps_k))
        self.gainL = _rate_table(coefL, self.occL, 0.0)
        self.lossL = _rate_table(coefL, self.occL, 1.0)
        self.gainR = _rate_table(coefR, self.occR, 0.0)
        self.lossR = _rate_table(coefR, self.occR, 1.0)
        if spec.gM > 0.0:
            self.occM = bose_occupation(spec.delta, spec.tempM)
            self.gain_M = spec.gM * self.occM
            self.loss_M = spec.gM * (1.0 + self.occM)
        else:
            self.occM = 0.0
            self.gain_M = 0.0
            self.loss_M = 0.0

    @property
    def delta(self) -> float:
        return self.spec.delta

    @property
    def gain(self) -> np.ndarray:
        """Total gain rates, left plus right bath, as an (2, 2, 2) array."""
        return np.array(self.gainL) + np.array(self.gainR)

    @property
    def loss(self) -> np.ndarray:
        """Total loss rates, left plus right bath, as an (2, 2, 2) array."""
        return np.array(self.lossL) + np.array(self.lossR)

    def gamma_plus(self, i: int, j: int, k: int) -> float:
        """Total gain rate for levels ``(i, j)`` at energy ``eps_k`` (1-based)."""
        return self.gainL[i - 1][j - 1][k - 1] + self.gainR[i - 1][j - 1][k - 1]

    def gamma_minus(self, i: int, j: int, k: int) -> float:
        """Total loss rate for levels ``(i, j)`` at energy ``eps_k`` (1-based)."""
        return self.lossL[i - 1][j - 1][k - 1] + self.lossR[i - 1][j - 1][k - 1]

    def dressed(self, chi: CountingFields) -> "DressedRateSet":
        return dress_rates(self, chi)


def _rate_table(coef, occ, offset: float):
    n0 = offset + occ[0]
    n1 = offset + occ[1]
    c00, c01 = coef[0]
    _, c11 = coef[1]
    cross = (c01 * n0, c01 * n1)
    return (((c00 * n0, c00 * n1), cross), (cross, (c11 * n0, c11 * n1)))


def build_rates(spec: SystemSpec) -> RateSet:
    """Evaluate all bare transition rates for a validated spec."""
    return RateSet(spec)


class DressedRateSet:
    """Counting-field-dressed rates; reduces to the bare rates at chi = 0.

    Gain contributions pick up ``exp(-i w chi_u)`` and loss contributions
    ``exp(+i w chi_u)`` per bath ``u``, with ``w`` the energy argument for
    energy counting and 1 for particle counting.
    """

    __slots__ = ("base", "chi", "gain", "loss")

    def __init__(self, base: RateSet, chi: CountingFields):
        self.base = base
        self.chi = chi
        spec = base.spec
        w = (spec.eps1, spec.eps2) if chi.kind == ENERGY else (1.0, 1.0)
        phaseL = tuple(np.exp(-1j * wk * chi.chiL) for wk in w)
        phaseR = tuple(np.exp(-1j * wk * chi.chiR) for wk in w)
        self.gain = tuple(
            tuple(tuple(base.gainL[i][j][k] * phaseL[k] + base.gainR[i][j][k] * phaseR[k]
                        for k in range(2))
                  for j in range(2))
            for i in range(2)
        )
        self.loss = tuple(
            tuple(tuple(base.lossL[i][j][k] * phaseL[k].conjugate()
                        + base.lossR[i][j][k] * phaseR[k].conjugate()
                        for k in range(2))
                  for j in range(2))
            for i in range(2)
        )

    def gamma_plus(self, i: int, j: int, k: int) -> complex:
        return self.gain[i - 1][j - 1][k - 1]

    def gamma_minus(self, i: int, j: int, k: int) -> complex:
        return self.loss[i - 1][j - 1][k - 1]


def dress_rates(rates: RateSet, chi: CountingFields) -> DressedRateSet:
    """Apply per-bath counting phases to the gain/loss rates."""
    return DressedRateSet(rates, chi)
