"""Generators of the reduced density-matrix dynamics.

The density matrix of the three-level system closes on the five components
``[rho11, rho22, rhogg, rho12, rho21]`` (the ground-excited coherences
decouple structurally; see :func:`verify_block_decoupling`).  This module
builds the 5x5 generator acting on that block, bare or dressed with
counting fields, together with its analytic derivatives with respect to the
counting parameters.

Two independent constructions are provided: a direct entry-wise fill from
the transition rates, and an application of the full master-equation
superoperator to all nine density-matrix basis elements.  The test suite
holds them against each other entry by entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .model import (
    ENERGY,
    CountingFields,
    DressedRateSet,
    RateSet,
    SystemSpec,
    build_rates,
)

#: Component order of the reduced state vector.
STATE_LABELS = ("rho11", "rho22", "rhogg", "rho12", "rho21")

#: Left null vector of every trace-preserving generator (row of ones over
#: the populations, zeros over the coherences).
TRACE_VECTOR = np.array([1.0, 1.0, 1.0, 0.0, 0.0])

# Index pairs (m, n) of the 3x3 density matrix, levels ordered
# (excited 1, excited 2, ground); the first five form the closed block.
_BASIS_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 0),
                (0, 2), (2, 0), (1, 2), (2, 1))


@dataclass(frozen=True, eq=False)
class Generator:
    """A 5x5 complex generator together with the counting fields it carries.

    ``chi`` is None for the bare (undressed) generator.
    """

    matrix: np.ndarray
    spec: SystemSpec
    chi: CountingFields | None = None

    def to_text(self) -> str:
        """Row-major plain-text dump, one row per line, entries as "re,im"."""
        lines = []
        for row in self.matrix:
            lines.append(" ".join(f"{z.real:.17e},{z.imag:.17e}" for z in row))
        return "\n".join(lines) + "\n"


def _fill_block(rates: RateSet, sandwich: RateSet | DressedRateSet) -> np.ndarray:
    """Assemble the 5x5 generator.

    ``sandwich`` supplies the gain-type rates that carry counting phases;
    ``rates`` supplies the undressed damping combinations.  Passing the same
    object for both yields the bare generator.
    """
    gm = rates.gamma_minus
    gp = rates.gamma_plus
    sm = sandwich.gamma_minus
    sp = sandwich.gamma_plus
    gMp, gMm = rates.gain_M, rates.loss_M
    delta = rates.delta

    m = np.zeros((5, 5), dtype=complex)
    # populations
    m[0, 0] = -(gm(1, 1, 1) + gMm)
    m[0, 1] = gMp
    m[0, 2] = sp(1, 1, 1)
    m[0, 3] = m[0, 4] = -0.5 * gm(1, 2, 2)
    m[1, 0] = gMm
    m[1, 1] = -(gm(2, 2, 2) + gMp)
    m[1, 2] = sp(2, 2, 2)
    m[1, 3] = m[1, 4] = -0.5 * gm(1, 2, 1)
    m[2, 0] = sm(1, 1, 1)
    m[2, 1] = sm(2, 2, 2)
    m[2, 2] = -(gp(1, 1, 1) + gp(2, 2, 2))
    m[2, 3] = m[2, 4] = 0.5 * (sm(1, 2, 1) + sm(1, 2, 2))
    # coherences
    damping = 0.5 * (gm(1, 1, 1) + gm(2, 2, 2)) + 0.5 * (gMp + gMm)
    m[3, 0] = m[4, 0] = -0.5 * gm(1, 2, 1)
    m[3, 1] = m[4, 1] = -0.5 * gm(1, 2, 2)
    m[3, 2] = m[4, 2] = 0.5 * (sp(1, 2, 1) + sp(1, 2, 2))
    m[3, 3] = -1j * delta - damping
    m[4, 4] = +1j * delta - damping
    return m


def build_generator(spec: SystemSpec, rates: RateSet | None = None) -> Generator:
    """Bare generator of the five-component block dynamics.

    ``rates`` may be passed to reuse an already-built rate set inside
    tight parameter loops.
    """
    if rates is None:
        rates = build_rates(spec)
    return Generator(_fill_block(rates, rates), spec, None)


def build_counting_generator(spec: SystemSpec, chi: CountingFields) -> Generator:
    """Counting-field-dressed generator.

    Only the gain ("sandwich") terms carry dressed rates, in the
    symmetrized combination over both energy arguments; the anticommutator
    damping terms and every middle-bath term stay undressed.  At chi = 0
    the result equals :func:`build_generator` bit-exactly.
    """
    rates = build_rates(spec)
    if chi.is_zero:
        return Generator(_fill_block(rates, rates), spec, chi)
    return Generator(_fill_block(rates, rates.dressed(chi)), spec, chi)


def generator_chi_derivative(
    spec: SystemSpec,
    chi0: CountingFields,
    bath: str,
    order: int = 1,
) -> np.ndarray:
    """Analytic derivative d^n L / d(i chi_u)^n evaluated at ``chi0``.

    Each dressed gain factor contributes ``(-w)^n`` and each dressed loss
    factor ``(+w)^n`` (``w`` = energy argument for energy counting, 1 for
    particle counting), applied per bath before the bath sum.  A bath with
    all couplings zero yields the zero matrix.
    """
    if not 1 <= order <= 4:
        raise UsageError(f"derivative order must be in 1..4, got {order}")
    if bath not in ("L", "R"):
        raise UsageError(f"bath must be 'L' or 'R', got {bath!r}")
    rates = build_rates(spec)
    gain = rates.gainL if bath == "L" else rates.gainR
    loss = rates.lossL if bath == "L" else rates.lossR
    chi_u = chi0.chiL if bath == "L" else chi0.chiR
    w = np.array([spec.eps1, spec.eps2]) if chi0.kind == ENERGY else np.ones(2)
    gain_fac = (-w) ** order * np.exp(-1j * w * chi_u)
    loss_fac = (+w) ** order * np.exp(+1j * w * chi_u)

    h = np.zeros((5, 5), dtype=complex)
    h[0, 2] = gain[0][0][0] * gain_fac[0]
    h[1, 2] = gain[1][1][1] * gain_fac[1]
    h[3, 2] = h[4, 2] = 0.5 * (gain[0][1][0] * gain_fac[0] + gain[0][1][1] * gain_fac[1])
    h[2, 0] = loss[0][0][0] * loss_fac[0]
    h[2, 1] = loss[1][1][1] * loss_fac[1]
    h[2, 3] = h[2, 4] = 0.5 * (loss[0][1][0] * loss_fac[0] + loss[0][1][1] * loss_fac[1])
    return h


# ---------------------------------------------------------------------------
# Independent construction: superoperator applied to basis elements.

def _transition_operators():
    phi_plus = [np.zeros((3, 3), dtype=complex) for _ in range(2)]
    for i in range(2):
        phi_plus[i][i, 2] = 1.0  # |e_i><g|
    phi_minus = [op.conj().T for op in phi_plus]
    psi_plus = np.zeros((3, 3), dtype=complex)
    psi_plus[0, 1] = 1.0  # |e_1><e_2|
    psi_minus = psi_plus.conj().T
    return phi_plus, phi_minus, psi_plus, psi_minus


def _master_rhs(spec: SystemSpec, rates: RateSet, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the bare master equation applied to a 3x3 matrix."""
    phi_p, phi_m, psi_p, psi_m = _transition_operators()
    hs = np.diag([spec.eps1, spec.eps2, 0.0]).astype(complex)
    out = -1j * (hs @ rho - rho @ hs)
    for i in range(2):
        for j in range(2):
            for sign, ops in ((+1, (phi_p, phi_m)), (-1, (phi_m, phi_p))):
                fwd, bwd = ops
                rate = (rates.gamma_plus if sign > 0 else rates.gamma_minus)(
                    i + 1, j + 1, j + 1
                )
                a, b = fwd[j], bwd[i]
                c, d = fwd[i], bwd[j]
                out += 0.5 * rate * ((a @ rho @ b - b @ a @ rho)
                                     + (c @ rho @ d - rho @ d @ c))
    for rate, fwd, bwd in ((rates.gain_M, psi_p, psi_m), (rates.loss_M, psi_m, psi_p)):
        if rate != 0.0:
            out += 0.5 * rate * ((fwd @ rho @ bwd - bwd @ fwd @ rho)
                                 + (fwd @ rho @ bwd - rho @ bwd @ fwd))
    return out


def build_superoperator_full(spec: SystemSpec) -> np.ndarray:
    """9x9 superoperator over all density-matrix components.

    Basis order: the five closed-block components first, then the four
    ground-excited coherences (1g, g1, 2g, g2).
    """
    rates = build_rates(spec)
    full = np.zeros((9, 9), dtype=complex)
    for col, (m, n) in enumerate(_BASIS_PAIRS):
        basis = np.zeros((3, 3), dtype=complex)
        basis[m, n] = 1.0
        image = _master_rhs(spec, rates, basis)
        for row, (p, q) in enumerate(_BASIS_PAIRS):
            full[row, col] = image[p, q]
    return full


def project_block(full: np.ndarray) -> np.ndarray:
    """Restrict the 9x9 superoperator to the closed five-component block."""
    return full[:5, :5].copy()


def verify_block_decoupling(spec: SystemSpec) -> float:
    """Largest coupling between the closed block and the remaining coherences.

    Builds the full 9x9 superoperator and returns the maximum magnitude
    over both off-diagonal blocks; structural decoupling means a value at
    machine-zero level.
    """
    full = build_superoperator_full(spec)
    upper = np.abs(full[:5, 5:]).max()
    lower = np.abs(full[5:, :5]).max()
    return float(max(upper, lower))


def hermitian_residual(v: np.ndarray) -> float:
    """Deviation of a state vector from Hermitian symmetry.

    Checks that the populations are real and that the two coherence
    components are complex conjugates.
    """
    pop_imag = max(abs(v[0].imag), abs(v[1].imag), abs(v[2].imag))
    return float(max(pop_imag, abs(v[4] - np.conj(v[3]))))
