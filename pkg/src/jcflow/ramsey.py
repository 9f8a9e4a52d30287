"""First-order approximation of the flow unitary and the Ramsey-zone
operator algebra that implements its atom-side factors.

The flow unitary is, to first order in the small ratio lam/delta,
I + (1 - e^{-delta^2 l}) (lam/delta) (sigma_+ a - sigma_- a^dag): linear
in the photon field and expressible through Ramsey-zone pulses on the
atom.  Atom matrices use the package-wide (g, e) basis ordering.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from jcflow.errors import PhaseError
from jcflow.jaynes_cummings import FockTruncation, JCParams, build_unitary
from jcflow.states import product_state

PHASE_TOL = 1e-12
EXPANSION_REGIME = 0.05

SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |e><g|
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |g><e|


@dataclass(frozen=True)
class RamseyPhases:
    """Pulse phases (theta, phi); unitarity requires theta - phi = pi mod 2 pi."""

    theta: float
    phi: float

    def __post_init__(self):
        rem = math.remainder(self.theta - self.phi, 2.0 * math.pi)
        if abs(abs(rem) - math.pi) > PHASE_TOL:
            raise PhaseError(
                f"theta - phi = {self.theta - self.phi:.6g} is not pi modulo 2 pi"
            )


def ramsey(phases: RamseyPhases) -> np.ndarray:
    """Ramsey-zone pulse (sigma_+ sigma_- + e^{i theta} sigma_- sigma_+
    + e^{i phi} sigma_+ + sigma_-) / sqrt(2); unitary by the phase condition.

    ramsey(RamseyPhases(pi, 0)) maps |e> -> (|e> + |g>)/sqrt(2).
    """
    return (
        SIGMA_PLUS @ SIGMA_MINUS
        + np.exp(1j * phases.theta) * SIGMA_MINUS @ SIGMA_PLUS
        + np.exp(1j * phases.phi) * SIGMA_PLUS
        + SIGMA_MINUS
    ) / math.sqrt(2.0)


def sigma_from_ramsey() -> tuple[np.ndarray, np.ndarray]:
    """Recover (sigma_+, sigma_-) from the two pulses R(pi,0) and R(0,pi):

        sigma_+ = [sqrt(2)(R(pi,0) - R(0,pi)) - R(pi,0) R(0,pi) + I] / 2
        sigma_- = [sqrt(2)(R(pi,0) + R(0,pi)) - R(pi,0) R(0,pi) - I] / 2

    Both identities are exact.
    """
    r_a = ramsey(RamseyPhases(math.pi, 0.0))
    r_b = ramsey(RamseyPhases(0.0, math.pi))
    eye = np.eye(2, dtype=complex)
    prod = r_a @ r_b
    sp = 0.5 * (math.sqrt(2.0) * (r_a - r_b) - prod + eye)
    sm = 0.5 * (math.sqrt(2.0) * (r_a + r_b) - prod - eye)
    return sp, sm


def approx_unitary(p: JCParams, t: FockTruncation, l: float) -> np.ndarray:
    """First-order flow unitary I + (1 - e^{-delta^2 l}) (lam/delta)
    (sigma_+ a - sigma_- a^dag) on the truncated basis.

    Non-unitary at second order in lam/delta; a warning is emitted when
    lam/delta exceeds the expansion regime.
    """
    if l < 0.0:
        raise ValueError("flow parameter must be nonnegative")
    ratio = p.lam / p.delta
    if ratio > EXPANSION_REGIME:
        warnings.warn(
            f"lam/delta = {ratio:.3g} exceeds the first-order expansion regime "
            f"({EXPANSION_REGIME:g}); the approximation degrades quadratically",
            stacklevel=2,
        )
    c = (1.0 - math.exp(-p.delta**2 * l)) * ratio
    u = np.eye(t.dim, dtype=complex)
    for n in range(t.n_max):
        i, j = t.index(n, "e"), t.index(n + 1, "g")
        u[i, j] = c * math.sqrt(n + 1)
        u[j, i] = -c * math.sqrt(n + 1)
    return u


def approx_nonunitarity(p: JCParams, t: FockTruncation, l: float) -> float:
    """Frobenius norm of U_approx U_approx^dag - I; O((lam/delta)^2)."""
    u = approx_unitary(p, t, l)
    return float(np.linalg.norm(u @ u.conj().T - np.eye(t.dim)))


def state_fidelity(p: JCParams, t: FockTruncation, l: float, n: int) -> float:
    """Overlap |<Psi_exact(l)|Psi_approx(l)>| for the prepared state |e,n>.

    Both states apply the respective U(l)^dag; the approximate state is
    renormalized before the overlap, so the result lies in [0, 1].
    """
    psi0 = product_state(n, t).amplitudes
    exact = build_unitary(p, t, l).conj().T @ psi0
    approx = approx_unitary(p, t, l).conj().T @ psi0
    approx = approx / np.linalg.norm(approx)
    return float(abs(np.vdot(exact, approx)))
