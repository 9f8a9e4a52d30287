"""Jaynes-Cummings Hamiltonian on a truncated Fock space and the closed-form
solution of its Wegner flow.

The model couples a two-level atom (ground |g>, excited |e>, transition
frequency omega0) to a single photon mode (frequency omega) with real
coupling lam > 0 under the rotating wave approximation, off resonance
(detuning delta = omega0 - omega > 0).  The Hamiltonian decomposes into
2x2 blocks span{|e,n>, |g,n+1>} plus the uncoupled singlet |g,0>; on each
block the flow is solved in closed form by the profile L_n(l), giving the
diagonal pair A_n, B_n, the coupling C_n, and the rotation coefficients
(alpha_n, gamma_n) of the accumulated unitary.

Basis convention (fixed package-wide): product states are ordered
|g,0>, |e,0>, |g,1>, |e,1>, ... i.e. index = 2*n + (0 for g, 1 for e).
On truncation at n_max, blocks exist for n = 0 .. n_max-1 and the top
state |e,n_max> is left uncoupled; the transformation acts as the
identity on both singlets, so truncation introduces no error in any
block quantity.

A negative coupling would amount to the basis rephasing |g> -> -|g> and
is rejected rather than handled; likewise delta < 0 is rejected (it only
swaps the roles of the diagonal pair).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from jcflow.errors import DomainError
from jcflow.flow import HermitianMatrix

COEFF_TOL = 1e-12
RADICAND_FLOOR = -1e-12


@dataclass(frozen=True)
class JCParams:
    """Physical parameters; construction enforces lam > 0 and positive detuning."""

    omega0: float
    omega: float
    lam: float

    def __post_init__(self):
        if self.delta <= 0.0:
            raise ValueError(
                f"detuning omega0 - omega = {self.delta:.6g} must be positive (off resonance)"
            )
        if self.lam <= 0.0:
            raise ValueError("coupling lam must be strictly positive")

    @property
    def delta(self) -> float:
        """Detuning omega0 - omega."""
        return self.omega0 - self.omega


@dataclass(frozen=True)
class FockTruncation:
    """Photon-number cutoff: states |0> .. |n_max> are retained."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def dim(self) -> int:
        """Dimension 2*(n_max + 1) of the truncated product space."""
        return 2 * (self.n_max + 1)

    def index(self, n: int, atom: str) -> int:
        """Basis index of |atom, n> in the interleaved (g, e) ordering."""
        if not 0 <= n <= self.n_max:
            raise IndexError(f"photon number {n} outside truncation 0..{self.n_max}")
        if atom not in ("g", "e"):
            raise ValueError("atom state must be 'g' or 'e'")
        return 2 * n + (1 if atom == "e" else 0)


@dataclass(frozen=True)
class BlockCoeffs:
    """Flowed block-n coefficients: diagonal pair (a, b) and coupling c >= 0."""

    n: int
    a: float
    b: float
    c: float

    def __post_init__(self):
        if self.c < 0.0:
            raise ValueError("coupling coefficient must be nonnegative")


@dataclass(frozen=True)
class UnitaryCoeffs:
    """Rotation coefficients of one block of the flow unitary.

    The block is the real rotation [[alpha, gamma], [-gamma, alpha]] on
    (|e,n>, |g,n+1>); beta = alpha and delta_c = -gamma always.
    """

    n: int
    alpha: float
    beta: float
    gamma: float
    delta_c: float

    def __post_init__(self):
        if abs(self.alpha**2 + self.gamma**2 - 1.0) > COEFF_TOL:
            raise ValueError("alpha^2 + gamma^2 must equal 1")
        if abs(self.alpha - self.beta) > COEFF_TOL or abs(self.gamma + self.delta_c) > COEFF_TOL:
            raise ValueError("block coefficients must satisfy beta = alpha, delta = -gamma")


def rabi_frequency(p: JCParams, n: int) -> float:
    """Rabi frequency sqrt(delta^2 + 4 lam^2 (n+1)) of block n."""
    if n < 0:
        raise ValueError("block index must be nonnegative")
    return math.sqrt(p.delta**2 + 4.0 * p.lam**2 * (n + 1))


def l_profile(p: JCParams, n: int, l: float) -> float:
    """Flow profile of block n: rises monotonically from 1 to Omega_n/delta.

    The exponential underflows to 0 for large l, which is exactly the
    correct limiting value of the denominator term.
    """
    _check_l(l)
    om2 = p.delta**2 + 4.0 * p.lam**2 * (n + 1)
    k = p.delta**2 / om2
    return 1.0 / math.sqrt(k + (1.0 - k) * math.exp(-2.0 * om2 * l))


def tilde_l(p: JCParams, n: int, l: float) -> float:
    """Profile driving the unitary coefficients; falls from 1 to delta/Omega_n.

    Evaluated in the cancellation-free form L * (k + (1-k) e^{-Omega^2 l});
    the literal radicand 1 - k L^2 is still checked and clamped at 0, with
    DomainError below -1e-12.
    """
    _check_l(l)
    om2 = p.delta**2 + 4.0 * p.lam**2 * (n + 1)
    k = p.delta**2 / om2
    big_l = l_profile(p, n, l)
    _checked_radicand(1.0 - k * big_l**2)
    return big_l * (k + (1.0 - k) * math.exp(-om2 * l))


def closed_form_block(p: JCParams, n: int, l: float) -> BlockCoeffs:
    """Exact flow solution of block n at flow parameter l.

    At l = 0 this reduces to the bare entries (omega0/2 + omega n,
    -omega0/2 + omega (n+1), lam sqrt(n+1)); as l -> infinity the
    diagonal pair converges to the block eigenvalues and c -> 0.
    """
    _check_l(l)
    om2 = p.delta**2 + 4.0 * p.lam**2 * (n + 1)
    k = p.delta**2 / om2
    big_l = l_profile(p, n, l)
    mean = p.omega * (n + 0.5)
    half = 0.5 * p.delta * big_l
    # c = (Omega/2) sqrt(1 - k L^2) via the exact identity
    # 1 - k L^2 = (1-k) e^{-2 Omega^2 l} L^2, avoiding cancellation.
    c = 0.5 * math.sqrt(om2) * big_l * math.sqrt((1.0 - k) * math.exp(-2.0 * om2 * l))
    return BlockCoeffs(n=n, a=mean + half, b=mean - half, c=c)


def unitary_coeffs(p: JCParams, n: int, l: float) -> UnitaryCoeffs:
    """Rotation coefficients of block n: alpha = sqrt((1 + Lt)/2),
    gamma = sqrt((1 - Lt)/2) with Lt the tilde profile."""
    lt = tilde_l(p, n, l)
    alpha = math.sqrt(0.5 * (1.0 + lt))
    gamma = math.sqrt(max(0.5 * (1.0 - lt), 0.0))
    return UnitaryCoeffs(n=n, alpha=alpha, beta=alpha, gamma=gamma, delta_c=-gamma)


def asymptotic_energies(p: JCParams, n: int) -> tuple[float, float]:
    """Limiting diagonal pair of block n: omega (n + 1/2) +/- Omega_n / 2.

    These are the block eigenvalues; in the resonant limit delta -> +0
    they approach omega (n + 1/2) +/- lam sqrt(n+1).
    """
    mean = p.omega * (n + 0.5)
    half = 0.5 * rabi_frequency(p, n)
    return mean + half, mean - half


def singleton_energies(p: JCParams, t: FockTruncation) -> tuple[float, float]:
    """Energies of the two uncoupled states: |g,0> at -omega0/2 and the
    truncation artifact |e,n_max> at omega0/2 + omega n_max."""
    return -0.5 * p.omega0, 0.5 * p.omega0 + p.omega * t.n_max


def build_hamiltonian(p: JCParams, t: FockTruncation) -> HermitianMatrix:
    """Jaynes-Cummings Hamiltonian on the truncated product basis.

    Diagonal: <e,n|H|e,n> = omega0/2 + omega n, <g,n|H|g,n> = -omega0/2
    + omega n.  Couplings <e,n|H|g,n+1> = lam sqrt(n+1) for n < n_max;
    the top state |e,n_max> keeps no coupling partner.
    """
    m = np.zeros((t.dim, t.dim), dtype=complex)
    for n in range(t.n_max + 1):
        m[t.index(n, "g"), t.index(n, "g")] = -0.5 * p.omega0 + p.omega * n
        m[t.index(n, "e"), t.index(n, "e")] = 0.5 * p.omega0 + p.omega * n
    for n in range(t.n_max):
        i, j = t.index(n, "e"), t.index(n + 1, "g")
        m[i, j] = m[j, i] = p.lam * math.sqrt(n + 1)
    return HermitianMatrix(m)


def closed_form_hamiltonian(p: JCParams, t: FockTruncation, l: float) -> HermitianMatrix:
    """Flowed Hamiltonian H(l) assembled from the per-block closed forms;
    singlets keep their bare energies."""
    m = np.zeros((t.dim, t.dim), dtype=complex)
    e_g0, e_top = singleton_energies(p, t)
    m[0, 0] = e_g0
    m[t.index(t.n_max, "e"), t.index(t.n_max, "e")] = e_top
    for n in range(t.n_max):
        blk = closed_form_block(p, n, l)
        i, j = t.index(n, "e"), t.index(n + 1, "g")
        m[i, i] = blk.a
        m[j, j] = blk.b
        m[i, j] = m[j, i] = blk.c
    return HermitianMatrix(m)


def build_unitary(p: JCParams, t: FockTruncation, l: float) -> np.ndarray:
    """Flow unitary U(l) on the truncated basis, identity on both singlets.

    Satisfies U(l) H U(l)^dag = H(l) with H(l) the closed-form flowed
    Hamiltonian, and matches the solution of dU/dl = eta U, U(0) = I.
    """
    u = np.eye(t.dim, dtype=complex)
    for n in range(t.n_max):
        c = unitary_coeffs(p, n, l)
        i, j = t.index(n, "e"), t.index(n + 1, "g")
        u[i, i] = c.alpha
        u[i, j] = c.gamma
        u[j, i] = c.delta_c
        u[j, j] = c.beta
    return u


def _check_l(l: float) -> None:
    if l < 0.0:
        raise ValueError("flow parameter must be nonnegative")


def _checked_radicand(rad: float) -> float:
    """Clamp a nominally nonnegative radicand, rejecting real overshoot."""
    if rad < RADICAND_FLOOR:
        raise DomainError(f"radicand {rad:.3e} below admissible numerical slack")
    return max(rad, 0.0)
