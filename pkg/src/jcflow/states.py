"""States and channels: the prepared product state, its flow transform,
reduced density matrices, and the photon/atom Kraus (POVM) operators.

States transform as |Psi(l)> = U(l)^dag |Psi>, mirroring H(l) = U H U^dag.
For the prepared state |e,n> the photon-side Kraus operators are indexed
by the atom outcome i in {g, e} and the atom-side operators by the photon
outcome m; both sets are complete (sum K^dag K = I) on the truncation-safe
subspace but deliberately not unital (sum K K^dag != I) for l > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from jcflow.flow import HermitianMatrix
from jcflow.jaynes_cummings import FockTruncation, JCParams, build_unitary

NORM_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
COMPLETENESS_TOL = 1e-10
EVOLUTION_NORM_TOL = 1e-10


@dataclass(frozen=True)
class PureState:
    """Complex amplitude vector on the truncated product basis, unit norm."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm:.12f} differs from 1")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite (within slack) matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise ValueError("density matrix must be Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr:.12f} differs from 1")
        evs = np.linalg.eigvalsh(m)
        if evs.min() < EIGENVALUE_FLOOR:
            raise ValueError(f"negative eigenvalue {evs.min():.3e} beyond slack")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators of one subsystem channel.

    ``safe_dim`` marks the leading block of the subsystem space on which
    completeness sum K^dag K = I holds exactly despite truncation; the
    invariant is enforced there at construction.
    """

    operators: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    safe_dim: int

    def __post_init__(self):
        if len(self.operators) != len(self.labels):
            raise ValueError("one label per operator required")
        ops = tuple(np.array(op, dtype=complex) for op in self.operators)
        for op in ops:
            op.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        res = self.completeness_residual()
        if res > COMPLETENESS_TOL:
            raise ValueError(f"completeness residual {res:.3e} on the safe subspace")

    def completeness_residual(self) -> float:
        """max |sum K^dag K - I| over the truncation-safe block."""
        s = sum(op.conj().T @ op for op in self.operators)
        d = self.safe_dim
        return float(np.max(np.abs(s[:d, :d] - np.eye(d))))

    def unitality_deviation(self) -> float:
        """Frobenius norm of sum K K^dag - I on the full subsystem space."""
        s = sum(op @ op.conj().T for op in self.operators)
        return float(np.linalg.norm(s - np.eye(s.shape[0])))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Channel action sum K rho K^dag."""
        return sum(op @ rho @ op.conj().T for op in self.operators)


def product_state(n: int, t: FockTruncation) -> PureState:
    """Prepared product state |e,n>; requires 1 <= n <= n_max - 1 so the
    state sits inside an untruncated block."""
    if not 1 <= n <= t.n_max - 1:
        raise IndexError(f"prepared photon number {n} outside 1..{t.n_max - 1}")
    amps = np.zeros(t.dim, dtype=complex)
    amps[t.index(n, "e")] = 1.0
    return PureState(amps)


def flow_transform_state(
    state: PureState, p: JCParams, t: FockTruncation, l: float
) -> PureState:
    """Flow-transformed state U(l)^dag |Psi>."""
    u = build_unitary(p, t, l)
    return PureState(u.conj().T @ state.amplitudes)


def density_from_pure(state: PureState) -> DensityMatrix:
    """Rank-one projector |Psi><Psi|."""
    return DensityMatrix(np.outer(state.amplitudes, state.amplitudes.conj()))


def partial_trace(rho: DensityMatrix, keep: str, t: FockTruncation) -> DensityMatrix:
    """Reduced density matrix of one subsystem (``keep`` = photon or atom)."""
    n_ph = t.n_max + 1
    if rho.dim != 2 * n_ph:
        raise ValueError(f"density matrix dimension {rho.dim} does not match truncation")
    r = rho.matrix.reshape(n_ph, 2, n_ph, 2)
    if keep == "photon":
        return DensityMatrix(np.einsum("nsms->nm", r))
    if keep == "atom":
        return DensityMatrix(np.einsum("nsnr->sr", r))
    raise ValueError("keep must be 'photon' or 'atom'")


def evolve_state(state: PureState, h: HermitianMatrix, time: float) -> PureState:
    """Time-evolved state exp(-i H t) |Psi> via dense matrix exponential."""
    u = expm(-1j * h.matrix * time)
    amps = u @ state.amplitudes
    drift = abs(np.linalg.norm(amps) - 1.0)
    if drift > EVOLUTION_NORM_TOL:
        raise ArithmeticError(f"matrix exponential lost unitarity: norm drift {drift:.3e}")
    return PureState(amps / np.linalg.norm(amps))


def photon_povm(p: JCParams, t: FockTruncation, l: float) -> KrausSet:
    """Photon-space Kraus operators A_i = <i|U(l)^dag|e>, i in {g, e}.

    A_e is diagonal with entries alpha_n (1 on the truncated top state);
    A_g shifts |n> -> |n+1> with weight gamma_n.  Completeness holds on
    photon indices below n_max.
    """
    u_dag = _u_dag_blocks(p, t, l)
    ops = tuple(u_dag[:, i, :, _ATOM_E] for i in (_ATOM_G, _ATOM_E))
    return KrausSet(operators=ops, labels=("g", "e"), safe_dim=t.n_max)


def atom_povm(p: JCParams, t: FockTruncation, l: float, n: int) -> KrausSet:
    """Atom-space Kraus operators B_m = <m|U(l)^dag|n> for a prepared
    photon number n; nonzero only for m in {n-1, n, n+1}."""
    if not 1 <= n <= t.n_max - 1:
        raise IndexError(f"prepared photon number {n} outside 1..{t.n_max - 1}")
    u_dag = _u_dag_blocks(p, t, l)
    ops = tuple(u_dag[m, :, n, :] for m in range(t.n_max + 1))
    labels = tuple(str(m) for m in range(t.n_max + 1))
    return KrausSet(operators=ops, labels=labels, safe_dim=2)


_ATOM_G, _ATOM_E = 0, 1


def _u_dag_blocks(p: JCParams, t: FockTruncation, l: float) -> np.ndarray:
    """U(l)^dag reshaped to (photon, atom, photon, atom) indices."""
    u = build_unitary(p, t, l)
    return u.conj().T.reshape(t.n_max + 1, 2, t.n_max + 1, 2)
