"""Wegner double-bracket flow for finite Hermitian matrices.

The flow dH/dl = [eta(l), H(l)] with the Wegner generator eta = [H^d, H]
(H^d the diagonal part) is isospectral and drives off-diagonal weight to
zero exponentially in the flow parameter l (dimension energy^-2) whenever
the diagonal is nondegenerate.  The integrator can accumulate the unitary
U(l) solving dU/dl = eta U, U(0) = I, so that H(l) = U(l) H(0) U(l)^dag.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from jcflow.errors import StepLimitExceeded, ToleranceFailure

HERMITICITY_TOL = 1e-12
UNITARY_DRIFT_TOL = 1e-10
MONOTONE_SLACK = 1e-10


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense complex square matrix with an enforced Hermiticity invariant.

    Entries are in dimensionless energy units (hbar = 1).  The wrapped
    array is copied and made read-only, so instances are immutable and
    safe to share across threads.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 1:
            raise ValueError("dimension must be >= 1")
        drift = np.max(np.abs(m - m.conj().T))
        if drift > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian: max |H - H^dag| = {drift:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class IntegratorConfig:
    """Error control and sampling for the flow integration.

    ``sample_grid`` lists the l values at which the trajectory is recorded
    (l = 0 is always prepended); ``None`` selects a log-spaced default keyed
    off the largest diagonal gap of the initial matrix.
    """

    l_max: float
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 100_000
    sample_grid: tuple[float, ...] | None = None

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0 or not 0.0 < self.abs_tol < 1.0:
            raise ValueError("rel_tol and abs_tol must lie in (0, 1)")
        if self.l_max <= 0.0:
            raise ValueError("l_max must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be a positive integer")
        if self.sample_grid is not None:
            grid = tuple(float(x) for x in self.sample_grid)
            if any(x < 0.0 for x in grid):
                raise ValueError("sample grid values must be nonnegative")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("sample grid must be strictly increasing")
            if grid and grid[-1] > self.l_max:
                raise ValueError("sample grid exceeds l_max")
            object.__setattr__(self, "sample_grid", grid)


@dataclass(frozen=True)
class FlowSample:
    """One recorded point of a flow trajectory."""

    l: float
    h: HermitianMatrix
    offdiag_norm: float
    step_size: float
    unitary: np.ndarray | None = None


@dataclass(frozen=True)
class FlowTrajectory:
    """Ordered flow samples; l strictly increasing from 0, off-diagonal
    norm nonincreasing (Wegner monotonicity, up to integrator slack)."""

    samples: tuple[FlowSample, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.samples:
            raise ValueError("trajectory must contain at least one sample")
        if self.samples[0].l != 0.0:
            raise ValueError("first sample must be at l = 0")
        ls = [s.l for s in self.samples]
        if any(b <= a for a, b in zip(ls, ls[1:])):
            raise ValueError("sample l values must be strictly increasing")
        norms = [s.offdiag_norm for s in self.samples]
        for a, b in zip(norms, norms[1:]):
            if b > a + MONOTONE_SLACK:
                raise ValueError(
                    f"off-diagonal norm increased along the flow: {a:.3e} -> {b:.3e}"
                )

    @property
    def final(self) -> FlowSample:
        return self.samples[-1]


def diagonal_part(h: HermitianMatrix) -> HermitianMatrix:
    """Matrix with h's diagonal entries and zeros elsewhere."""
    return HermitianMatrix(np.diag(np.diag(h.matrix)))


def offdiag_norm(h: HermitianMatrix) -> float:
    """Frobenius norm of the off-diagonal part."""
    return _offdiag_norm(h.matrix)


def wegner_generator(h: HermitianMatrix) -> np.ndarray:
    """Anti-Hermitian generator [H^d, H] driving the flow."""
    return _wegner(h.matrix)


def flow_rhs(h: HermitianMatrix) -> HermitianMatrix:
    """Right-hand side [[H^d, H], H] of the flow equation."""
    rhs = _double_bracket(h.matrix)
    return HermitianMatrix(0.5 * (rhs + rhs.conj().T))


def default_sample_grid(h0: HermitianMatrix, l_max: float, count: int = 40) -> tuple[float, ...]:
    """Log-spaced sample grid from 1e-3/gap^2 to l_max (gap = largest
    diagonal spread, which sets the slowest decay rate); l = 0 prepended."""
    gap = _diag_gap(h0.matrix)
    l_min = 1e-3 / gap**2 if gap > 0.0 else l_max * 1e-6
    l_min = min(l_min, l_max / 10.0)
    return (0.0,) + tuple(np.geomspace(l_min, l_max, count))


def integrate_flow(
    h0: HermitianMatrix,
    cfg: IntegratorConfig,
    accumulate_unitary: bool = False,
) -> FlowTrajectory:
    """Integrate the Wegner flow from l = 0, sampling at the config grid.

    Uses an embedded Dormand-Prince 4(5) pair with per-entry error control;
    the step size is keyed off the largest diagonal gap initially and then
    adapted.  When ``accumulate_unitary`` is set, the unitary U(l) solving
    dU/dl = eta U is carried alongside H and re-orthonormalized by polar
    projection whenever ||U U^dag - I|| drifts above 1e-10.

    Raises StepLimitExceeded if the step budget runs out before the last
    grid point, ToleranceFailure if error control stalls at the minimum
    step size.
    """
    dim = h0.dim
    grid = cfg.sample_grid if cfg.sample_grid is not None else default_sample_grid(h0, cfg.l_max)
    targets = [l for l in grid if l > 0.0]

    ncomp = 2 if accumulate_unitary else 1
    state = np.zeros((ncomp, dim, dim), dtype=complex)
    state[0] = h0.matrix
    if accumulate_unitary:
        state[1] = np.eye(dim)

    l = 0.0
    h = _initial_step(h0.matrix, targets[-1] if targets else cfg.l_max)
    samples = [_sample(0.0, state, h, accumulate_unitary)]
    attempts = 0

    for target in targets:
        while l < target:
            h_try = min(h, target - l)
            attempts += 1
            if attempts > cfg.max_steps:
                raise StepLimitExceeded(
                    f"{cfg.max_steps} steps exhausted at l = {l:.6g} (target {target:.6g})"
                )
            y_new, err = _dp_step(state, h_try, cfg.rel_tol, cfg.abs_tol)
            if err <= 1.0:
                l += h_try
                state = y_new
                state[0] = 0.5 * (state[0] + state[0].conj().T)
                if accumulate_unitary:
                    _reorthonormalize(state)
                grow = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err**-0.2))
                h = h_try * grow
            else:
                h_min = 16.0 * np.spacing(max(abs(l), 1e-6))
                if h_try <= h_min:
                    raise ToleranceFailure(
                        f"step size {h_try:.3e} at l = {l:.6g} cannot meet tolerances"
                    )
                h = h_try * max(0.1, 0.9 * err**-0.2)
        samples.append(_sample(l, state, h, accumulate_unitary))

    return FlowTrajectory(tuple(samples))


# -- internals ---------------------------------------------------------------

# Dormand-Prince 4(5) tableau; E = b5 - b4 gives the embedded error weights.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = _DP_B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


def _wegner(m: np.ndarray) -> np.ndarray:
    d = np.diag(np.diag(m))
    return d @ m - m @ d


def _double_bracket(m: np.ndarray) -> np.ndarray:
    eta = _wegner(m)
    return eta @ m - m @ eta


def _offdiag_norm(m: np.ndarray) -> float:
    off = m - np.diag(np.diag(m))
    return float(np.linalg.norm(off))


def _diag_gap(m: np.ndarray) -> float:
    d = np.real(np.diag(m))
    return float(np.max(d) - np.min(d)) if d.size > 1 else 0.0


def _initial_step(m: np.ndarray, horizon: float) -> float:
    # Decay rates scale like the squared diagonal gaps, so start well below
    # the fastest timescale; the controller adapts from there.
    gap = _diag_gap(m)
    h0 = 0.01 / gap**2 if gap > 0.0 else horizon / 100.0
    return min(h0, horizon / 10.0)


def _flow_derivative(state: np.ndarray) -> np.ndarray:
    out = np.empty_like(state)
    m = state[0]
    eta = _wegner(m)
    out[0] = eta @ m - m @ eta
    if state.shape[0] == 2:
        out[1] = eta @ state[1]
    return out


def _dp_step(state: np.ndarray, h: float, rel_tol: float, abs_tol: float):
    k = np.empty((7,) + state.shape, dtype=complex)
    k[0] = _flow_derivative(state)
    for i in range(1, 7):
        y = state.copy()
        for j, a in enumerate(_DP_A[i]):
            if a != 0.0:
                y += (h * a) * k[j]
        k[i] = _flow_derivative(y)
    y_new = state + h * np.tensordot(_DP_B5, k, axes=1)
    y_err = h * np.tensordot(_DP_E, k, axes=1)
    scale = abs_tol + rel_tol * np.maximum(np.abs(state), np.abs(y_new))
    err = float(np.max(np.abs(y_err) / scale))
    if not np.isfinite(err):
        err = np.inf
    return y_new, err


def _reorthonormalize(state: np.ndarray) -> None:
    u = state[1]
    drift = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if drift > UNITARY_DRIFT_TOL:
        w, _, vh = np.linalg.svd(u)
        state[1] = w @ vh


def _sample(l: float, state: np.ndarray, step: float, with_unitary: bool) -> FlowSample:
    m = HermitianMatrix(state[0])
    u = state[1].copy() if with_unitary else None
    return FlowSample(l=l, h=m, offdiag_norm=_offdiag_norm(state[0]), step_size=step, unitary=u)
