"""Von Neumann entanglement entropies along the flow and in time.

For the prepared state |e,n> the atom's reduced state is diagonal with
populations s+(l) = (1 + Lt_n(l))/2 on |e> and s-(l) = (1 - Lt_n(l))/2 on
|g>, so the entanglement entropy is the binary entropy of s+.  Under time
evolution by the bare Hamiltonian the populations oscillate at the block
Rabi frequency; the oscillation amplitude dies out as l grows and the
state approaches a stationary eigenstate.  Entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from jcflow.errors import DomainError
from jcflow.jaynes_cummings import FockTruncation, JCParams, l_profile, rabi_frequency, tilde_l
from jcflow.states import DensityMatrix, partial_trace

PROB_SUM_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-8
PURE_EQUALITY_TOL = 1e-9
PURITY_TOL = 1e-10


@dataclass(frozen=True)
class EntropyFlowSample:
    """Entropy of the flow-transformed state at one flow parameter."""

    l: float
    s_plus: float
    s_minus: float
    entropy: float

    def __post_init__(self):
        if abs(self.s_plus + self.s_minus - 1.0) > PROB_SUM_TOL:
            raise ValueError("populations must sum to 1")
        if self.entropy > math.log(2.0) + PROB_SUM_TOL:
            raise ValueError("atom entropy cannot exceed ln 2")


@dataclass(frozen=True)
class EntropyTimeSample:
    """Entropy of the time-evolved flow-transformed state."""

    l: float
    t: float
    s_plus: float
    s_minus: float
    entropy: float

    def __post_init__(self):
        if abs(self.s_plus + self.s_minus - 1.0) > PROB_SUM_TOL:
            raise ValueError("populations must sum to 1")
        if not (-PROB_SUM_TOL <= self.s_plus <= 1.0 + PROB_SUM_TOL):
            raise ValueError("populations must lie in [0, 1]")


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum p ln p over the eigenvalues, with 0 ln 0 = 0.

    Eigenvalues in [-1e-8, 0) are clipped to zero; anything below that
    raises DomainError.
    """
    evs = np.linalg.eigvalsh(rho.matrix)
    if evs.min() < EIGENVALUE_FLOOR:
        raise DomainError(f"density matrix eigenvalue {evs.min():.3e} is negative")
    evs = np.clip(evs, 0.0, None)
    pos = evs[evs > 0.0]
    return max(float(-(pos * np.log(pos)).sum()), 0.0)


def binary_entropy(x: float) -> float:
    """-x ln x - (1-x) ln(1-x) with the 0 ln 0 = 0 convention."""
    s = 0.0
    for p in (x, 1.0 - x):
        if p > 0.0:
            s -= p * math.log(p)
    return max(s, 0.0)


def s_pm(p: JCParams, n: int, l: float) -> tuple[float, float]:
    """Atom populations ( (1 + Lt)/2, (1 - Lt)/2 ) of the flowed state;
    they converge to ((1 + delta/Omega_n)/2, (1 - delta/Omega_n)/2)."""
    lt = tilde_l(p, n, l)
    return 0.5 * (1.0 + lt), 0.5 * (1.0 - lt)


def entropy_flow(p: JCParams, n: int, l_grid: Sequence[float]) -> list[EntropyFlowSample]:
    """Entropy samples along an increasing grid of flow parameters;
    starts at zero for l = 0 and grows monotonically."""
    grid = [float(l) for l in l_grid]
    if any(l < 0.0 for l in grid):
        raise ValueError("flow grid must be nonnegative")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("flow grid must be increasing")
    out = []
    for l in grid:
        sp, sm = s_pm(p, n, l)
        out.append(EntropyFlowSample(l=l, s_plus=sp, s_minus=sm, entropy=binary_entropy(sp)))
    return out


def s_pm_t(p: JCParams, n: int, l: float, t: float) -> tuple[float, float]:
    """Atom populations of exp(-i H t) |Psi(l)>, periodic in t with the
    block Rabi period 2 pi / Omega_n; at t = 0 they reduce to s_pm.

    The cross term sqrt((1 - Lt^2)(1 - delta^2/Omega^2)) is evaluated via
    the exact identity (1 - k) sqrt(k) (1 - e^{-Omega^2 l}) L with
    k = delta^2/Omega^2, which is free of cancellation.
    """
    om = rabi_frequency(p, n)
    k = (p.delta / om) ** 2
    sqk = p.delta / om
    big_l = l_profile(p, n, l)
    lt = tilde_l(p, n, l)
    root = (1.0 - k) * sqk * (1.0 - math.exp(-om * om * l)) * big_l
    c = math.cos(om * t)
    x = lt * c + (1.0 - c) * sqk * (sqk * lt + root)
    return 0.5 * (1.0 + x), 0.5 * (1.0 - x)


def entropy_time_evolution(
    p: JCParams, n: int, l: float, t_grid: Sequence[float]
) -> list[EntropyTimeSample]:
    """Entropy of the time-evolved state over a grid of times."""
    out = []
    for t in t_grid:
        t = float(t)
        if not math.isfinite(t):
            raise ValueError("time grid must be finite")
        sp, sm = s_pm_t(p, n, l, t)
        out.append(EntropyTimeSample(l=l, t=t, s_plus=sp, s_minus=sm, entropy=binary_entropy(sp)))
    return out


def oscillation_amplitude(p: JCParams, n: int, l: float, points: int = 64) -> float:
    """Peak-to-peak entropy swing over one Rabi period; decays to zero as
    the state approaches stationarity."""
    period = 2.0 * math.pi / rabi_frequency(p, n)
    ts = np.linspace(0.0, period, points)
    vals = [s.entropy for s in entropy_time_evolution(p, n, l, ts)]
    return max(vals) - min(vals)


def araki_lieb_check(
    rho_total: DensityMatrix, t: FockTruncation
) -> tuple[float, float, float]:
    """Entropy triple (photon, atom, total) with the subadditivity sandwich
    |S_ph - S_at| <= S_tot <= S_ph + S_at verified; for a pure total state
    the subsystem entropies must coincide and S_tot must vanish."""
    s_ph = von_neumann_entropy(partial_trace(rho_total, "photon", t))
    s_at = von_neumann_entropy(partial_trace(rho_total, "atom", t))
    s_tot = von_neumann_entropy(rho_total)
    if abs(s_ph - s_at) > s_tot + PURE_EQUALITY_TOL or s_tot > s_ph + s_at + PURE_EQUALITY_TOL:
        raise ValueError(
            f"entropy triple ({s_ph:.3e}, {s_at:.3e}, {s_tot:.3e}) violates subadditivity"
        )
    m = rho_total.matrix
    if np.max(np.abs(m @ m - m)) <= PURITY_TOL:
        if abs(s_ph - s_at) > PURE_EQUALITY_TOL or s_tot > PURE_EQUALITY_TOL:
            raise ValueError(
                f"pure state entropies inconsistent: ({s_ph:.3e}, {s_at:.3e}, {s_tot:.3e})"
            )
    return s_ph, s_at, s_tot
