"""Time evolution of the two-mode Gaussian state.

The mean follows ``mu(t) = e^{Mt} mu0``.  The covariance obeys the Lyapunov
equation ``dV/dt = M V + V M^T + D`` and is evaluated in closed form,

    V(t) = e^{Mt} V0 e^{M^T t} + int_0^t e^{Ms} D e^{M^T s} ds,

with the noise integral read off the exponential of the block matrix
``[[M, D], [0, -M^T]]``.  A classical RK4 integrator of the differential form is
kept as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import precise
from .expm import expm
from .model import (
    CoherentInput,
    GaussianState,
    SystemConfig,
    build_diffusion_matrix,
    build_dynamic_matrix,
    initial_state,
)

__all__ = [
    "NumericOverflowError",
    "TimeGrid",
    "EvolutionRecord",
    "matrix_exp",
    "evolve_mean",
    "evolve_covariance",
    "evolve_covariance_ball",
    "evolve_covariance_ode",
    "state_at",
    "evolve_series",
]


class NumericOverflowError(OverflowError):
    """The requested evolution leaves the double-precision range."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``0, h, 2h, ..., t_max`` in units of ``g t``."""

    t_max: float = 8.0
    steps: int = 2000

    def __post_init__(self):
        if not float(self.t_max) > 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")
        object.__setattr__(self, "t_max", float(self.t_max))
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def h(self) -> float:
        return self.t_max / self.steps

    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.h


@dataclass(frozen=True)
class EvolutionRecord:
    time: float
    state: GaussianState


def matrix_exp(M, t=1.0):
    """``exp(M t)`` by scaling and squaring; exact at defective ``M`` too."""
    return expm(np.asarray(M, dtype=float) * float(t))


def evolve_mean(M, mu0, t):
    return matrix_exp(M, t) @ np.asarray(mu0, dtype=float)


def _symmetrize(V):
    return 0.5 * (V + V.T)


def evolve_covariance(M, D, V0, t):
    """Closed-form covariance at time ``t`` (double precision)."""
    M = np.asarray(M, dtype=float)
    D = np.asarray(D, dtype=float)
    V0 = np.asarray(V0, dtype=float)
    n = M.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = M
    block[:n, n:] = D
    block[n:, n:] = -M.T
    E = expm(block * float(t))
    F = E[:n, :n]
    Q = E[:n, n:] @ F.T
    return _symmetrize(F @ V0 @ F.T + Q)


def evolve_covariance_ball(M, D, V0, t, bits):
    """Closed-form covariance as a ``flint.arb_mat`` evaluated with ``bits`` of precision."""
    with precise.workprec(bits):
        F, Q = precise.van_loan_blocks(np.asarray(M, float), np.asarray(D, float), t)
        V = F * precise.to_arb_mat(V0) * F.transpose() + Q
        return precise.sym_part(V)


def _lyapunov_rhs(M, D, V):
    MV = M @ V
    return MV + MV.T + D


def evolve_covariance_ode(M, D, V0, grid: TimeGrid):
    """Fixed-step RK4 integration of ``dV/dt = MV + VM^T + D``.

    Returns an array of shape ``(grid.steps + 1, 4, 4)`` aligned with
    ``grid.times()``.
    """
    M = np.asarray(M, dtype=float)
    D = np.asarray(D, dtype=float)
    V = np.array(V0, dtype=float)
    h = grid.h
    out = np.empty((grid.steps + 1,) + V.shape)
    out[0] = V
    for k in range(1, grid.steps + 1):
        k1 = _lyapunov_rhs(M, D, V)
        k2 = _lyapunov_rhs(M, D, V + 0.5 * h * k1)
        k3 = _lyapunov_rhs(M, D, V + 0.5 * h * k2)
        k4 = _lyapunov_rhs(M, D, V + h * k3)
        V = V + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k] = V
    return out


def _checked(values, t):
    if not np.all(np.isfinite(values)):
        raise NumericOverflowError(
            f"state at g t = {t:g} exceeds double range; shorten the time window"
        )
    return values


def _auto_bits(M, t_max):
    try:
        return precise.bits_for(M, t_max)
    except OverflowError as exc:
        raise NumericOverflowError(str(exc)) from None


def _state_ball(M, D, mu0, V0, t, bits):
    with precise.workprec(bits):
        F, Q = precise.van_loan_blocks(M, D, t)
        V = precise.sym_part(F * precise.to_arb_mat(V0) * F.transpose() + Q)
        mean = F * precise.to_arb_mat(np.reshape(mu0, (4, 1)))
        mean_f = _checked(precise.to_float(mean).ravel(), t)
        cov_f = _checked(precise.to_float(V), t)
    return GaussianState(mean=mean_f, cov=cov_f, cov_ball=V)


def state_at(config: SystemConfig, inp: CoherentInput, t: float,
             bits: Optional[int] = None) -> GaussianState:
    """State at a single time, carrying a high-precision covariance enclosure."""
    M = build_dynamic_matrix(config)
    D = build_diffusion_matrix(config)
    s0 = initial_state(inp)
    if bits is None:
        bits = _auto_bits(M, t)
    return _state_ball(M, D, s0.mean, s0.cov, t, bits)


def evolve_series(config: SystemConfig, inp: CoherentInput,
                  grid: TimeGrid = TimeGrid(), bits: Optional[int] = None,
                  exact: bool = True) -> List[EvolutionRecord]:
    """States at every grid time.

    Each grid point is an independent closed-form evaluation, so the result
    does not depend on evaluation order.  With ``exact=True`` (default) the
    covariance is computed in ball arithmetic at ``bits`` of precision (chosen
    automatically from the growth bound of ``M`` when omitted) and the float
    fields are its midpoints; ``exact=False`` uses double precision only.
    """
    M = build_dynamic_matrix(config)
    D = build_diffusion_matrix(config)
    s0 = initial_state(inp)
    records = []
    if exact:
        if bits is None:
            bits = _auto_bits(M, grid.t_max)
        for t in grid.times():
            records.append(EvolutionRecord(float(t), _state_ball(M, D, s0.mean, s0.cov, t, bits)))
        return records
    for t in grid.times():
        # overflow is reported by _checked, not as a warning
        with np.errstate(over="ignore", invalid="ignore"):
            F = matrix_exp(M, t)
            mean = F @ s0.mean
            cov = evolve_covariance(M, D, s0.cov, t)
        mean, cov = _checked(mean, t), _checked(cov, t)
        records.append(EvolutionRecord(float(t), GaussianState(mean=mean, cov=cov)))
    return records
