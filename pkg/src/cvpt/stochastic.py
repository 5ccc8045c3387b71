"""Monte Carlo oracle for the Gaussian-state propagator.

For a linear Langevin equation with Gaussian noise, every symmetrized moment
of the quantum dynamics is reproduced by a classical Ornstein-Uhlenbeck process

    dX = M X dt + dW,    <dW dW^T> = (D / 2) dt,

started from a Gaussian with the input mean and covariance ``I / 2`` (vacuum
fluctuations).  The sample covariance of ``X`` times two is then directly
comparable with the covariance matrix ``V`` of the quantum state.

Trajectories are integrated with Euler-Maruyama.  Its O(dt) weak bias is
removed by default with a Richardson pair: every trajectory is advanced both
with step ``dt`` and with step ``dt/2`` on the same Brownian path, and moments
are extrapolated as ``2 m(dt/2) - m(dt)``.

Trajectories are split into blocks of ``block_size``; block ``k`` draws from a
Philox (counter-based) stream keyed by ``(seed, k)``, and block statistics are
merged in block order, so results depend only on the seed and the block size,
never on how blocks are scheduled across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .model import (
    CoherentInput,
    SystemConfig,
    build_diffusion_matrix,
    build_dynamic_matrix,
    initial_state,
)
from .propagator import TimeGrid

__all__ = [
    "StabilityError",
    "McSettings",
    "McEstimate",
    "Moments",
    "check_stability",
    "sample_trajectories",
]

STABILITY_LIMIT = 0.1


class StabilityError(ValueError):
    """Step size too large for a stable explicit integration."""


@dataclass(frozen=True)
class McSettings:
    n_traj: int = 100_000
    dt: float = 1e-3
    seed: int = 0
    extrapolate: bool = True
    block_size: int = 5000
    workers: int = 1

    def __post_init__(self):
        if int(self.n_traj) != self.n_traj or self.n_traj < 1:
            raise ValueError(f"n_traj must be a positive integer, got {self.n_traj!r}")
        if not float(self.dt) > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.block_size < 1 or self.workers < 1:
            raise ValueError("block_size and workers must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    """Ensemble estimate at one time; ``cov_est`` uses the ``2 x covariance`` convention."""

    time: float
    n_traj: int
    mean_est: np.ndarray
    cov_est: np.ndarray
    mean_stderr: np.ndarray
    stderr: np.ndarray


@dataclass
class Moments:
    """Running count, mean and centered second-moment sum (mergeable)."""

    n: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, samples):
        """Moments of ``samples`` with shape ``(dim, n)``."""
        samples = np.asarray(samples, dtype=float)
        mean = samples.mean(axis=1)
        c = samples - mean[:, None]
        return cls(samples.shape[1], mean, c @ c.T)

    def merge(self, other: "Moments") -> "Moments":
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = self.m2 + other.m2 + np.outer(delta, delta) * (self.n * other.n / n)
        return Moments(n, mean, m2)

    def covariance(self):
        """Unbiased sample covariance."""
        return self.m2 / (self.n - 1)


def _isserlis_var(K, i, j, k, l, n):
    # Cov(S_ij, S_kl) for the unbiased sample covariance of Gaussian data
    return (K[i, k] * K[j, l] + K[i, l] * K[j, k]) / (n - 1)


def _estimate(time, mom: Moments, extrapolate: bool) -> McEstimate:
    n = mom.n
    K = mom.covariance() if n > 1 else np.zeros_like(mom.m2)
    if not extrapolate:
        mean = mom.mean.copy()
        cov = 2.0 * K
        var_m = np.diag(K) / n
        var_c = np.array([[_isserlis_var(K, i, j, i, j, n) if n > 1 else np.inf
                           for j in range(4)] for i in range(4)])
    else:
        mean = 2.0 * mom.mean[:4] - mom.mean[4:]
        cov = 2.0 * (2.0 * K[:4, :4] - K[4:, 4:])
        var_m = np.array([4 * K[i, i] + K[i + 4, i + 4] - 4 * K[i, i + 4]
                          for i in range(4)]) / n
        var_c = np.empty((4, 4))
        for i in range(4):
            for j in range(4):
                if n < 2:
                    var_c[i, j] = np.inf
                    continue
                f, c = (i, j), (i + 4, j + 4)
                var_c[i, j] = (4 * _isserlis_var(K, *f, *f, n)
                               + _isserlis_var(K, *c, *c, n)
                               - 4 * _isserlis_var(K, *f, *c, n))
    cov = 0.5 * (cov + cov.T)
    return McEstimate(
        time=float(time),
        n_traj=n,
        mean_est=mean,
        cov_est=cov,
        mean_stderr=np.sqrt(np.maximum(var_m, 0.0)),
        stderr=2.0 * np.sqrt(np.maximum(var_c, 0.0)),
    )


def _block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.Philox(ss))


def _run_block(M, noise_sd, mu0, size, block, settings, substeps, n_out):
    rng = _block_rng(settings.seed, block)
    x = mu0[:, None] + np.sqrt(0.5) * rng.standard_normal((4, size))
    dt = settings.dt
    out = []
    ident = np.eye(4)
    if settings.extrapolate:
        h = 0.5 * dt
        step_f, step_c = ident + h * M, ident + dt * M
        sd = (noise_sd * np.sqrt(h))[None, :, None]
        xf, xc = x, x.copy()
        out.append(Moments.of(np.vstack([xf, xc])))
        for _ in range(n_out - 1):
            for _ in range(substeps):
                w = sd * rng.standard_normal((2, 4, size))
                xc = step_c @ xc + (w[0] + w[1])
                xf = step_f @ xf + w[0]
                xf = step_f @ xf + w[1]
            out.append(Moments.of(np.vstack([xf, xc])))
    else:
        step = ident + dt * M
        sd = (noise_sd * np.sqrt(dt))[:, None]
        out.append(Moments.of(x))
        for _ in range(n_out - 1):
            for _ in range(substeps):
                x = step @ x + sd * rng.standard_normal((4, size))
            out.append(Moments.of(x))
    return out


def check_stability(M, dt):
    norm = float(np.linalg.norm(M, 2))
    if norm * dt > STABILITY_LIMIT:
        raise StabilityError(
            f"||M|| dt = {norm * dt:.3g} exceeds {STABILITY_LIMIT}; "
            f"use dt <= {STABILITY_LIMIT / norm:.3g}"
        )


def sample_trajectories(config: SystemConfig, inp: CoherentInput, grid: TimeGrid,
                        settings: Optional[McSettings] = None) -> List[McEstimate]:
    """Ensemble mean and covariance estimates at every time of ``grid``."""
    settings = settings or McSettings()
    M = build_dynamic_matrix(config)
    D = build_diffusion_matrix(config)
    check_stability(M, settings.dt)
    ratio = grid.h / settings.dt
    substeps = int(round(ratio))
    if substeps < 1 or abs(substeps - ratio) > 1e-9 * max(1.0, ratio):
        raise ValueError(
            f"grid spacing {grid.h:g} is not a whole number of steps dt = {settings.dt:g}"
        )
    noise_sd = np.sqrt(np.diag(D) / 2.0)
    mu0 = initial_state(inp).mean
    n_out = grid.steps + 1

    sizes = [settings.block_size] * (settings.n_traj // settings.block_size)
    if settings.n_traj % settings.block_size:
        sizes.append(settings.n_traj % settings.block_size)

    def job(block):
        return _run_block(M, noise_sd, mu0, sizes[block], block, settings, substeps, n_out)

    if settings.workers > 1:
        with ThreadPoolExecutor(settings.workers) as pool:
            per_block = list(pool.map(job, range(len(sizes))))
    else:
        per_block = [job(b) for b in range(len(sizes))]

    estimates = []
    for k, t in enumerate(grid.times()):
        mom = per_block[0][k]
        for stats in per_block[1:]:
            mom = mom.merge(stats[k])
        estimates.append(_estimate(t, mom, settings.extrapolate))
    return estimates
