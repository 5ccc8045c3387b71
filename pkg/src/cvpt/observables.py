"""Quantities read off a two-mode Gaussian state.

Every function accepts a covariance matrix either as a float array or as a
``flint.arb_mat`` ball enclosure.  Entanglement is always evaluated in ball
arithmetic (a float matrix is taken as exact); the physicality margin uses it
whenever an enclosure is given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from flint import arb, arb_mat

from . import precise
from .model import OMEGA, GaussianState

__all__ = [
    "EntanglementReport",
    "EsdReport",
    "ZERO_THRESHOLD",
    "photon_number",
    "correlation_function",
    "log_negativity",
    "entanglement",
    "physicality_margin",
    "detect_esd",
]

ZERO_THRESHOLD = 1e-12
UNPHYSICAL_TOL = 1e-6


@dataclass(frozen=True)
class EntanglementReport:
    """Partially transposed symplectic eigenvalue and derived measures.

    ``unphysical`` is set when a square-root argument went negative beyond
    roundoff, which happens for covariance matrices evolved without the
    noise terms; the value is computed from the clamped arguments anyway.
    """

    eta: float
    e_n: float
    sigma: float
    detV: float
    unphysical: bool = False


@dataclass(frozen=True)
class EsdReport:
    peak_value: float
    peak_time: float
    birth_time: Optional[float]
    death_time: Optional[float]


def _mode_slice(mode):
    if mode in ("a", 0):
        return slice(0, 2)
    if mode in ("b", 1):
        return slice(2, 4)
    raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")


def photon_number(state: GaussianState, mode) -> float:
    """``<c^dag c>`` of mode ``'a'`` or ``'b'``."""
    sl = _mode_slice(mode)
    V = state.cov[sl, sl]
    mu = state.mean[sl]
    return float((V[0, 0] + V[1, 1] - 2.0) / 4.0 + (mu @ mu) / 2.0)


def correlation_function(state: GaussianState) -> float:
    """``|<a^dag b> - <a^dag><b>|`` from the cross block of the covariance."""
    V = state.cov
    return float(abs(complex(V[0, 2] + V[1, 3], V[0, 3] - V[1, 2])) / 4.0)


def _det2_ball(V, i, j):
    return V[i, j] * V[i + 1, j + 1] - V[i, j + 1] * V[i + 1, j]


def _log_negativity_ball(V: arb_mat):
    with precise.workprec(_prec_of(V)):
        sigma = _det2_ball(V, 0, 0) + _det2_ball(V, 2, 2) - 2 * _det2_ball(V, 0, 2)
        detV = V.det()
        disc = (sigma * sigma - 4 * detV).mid()
        unphysical = bool(disc < -UNPHYSICAL_TOL)
        if disc < 0:
            disc = arb(0)
        arg = (sigma - disc.sqrt()).mid()
        if arg < 0:
            unphysical = unphysical or bool(arg < -UNPHYSICAL_TOL)
            arg = arb(0)
        eta_ball = (arg / 2).sqrt()
        eta = float(eta_ball)
        if eta_ball >= 1 - arb(ZERO_THRESHOLD):
            e_n = 0.0
        elif eta_ball == 0:
            e_n = math.inf
        else:
            e_n = float(-eta_ball.log())
        return EntanglementReport(eta, e_n, float(sigma.mid()), float(detV.mid()), unphysical)


def _prec_of(V):
    # fourth-order invariants of entries up to 2^e cancel down to O(1)
    biggest = max(abs(float(V[i, j].mid())) for i in range(4) for j in range(4))
    e = math.log2(biggest) if biggest > 1 else 0.0
    return precise.BASE_BITS + 32 + math.ceil(4 * e)


def log_negativity(V) -> EntanglementReport:
    """Logarithmic negativity ``E_N = max(0, -ln eta)`` of a two-mode covariance matrix."""
    if isinstance(V, arb_mat):
        return _log_negativity_ball(V)
    V = np.asarray(V, dtype=float)
    if V.shape != (4, 4) or not np.all(np.isfinite(V)):
        raise ValueError("expected a finite 4x4 covariance matrix")
    # Sigma^2 - 4 det V cancels to O(eps Sigma^2) in doubles and the square root
    # turns that into ~1e-8 errors in eta near symmetric states, so a float
    # matrix is taken as exact and evaluated in ball arithmetic as well
    return _log_negativity_ball(precise.to_arb_mat(V))


def entanglement(state: GaussianState) -> EntanglementReport:
    """:func:`log_negativity` of a state, using its ball enclosure when present."""
    return log_negativity(state.cov_ball if state.cov_ball is not None else state.cov)


def physicality_margin(V) -> float:
    """Smallest eigenvalue of ``V + i Omega`` (non-negative for physical states)."""
    if isinstance(V, arb_mat):
        with precise.workprec(_prec_of(V)):
            return float(precise.min_eig_hermitian(V))
    V = np.asarray(V, dtype=float)
    return float(np.linalg.eigvalsh(V + 1j * OMEGA)[0])


def _refine(evaluator, lo, hi, positive_at_hi, eps, tol):
    # invariant: predicate(lo) != predicate(hi); returns the first time on the hi side
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (evaluator(mid) > eps) == positive_at_hi:
            hi = mid
        else:
            lo = mid
    return hi


def detect_esd(series: Sequence[Tuple[float, float]],
               evaluator: Optional[Callable[[float], float]] = None,
               eps: float = ZERO_THRESHOLD, tol: float = 1e-6) -> EsdReport:
    """Peak, birth and sudden-death times of an entanglement time series.

    ``series`` is a time-sorted sequence of ``(t, E_N)`` pairs.  Birth is the
    first time with ``E_N > eps`` and death the first time after the peak with
    ``E_N <= eps``.  Both are grid times unless ``evaluator`` (``t -> E_N``)
    is given, in which case the crossing is bisected to ``tol``.
    """
    if len(series) == 0:
        raise ValueError("empty entanglement series")
    times = np.array([p[0] for p in series], dtype=float)
    values = np.array([p[1] for p in series], dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("series times must be strictly increasing")

    ipeak = int(np.argmax(values))
    peak_value, peak_time = float(values[ipeak]), float(times[ipeak])
    alive = values > eps
    if not alive.any():
        return EsdReport(peak_value, peak_time, None, None)

    ib = int(np.argmax(alive))
    birth = float(times[ib])
    if ib > 0 and evaluator is not None:
        birth = _refine(evaluator, times[ib - 1], times[ib], True, eps, tol)

    death = None
    dead_after = np.nonzero(~alive[ipeak:])[0]
    if dead_after.size:
        idd = ipeak + int(dead_after[0])
        death = float(times[idd])
        if evaluator is not None:
            death = _refine(evaluator, times[idd - 1], times[idd], False, eps, tol)
    return EsdReport(peak_value, peak_time, birth, death)
