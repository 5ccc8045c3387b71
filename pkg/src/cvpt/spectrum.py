"""Eigenstructure of the drift matrix: regime labels and the exceptional point."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .model import Placement, SystemConfig, build_dynamic_matrix

__all__ = [
    "Regime",
    "RegimeClass",
    "eigenvalues",
    "classify_regime",
    "spectral_gap",
    "exceptional_scan",
]

CLUSTER_TOL = 1e-6
RANK_TOL = 1e-6
REAL_TOL = 1e-9


class Regime(enum.Enum):
    PT_SYMMETRIC = "PTSymmetric"
    BROKEN = "Broken"
    EXCEPTIONAL = "Exceptional"


@dataclass(frozen=True)
class RegimeClass:
    label: Regime
    max_real_part: float
    oscillation_freq: float


def eigenvalues(M) -> np.ndarray:
    """Eigenvalues of ``M`` sorted by real part, then imaginary part."""
    w = np.linalg.eigvals(np.asarray(M, dtype=float))
    # snap roundoff-level parts so that the ordering is reproducible
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    re = np.where(np.abs(w.real) < 1e-13 * scale, 0.0, w.real)
    im = np.where(np.abs(w.imag) < 1e-13 * scale, 0.0, w.imag)
    w = re + 1j * im
    return w[np.lexsort((w.imag, w.real))]


def _clusters(w, tol=CLUSTER_TOL):
    # single-linkage grouping of eigenvalues closer than tol
    groups: List[List[int]] = []
    for i, lam in enumerate(w):
        hits = [g for g in groups if any(abs(lam - w[j]) < tol for j in g)]
        merged = [i]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(sorted(merged))
    return groups


def _geometric_multiplicity(M, lam, tol=RANK_TOL):
    n = M.shape[0]
    s = np.linalg.svd(M - lam * np.eye(n), compute_uv=False)
    return int(np.sum(s < tol))


def _analyse(M):
    """Cluster representatives and whether any coalesced cluster is defective."""
    M = np.asarray(M, dtype=float)
    w = eigenvalues(M)
    reps, defective = [], False
    for group in _clusters(w):
        lam = np.mean(w[group])
        if len(group) > 1 and _geometric_multiplicity(M, lam) < len(group):
            defective = True
        reps.append(lam)
    return w, np.array(reps), defective


def spectral_gap(M) -> float:
    """Smallest distance between distinct eigenvalues.

    Semisimple repeated eigenvalues (the drift matrix without squeezing has
    every eigenvalue doubled) count once; a defective coalescence gives 0.
    """
    _, reps, defective = _analyse(M)
    if defective or len(reps) < 2:
        return 0.0
    d = np.abs(reps[:, None] - reps[None, :])
    return float(np.min(d[np.triu_indices(len(reps), 1)]))


def classify_regime(config: SystemConfig) -> RegimeClass:
    """Label the dynamical regime of ``config``.

    Without squeezing the threshold is the coupling ``J`` against the mean
    gain/loss rate ``(g + gamma)/2``, i.e. ``J`` against ``g`` at balance.
    With squeezing the label is spectral: a defective coalescence is
    exceptional, otherwise unequal real parts (one mode outgrowing another)
    mean broken symmetry.
    """
    M = build_dynamic_matrix(config)
    w, _, defective = _analyse(M)
    max_re = float(np.max(w.real))
    freq = float(np.max(np.abs(w.imag)))
    if config.r == 0 or config.placement is Placement.NONE:
        threshold = 0.5 * (config.g + config.gamma)
        scale = max(threshold, 1e-300)
        if abs(config.J - threshold) <= 1e-9 * scale:
            label = Regime.EXCEPTIONAL
        elif config.J > threshold:
            label = Regime.PT_SYMMETRIC
        else:
            label = Regime.BROKEN
    elif defective:
        label = Regime.EXCEPTIONAL
    elif np.ptp(w.real) > REAL_TOL * max(1.0, np.max(np.abs(w))):
        label = Regime.BROKEN
    else:
        label = Regime.PT_SYMMETRIC
    return RegimeClass(label, max_re, freq)


def exceptional_scan(template: SystemConfig, J_range: Tuple[float, float],
                     samples: int) -> List[Tuple[float, float, float]]:
    """``(J, spectral_gap, max_real_part)`` on ``samples`` evenly spaced couplings."""
    lo, hi = map(float, J_range)
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not hi > lo:
        raise ValueError(f"empty coupling range [{lo}, {hi}]")
    out = []
    for J in np.linspace(lo, hi, samples):
        M = build_dynamic_matrix(template.with_(J=float(J)))
        out.append((float(J), spectral_gap(M), float(np.max(eigenvalues(M).real))))
    return out
