"""Physical configuration of the gain/loss waveguide pair and its Gaussian-state data.

Quadratures are ordered ``(q_a, p_a, q_b, p_b)`` with ``q = (c + c^dag)/sqrt(2)`` and
``p = -i (c - c^dag)/sqrt(2)``.  Covariance matrices use the convention
``V_ij = <X_i X_j + X_j X_i> - 2 <X_i><X_j>``, so the vacuum has ``V = I``.

Mode ``a`` lives in the amplifying guide (rate ``g``), mode ``b`` in the damping
guide (rate ``gamma``, stored positive).  Reservoirs are at zero temperature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

__all__ = [
    "Placement",
    "SystemConfig",
    "CoherentInput",
    "GaussianState",
    "OMEGA",
    "build_dynamic_matrix",
    "build_diffusion_matrix",
    "initial_state",
]


class Placement(enum.Enum):
    """Which guide(s) carry the degenerate squeezing element."""

    NONE = "none"
    LOSS = "loss"
    GAIN = "gain"
    BOTH = "both"

    @classmethod
    def parse(cls, value: "str | Placement") -> "Placement":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "none": cls.NONE,
            "loss": cls.LOSS,
            "lossguide": cls.LOSS,
            "damping": cls.LOSS,
            "gain": cls.GAIN,
            "gainguide": cls.GAIN,
            "both": cls.BOTH,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(
                f"unknown placement {value!r}; expected one of none, loss, gain, both"
            ) from None


@dataclass(frozen=True)
class SystemConfig:
    """Rates of the coupled-guide model.

    All rates are non-negative.  ``gamma`` is the loss rate, so the balanced
    (PT-symmetric) point is ``gamma == g``.  ``noise`` selects the full
    Langevin dynamics; with ``noise=False`` the diffusion vanishes and the
    evolution reduces to the noise-free (homogeneous) limit.
    """

    g: float = 1.0
    gamma: float = 1.0
    J: float = 1.9
    r: float = 0.0
    theta: float = math.pi / 4
    placement: Placement = Placement.LOSS
    noise: bool = True

    def __post_init__(self):
        object.__setattr__(self, "placement", Placement.parse(self.placement))
        for name in ("g", "gamma", "J", "r", "theta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("g", "gamma", "J", "r"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        object.__setattr__(self, "noise", bool(self.noise))

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)

    def normalized(self) -> "SystemConfig":
        """Rates expressed in units of ``g`` (no-op when ``g`` is 0 or 1)."""
        if self.g in (0.0, 1.0):
            return self
        s = self.g
        return replace(self, g=1.0, gamma=self.gamma / s, J=self.J / s, r=self.r / s)


@dataclass(frozen=True)
class CoherentInput:
    alpha: complex = 0j
    beta: complex = 0j

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean quadrature vector and covariance matrix of a two-mode state.

    ``cov_ball`` optionally carries an arbitrary-precision ball enclosure of
    ``cov`` (a ``flint.arb_mat``).  Strongly amplified states need it: once the
    entries reach ~1e8 and beyond, double precision no longer resolves the
    symplectic invariants that entanglement and physicality depend on.
    """

    mean: np.ndarray
    cov: np.ndarray
    cov_ball: Optional[object] = field(default=None, repr=False)

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(4)
        cov = np.array(self.cov, dtype=float).reshape(4, 4)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
OMEGA.setflags(write=False)


def _squeezing_block(r: float, theta: float) -> np.ndarray:
    c, s = r * math.cos(theta), r * math.sin(theta)
    return np.array([[c, s], [s, -c]])


def build_dynamic_matrix(config: SystemConfig) -> np.ndarray:
    """Drift matrix ``M`` of ``dX/dt = M X + F`` for the configured placement."""
    g, gm, J = config.g, config.gamma, config.J
    M = np.array(
        [
            [g, 0.0, 0.0, J],
            [0.0, g, -J, 0.0],
            [0.0, J, -gm, 0.0],
            [-J, 0.0, 0.0, -gm],
        ]
    )
    sq = _squeezing_block(config.r, config.theta)
    if config.placement in (Placement.GAIN, Placement.BOTH):
        M[:2, :2] += sq
    if config.placement in (Placement.LOSS, Placement.BOTH):
        M[2:, 2:] += sq
    return M


def build_diffusion_matrix(config: SystemConfig) -> np.ndarray:
    """Diffusion ``D = 2 diag(g, g, gamma, gamma)``, or zero in the noise-free limit."""
    if not config.noise:
        return np.zeros((4, 4))
    return 2.0 * np.diag([config.g, config.g, config.gamma, config.gamma])


def initial_state(inp: CoherentInput) -> GaussianState:
    """Coherent input ``|alpha, beta>``: displaced vacuum."""
    a, b = inp.alpha, inp.beta
    mean = math.sqrt(2.0) * np.array([a.real, a.imag, b.real, b.imag])
    return GaussianState(mean=mean, cov=np.eye(4))
