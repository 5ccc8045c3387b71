"""Scenario files: flat JSON documents describing one simulation run.

Recognised keys (all optional)::

    description   free text, ignored
    g, gamma, J   rates; when ``g`` is given and differs from 1 every rate is
                  divided by it, so results are always in units of g
    r, theta      squeezing magnitude and phase (theta defaults to pi/4)
    placement     "none" | "loss" | "gain" | "both"   (default "loss")
    noise         true for the full Langevin dynamics (default true)
    alpha, beta   coherent amplitudes as [re, im]     (default 0.6 e^{i pi/4})
    t_max, steps  time grid in units of g t           (default 8, 2000)
    mc            {"n_traj": ..., "dt": ..., "seed": ...} for oracle checks
    out           output path (the command line --out wins)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .model import CoherentInput, Placement, SystemConfig
from .propagator import TimeGrid
from .stochastic import McSettings

__all__ = ["ScenarioError", "Scenario", "parse_scenario", "load_scenario"]

DEFAULT_AMPLITUDE = [0.6 * math.cos(math.pi / 4), 0.6 * math.sin(math.pi / 4)]

_TOP_KEYS = {
    "description", "g", "gamma", "J", "r", "theta", "placement", "noise",
    "alpha", "beta", "t_max", "steps", "mc", "out",
}
_MC_KEYS = {"n_traj", "dt", "seed"}


class ScenarioError(ValueError):
    """Malformed scenario document."""


@dataclass(frozen=True)
class Scenario:
    config: SystemConfig
    inp: CoherentInput
    grid: TimeGrid
    mc: Optional[McSettings] = None
    out: Optional[str] = None
    description: str = ""


def _number(doc, key, default, *, minimum=None):
    value = doc.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"key {key!r}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError(f"key {key!r}: must be finite")
    if minimum is not None and value < minimum:
        raise ScenarioError(f"key {key!r}: must be >= {minimum}, got {value}")
    return value


def _amplitude(doc, key):
    value = doc.get(key, DEFAULT_AMPLITUDE)
    if (not isinstance(value, list) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
        raise ScenarioError(f"key {key!r}: expected [re, im], got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _mc(value):
    if not isinstance(value, dict):
        raise ScenarioError(f"key 'mc': expected an object, got {value!r}")
    unknown = sorted(set(value) - _MC_KEYS)
    if unknown:
        raise ScenarioError(f"unknown key 'mc.{unknown[0]}'")
    n_traj = value.get("n_traj", 100_000)
    seed = value.get("seed", 0)
    for key, v in (("n_traj", n_traj), ("seed", seed)):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ScenarioError(f"key 'mc.{key}': expected an integer, got {v!r}")
    try:
        return McSettings(n_traj=n_traj, dt=_number(value, "dt", 1e-3), seed=seed)
    except ValueError as exc:
        raise ScenarioError(f"key 'mc': {exc}") from None


def parse_scenario(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise ScenarioError(f"unknown key {unknown[0]!r}")

    g = _number(doc, "g", 1.0, minimum=0.0)
    rates = {k: _number(doc, k, d, minimum=0.0)
             for k, d in (("gamma", 1.0), ("J", 1.9), ("r", 0.0))}
    theta = _number(doc, "theta", math.pi / 4)
    if "g" in doc and g not in (0.0, 1.0):
        rates = {k: v / g for k, v in rates.items()}
        g = 1.0
    try:
        placement = Placement.parse(doc.get("placement", "loss"))
    except ValueError as exc:
        raise ScenarioError(f"key 'placement': {exc}") from None
    noise = doc.get("noise", True)
    if not isinstance(noise, bool):
        raise ScenarioError(f"key 'noise': expected true or false, got {noise!r}")
    config = SystemConfig(g=g, theta=theta, placement=placement, noise=noise, **rates)

    inp = CoherentInput(_amplitude(doc, "alpha"), _amplitude(doc, "beta"))

    steps = doc.get("steps", 2000)
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
        raise ScenarioError(f"key 'steps': expected a positive integer, got {steps!r}")
    t_max = _number(doc, "t_max", 8.0)
    if t_max <= 0:
        raise ScenarioError(f"key 't_max': must be > 0, got {t_max}")
    grid = TimeGrid(t_max=t_max, steps=steps)

    mc = _mc(doc["mc"]) if "mc" in doc else None
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        raise ScenarioError(f"key 'out': expected a path string, got {out!r}")
    description = doc.get("description", "")
    if not isinstance(description, str):
        raise ScenarioError("key 'description': expected a string")
    return Scenario(config, inp, grid, mc, out, description)


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return parse_scenario(doc)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
