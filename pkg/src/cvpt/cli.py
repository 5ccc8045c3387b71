"""Command-line front end.

    cvpt evolve SCENARIO [--out PATH]
    cvpt scan SCENARIO --sweep VAR:LO:HI:N [--out PATH]
    cvpt oracle-check SCENARIO [--seed N]

Exit codes: 0 success, 1 oracle check failed, 2 configuration error,
3 numeric overflow.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import io
import sys
from typing import Iterator, List, Optional, Sequence

import numpy as np

from .model import SystemConfig, build_diffusion_matrix, build_dynamic_matrix, initial_state
from .observables import (
    correlation_function,
    detect_esd,
    entanglement,
    photon_number,
    physicality_margin,
)
from .propagator import (
    NumericOverflowError,
    TimeGrid,
    evolve_covariance,
    evolve_covariance_ode,
    evolve_series,
    state_at,
)
from .scenario import Scenario, ScenarioError, load_scenario
from .spectrum import classify_regime
from .stochastic import StabilityError, check_stability, sample_trajectories

__all__ = ["main", "evolve_rows", "scan_rows", "oracle_check", "parse_sweep",
           "EVOLVE_HEADER", "SCAN_HEADER"]

EVOLVE_HEADER = ["t", "I_a", "I_b", "I_a_h", "I_b_h", "corr", "E_N", "E_N_h", "phys_margin"]
SCAN_HEADER = ["var", "value", "regime", "max_real_part", "peak_E_N", "peak_time",
               "birth_time", "death_time"]
SWEEP_VARS = ("J", "r", "theta")

RK4_STEP = 1e-3
RK4_TOL = 1e-8
MC_TIMES = (1.0, 2.0, 4.0)
MC_SIGMAS = 3.0
MC_EXCEED_FRACTION = 0.05

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_OVERFLOW = 0, 1, 2, 3


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return "%.17g" % x


def evolve_rows(sc: Scenario) -> Iterator[list]:
    """Rows of the ``evolve`` table, one per grid time."""
    main = evolve_series(sc.config, sc.inp, sc.grid)
    if sc.config.noise:
        homog = evolve_series(sc.config.with_(noise=False), sc.inp, sc.grid)
    else:
        homog = main
    for rec, rec_h in zip(main, homog):
        s, s_h = rec.state, rec_h.state
        e_n = entanglement(s).e_n
        e_n_h = e_n if rec_h is rec else entanglement(s_h).e_n
        yield [
            rec.time,
            photon_number(s, "a"), photon_number(s, "b"),
            photon_number(s_h, "a"), photon_number(s_h, "b"),
            correlation_function(s), e_n, e_n_h,
            physicality_margin(s.cov_ball),
        ]


def parse_sweep(text: str):
    """``VAR:LO:HI:N`` into ``(var, values)``; raises ValueError when malformed or empty."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ValueError(f"sweep {text!r}: expected VAR:LO:HI:N")
    var, lo, hi, n = parts
    if var not in SWEEP_VARS:
        raise ValueError(f"sweep variable must be one of {', '.join(SWEEP_VARS)}, got {var!r}")
    try:
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ValueError(f"sweep {text!r}: bounds must be numbers and N an integer") from None
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValueError(f"sweep {text!r}: bounds must be finite")
    if n < 1 or hi < lo or (n > 1 and hi == lo):
        raise ValueError(f"sweep {text!r}: empty range")
    values = [lo] if n == 1 else [float(v) for v in np.linspace(lo, hi, n)]
    return var, values


def _esd(config: SystemConfig, sc: Scenario):
    series = [(rec.time, entanglement(rec.state).e_n)
              for rec in evolve_series(config, sc.inp, sc.grid)]
    return detect_esd(series, evaluator=lambda t: entanglement(state_at(config, sc.inp, t)).e_n)


def scan_rows(sc: Scenario, var: str, values: Sequence[float]) -> Iterator[list]:
    """One summary row per sweep value."""
    configs = [sc.config.with_(**{var: v}) for v in values]
    for v, config in zip(values, configs):
        regime = classify_regime(config)
        esd = _esd(config, sc)
        yield [var, v, regime.label.value, regime.max_real_part, esd.peak_value,
               esd.peak_time, esd.birth_time, esd.death_time]


@dataclasses.dataclass
class OracleReport:
    rk4_max_rel_err: float
    rk4_pass: bool
    mc_ran: bool = False
    mc_max_z: float = 0.0
    mc_mean_max_z: float = 0.0
    mc_exceed: int = 0
    mc_pairs: int = 0
    mc_pass: bool = True
    lines: List[str] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.rk4_pass and self.mc_pass


def oracle_check(sc: Scenario, seed: Optional[int] = None) -> OracleReport:
    """Compare the closed form with RK4 and, for noisy dynamics, with Monte Carlo.

    Raises :class:`StabilityError` or :class:`ScenarioError` when the
    Monte Carlo settings cannot be used.
    """
    config = sc.config
    M, D = build_dynamic_matrix(config), build_diffusion_matrix(config)
    V0 = initial_state(sc.inp).cov
    settings = None
    if config.noise:
        if sc.mc is None:
            raise ScenarioError("oracle-check needs an 'mc' block for noisy dynamics")
        settings = sc.mc if seed is None else dataclasses.replace(sc.mc, seed=seed)
        check_stability(M, settings.dt)

    steps = max(1, int(round(sc.grid.t_max / RK4_STEP)))
    grid = TimeGrid(sc.grid.t_max, steps)
    ode = evolve_covariance_ode(M, D, V0, grid)
    worst = 0.0
    for t, V_ode in zip(grid.times(), ode):
        V = evolve_covariance(M, D, V0, t)
        if not (np.all(np.isfinite(V)) and np.all(np.isfinite(V_ode))):
            raise NumericOverflowError(f"covariance at g t = {t:g} exceeds double range")
        worst = max(worst, float(np.linalg.norm(V_ode - V) / np.linalg.norm(V)))
    report = OracleReport(worst, worst <= RK4_TOL)
    report.lines.append(
        f"rk4: h={RK4_STEP:g} over g t in [0, {sc.grid.t_max:g}], max relative Frobenius "
        f"error {worst:.3e} (tol {RK4_TOL:g}) -> {'PASS' if report.rk4_pass else 'FAIL'}"
    )

    if not config.noise:
        report.lines.append("mc: skipped, noise is off so the dynamics are deterministic")
        return report
    times = [t for t in MC_TIMES if t <= sc.grid.t_max + 1e-12]
    if not times:
        report.lines.append("mc: skipped, time window ends before g t = 1")
        return report
    mc_grid = TimeGrid(times[-1], int(round(times[-1])))
    estimates = {round(e.time, 9): e for e in sample_trajectories(config, sc.inp, mc_grid, settings)}
    iu = np.triu_indices(4)
    z_all, zm_all = [], []
    for t in times:
        est = estimates[round(t, 9)]
        ref = state_at(config, sc.inp, t)
        z = np.abs(est.cov_est - ref.cov) / est.stderr
        zm = np.abs(est.mean_est - ref.mean) / est.mean_stderr
        z_all.append(z[iu])
        zm_all.append(zm)
        report.lines.append(f"mc: g t = {t:g}, max |z| covariance {z[iu].max():.2f}, "
                            f"mean {zm.max():.2f}")
    z_all = np.concatenate(z_all)
    report.mc_ran = True
    report.mc_max_z = float(z_all.max())
    report.mc_mean_max_z = float(np.max(zm_all))
    report.mc_pairs = int(z_all.size)
    report.mc_exceed = int(np.sum(z_all > MC_SIGMAS))
    report.mc_pass = report.mc_exceed <= MC_EXCEED_FRACTION * report.mc_pairs
    report.lines.append(
        f"mc: {settings.n_traj} trajectories, dt={settings.dt:g}, seed={settings.seed}: "
        f"{report.mc_exceed}/{report.mc_pairs} covariance entries beyond {MC_SIGMAS:g} sigma "
        f"(allowed {MC_EXCEED_FRACTION:.0%}) -> {'PASS' if report.mc_pass else 'FAIL'}"
    )
    return report


@contextlib.contextmanager
def _sink(path: Optional[str]):
    # buffer so that a failure part way leaves no truncated table behind
    buf = io.StringIO()
    yield buf
    if path is None:
        sys.stdout.write(buf.getvalue())
        sys.stdout.flush()
        return
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def _write_table(header, rows, path):
    with _sink(path) as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvpt",
        description="Two-mode Gaussian dynamics of coupled gain/loss waveguides with squeezing.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="JSON scenario file")
    common.add_argument("--out", help="write CSV here instead of stdout")
    common.add_argument("--seed", type=_seed, help="override the Monte Carlo seed")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evolve", parents=[common], help="time series of intensities and entanglement")
    scan = sub.add_parser("scan", parents=[common], help="summary statistics over a parameter sweep")
    scan.add_argument("--sweep", required=True, metavar="VAR:LO:HI:N",
                      help="sweep J, r or theta over N evenly spaced values")
    sub.add_parser("oracle-check", parents=[common],
                   help="check the closed form against RK4 and Monte Carlo")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = load_scenario(args.scenario)
        out = args.out if args.out is not None else sc.out
        if args.command == "evolve":
            _write_table(EVOLVE_HEADER, evolve_rows(sc), out)
            return EXIT_OK
        if args.command == "scan":
            var, values = parse_sweep(args.sweep)
            for v in values:
                sc.config.with_(**{var: v})
            _write_table(SCAN_HEADER, scan_rows(sc, var, values), out)
            return EXIT_OK
        report = oracle_check(sc, seed=args.seed)
        text = "\n".join(report.lines + ["PASS" if report.passed else "FAIL"]) + "\n"
        if args.out is not None:
            with open(args.out, "w") as fh:
                fh.write(text)
        sys.stdout.write(text)
        return EXIT_OK if report.passed else EXIT_FAIL
    except NumericOverflowError as exc:
        print(f"cvpt: numeric overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except StabilityError as exc:
        print(f"cvpt: unstable Monte Carlo step: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"cvpt: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
