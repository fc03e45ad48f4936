"""Named scenarios, key = value config files, CSV output and parameter sweeps.

Command line::

    twocavity simulate --scenario fig2 --out fig2.csv
    twocavity simulate --config my.cfg --kappa 0.001
    twocavity sweep --config sweep.cfg --out summary.csv
    twocavity validate --config my.cfg

Exit codes: 0 success, 2 invalid configuration, 3 numerical-invariant
violation.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import observe
from .evolve import NumericalInvariantError, TimeGrid, propagate_lindblad, propagate_unitary
from .hilbert import basis_state
from .model import (
    ATOM_DIM,
    ModelParams,
    collapse_operators,
    hamiltonian,
    make_model_space,
    required_n_max,
    validate_regime,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

WORKERS_ENV = "TWOCAVITY_WORKERS"

CSV_COLUMNS = (
    "t", "P_02", "P_20", "P_40", "P_22", "P_04",
    "p_ground", "entropy_bits", "bell_fidelity", "n_expect", "trace",
)
POP_COLUMNS = {"P_02": (0, 2), "P_20": (2, 0), "P_40": (4, 0), "P_22": (2, 2), "P_04": (0, 4)}

CONFIG_KEYS = (
    "scenario", "hamiltonian", "atom", "m", "n", "delta1", "delta2", "delta_small",
    "kappa", "gamma", "n_max", "t_end", "n_points", "bell_m", "step",
)
SWEEP_KEYS = ("axis", "values", "reduction")
SWEEP_AXES = ("delta_1", "delta_2", "delta_small", "kappa", "gamma", "delta")
REDUCTIONS = ("peak_fidelity", "peak_entropy", "time_of_peak")


class ConfigError(ValueError):
    """Invalid scenario or sweep configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    hamiltonian: str
    initial: tuple  # (atom level name, m, n)
    params: ModelParams
    grid: TimeGrid
    bell_target_m: Optional[int] = None
    lindblad: bool = False
    step: Optional[float] = None

    def __post_init__(self):
        if self.hamiltonian not in ATOM_DIM:
            raise ConfigError(f"unknown hamiltonian {self.hamiltonian!r}")
        atom, m, n = self.initial
        if m < 0 or n < 0 or m + n > self.params.n_max:
            raise ConfigError(
                f"initial photons ({m}, {n}) exceed n_max={self.params.n_max}"
            )
        if self.bell_target_m is not None and not 1 <= self.bell_target_m <= self.params.n_max:
            raise ConfigError(f"bell_m={self.bell_target_m} outside 1..{self.params.n_max}")
        if self.hamiltonian != "full" and not self.params.degenerate:
            raise ConfigError(f"{self.hamiltonian} model needs delta1 == delta2")
        if self.step is not None and not self.step > 0:
            raise ConfigError("step must be positive")
        if self.params.kappa > 0 or self.params.gamma > 0:
            object.__setattr__(self, "lindblad", True)

    @property
    def excitation(self) -> int:
        atom, m, n = self.initial
        return required_n_max(self.hamiltonian, atom, m, n)


def _fig(name, initial, bell_m, delta, delta_small, kappa, t_end, n_points):
    n_max = initial[1] + initial[2]
    return ScenarioConfig(
        name=name,
        hamiltonian="full",
        initial=initial,
        params=ModelParams(
            delta_1=delta, delta_2=delta, delta_small=delta_small, kappa=kappa, n_max=n_max
        ),
        grid=TimeGrid(0.0, t_end, n_points),
        bell_target_m=bell_m,
    )


BUILTINS = {
    "fig2": lambda: _fig("fig2", ("g", 0, 2), 2, 20.0, 5.0, 0.0, 1600.0, 1600),
    "fig3": lambda: _fig("fig3", ("g", 4, 0), 4, 20.0, 5.0, 0.0, 1600.0, 1600),
    "fig4": lambda: _fig("fig4", ("g", 0, 2), 2, 8.0, 3.0, 0.0, 160.0, 800),
    "fig5": lambda: _fig("fig5", ("g", 4, 0), 4, 8.0, 3.0, 0.0, 160.0, 800),
    "fig6": lambda: _fig("fig6", ("g", 0, 2), 2, 8.0, 3.0, 0.005, 160.0, 800),
    "fig7": lambda: _fig("fig7", ("g", 4, 0), 4, 8.0, 3.0, 0.005, 160.0, 800),
}


def builtin_scenario(name: str) -> ScenarioConfig:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown scenario {name!r}; choose from {', '.join(BUILTINS)}"
        ) from None


def _parse_number(key, text, kind=float):
    try:
        value = kind(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def read_config_text(text: str) -> dict:
    """Parse a flat ``key = value`` document (``#`` comments allowed)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return dict(parser["config"])


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            return read_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def config_from_mapping(values: dict, base: Optional[ScenarioConfig] = None) -> ScenarioConfig:
    """Build a ScenarioConfig from string key/value pairs layered on ``base``.

    ``scenario`` names a builtin to start from. When ``n_max`` is not given
    it defaults to the conserved excitation number of the initial state.
    """
    values = {k: v for k, v in values.items() if v is not None and k not in SWEEP_KEYS}
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "scenario" in values:
        base = builtin_scenario(str(values["scenario"]).strip())
    if base is None:
        base = builtin_scenario("fig2")

    level = str(values.get("hamiltonian", base.hamiltonian)).strip()
    if level not in ATOM_DIM:
        raise ConfigError(f"unknown hamiltonian {level!r}")
    atom = str(values.get("atom", base.initial[0])).strip()
    m = _parse_number("m", values.get("m", base.initial[1]), int)
    n = _parse_number("n", values.get("n", base.initial[2]), int)
    p = base.params
    kwargs = dict(
        delta_1=_parse_number("delta1", values.get("delta1", p.delta_1)),
        delta_2=_parse_number("delta2", values.get("delta2", p.delta_2)),
        delta_small=_parse_number("delta_small", values.get("delta_small", p.delta_small)),
        kappa=_parse_number("kappa", values.get("kappa", p.kappa)),
        gamma=_parse_number("gamma", values.get("gamma", p.gamma)),
    )
    try:
        excitation = required_n_max(level, atom, m, n)
    except (KeyError, IndexError):
        raise ConfigError(f"atom level {atom!r} not available in the {level} model") from None
    if "n_max" in values:
        n_max = _parse_number("n_max", values["n_max"], int)
    else:
        n_max = excitation
    try:
        params = ModelParams(g=p.g, n_max=n_max, **kwargs)
        grid = TimeGrid(
            base.grid.t_start,
            _parse_number("t_end", values.get("t_end", base.grid.t_end)),
            _parse_number("n_points", values.get("n_points", base.grid.n_points), int),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    bell = values.get("bell_m", base.bell_target_m)
    if isinstance(bell, str):
        bell = None if bell.strip().lower() in ("", "none") else _parse_number("bell_m", bell, int)
    step = values.get("step", base.step)
    if step is not None:
        step = _parse_number("step", step)
    name = str(values.get("scenario", base.name))
    return ScenarioConfig(name, level, (atom, m, n), params, grid, bell, False, step)


def simulate(config: ScenarioConfig):
    """Propagate a scenario; returns ``(trajectory, records)``."""
    params = config.params
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        space = make_model_space(config.hamiltonian, params, config.excitation)
    atom, m, n = config.initial
    try:
        psi0 = basis_state(space, atom, m, n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    H = hamiltonian(config.hamiltonian, params, space)
    if config.lindblad:
        c_ops = collapse_operators(params, space)
        traj = propagate_lindblad(
            H, c_ops, psi0, config.grid, config.step, level=config.hamiltonian, params=params
        )
    else:
        traj = propagate_unitary(H, psi0, config.grid, level=config.hamiltonian, params=params)
    return traj, observe.trajectory_records(traj, config.bell_target_m)


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def record_row(rec: observe.ObservableRecord) -> list:
    row = [_fmt(rec.t)]
    row += [_fmt(rec.pop.get(label)) for label in POP_COLUMNS.values()]
    row += [_fmt(rec.p_ground), _fmt(rec.entropy_bits), _fmt(rec.bell_fidelity),
            _fmt(rec.n_expect), _fmt(rec.trace)]
    return row


def header_lines(config: ScenarioConfig) -> list:
    p = config.params
    lines = [
        f"scenario = {config.name}",
        f"hamiltonian = {config.hamiltonian}",
        f"initial = |{config.initial[0]},{config.initial[1]},{config.initial[2]}>",
        f"delta1 = {p.delta_1!r}, delta2 = {p.delta_2!r}, delta_small = {p.delta_small!r}",
        f"kappa = {p.kappa!r}, gamma = {p.gamma!r}, n_max = {p.n_max}",
        f"lindblad = {config.lindblad}",
    ]
    return lines + ["regime: " + line for line in validate_regime(p).lines()]


def write_csv(config: ScenarioConfig, records, stream):
    for line in header_lines(config):
        stream.write(f"# {line}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(record_row(rec))


def run(config: ScenarioConfig, out: Optional[str] = None, stderr=None) -> int:
    """Simulate and write the CSV to ``out`` (stdout when None)."""
    stderr = stderr or sys.stderr
    try:
        _, records = simulate(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except NumericalInvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=stderr)
        return EXIT_NUMERICAL
    if out is None:
        write_csv(config, records, sys.stdout)
    else:
        with open(out, "w", newline="") as fh:
            write_csv(config, records, fh)
    return EXIT_OK


@dataclass(frozen=True)
class SweepConfig:
    base: ScenarioConfig
    axis: str
    values: tuple
    reduction: str

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"axis must be one of {SWEEP_AXES}; got {self.axis!r}")
        if self.reduction not in REDUCTIONS:
            raise ConfigError(f"reduction must be one of {REDUCTIONS}; got {self.reduction!r}")
        if not self.values or not all(math.isfinite(v) for v in self.values):
            raise ConfigError("sweep values must be a nonempty list of finite numbers")
        if self.reduction == "peak_fidelity" and self.base.bell_target_m is None:
            raise ConfigError("peak_fidelity needs bell_m")

    def point(self, value: float) -> ScenarioConfig:
        p = self.base.params
        if self.axis == "delta":
            new = replace(p, delta_1=value, delta_2=value)
        else:
            new = replace(p, **{self.axis: value})
        return replace(self.base, params=new, lindblad=False)


def sweep_from_mapping(values: dict) -> SweepConfig:
    missing = [k for k in SWEEP_KEYS if k not in values]
    if missing:
        raise ConfigError(f"sweep config missing keys: {', '.join(missing)}")
    base = config_from_mapping(values)
    nums = tuple(
        _parse_number("values", v.strip()) for v in str(values["values"]).split(",") if v.strip()
    )
    return SweepConfig(base, values["axis"].strip(), nums, values["reduction"].strip())


def reduce_records(records, reduction: str) -> float:
    fid = [r.bell_fidelity for r in records]
    ent = np.array([r.entropy_bits for r in records])
    if reduction == "peak_entropy":
        return float(ent.max())
    if reduction == "peak_fidelity":
        return float(max(fid))
    if fid[0] is not None:
        return records[int(np.argmax(fid))].t
    return records[int(np.argmax(ent))].t


def _sweep_point(args):
    config, reduction = args
    try:
        _, records = simulate(config)
        return reduce_records(records, reduction), "ok"
    except (ConfigError, NumericalInvariantError, ValueError) as exc:
        return None, f"failed: {exc}"


def sweep_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def sweep_results(sweep: SweepConfig, workers: Optional[int] = None) -> list:
    """``[(value, result or None, status)]`` sorted by axis value."""
    values = sorted(sweep.values)
    jobs = []
    for v in values:
        try:
            jobs.append((sweep.point(v), sweep.reduction))
        except (ConfigError, ValueError) as exc:
            jobs.append(str(exc))
    workers = sweep_workers() if workers is None else workers
    runnable = [j for j in jobs if not isinstance(j, str)]
    if workers > 1 and len(runnable) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(runnable))) as pool:
            outcomes = iter(list(pool.map(_sweep_point, runnable)))
    else:
        outcomes = iter([_sweep_point(j) for j in runnable])
    results = []
    for v, job in zip(values, jobs):
        if isinstance(job, str):
            results.append((v, None, f"failed: {job}"))
        else:
            res, status = next(outcomes)
            results.append((v, res, status))
    return results


def run_sweep(sweep: SweepConfig, out: Optional[str] = None, workers: Optional[int] = None) -> int:
    results = sweep_results(sweep, workers)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for line in header_lines(sweep.base):
        buf.write(f"# base {line}\n")
    writer.writerow([sweep.axis, sweep.reduction, "status"])
    for value, res, status in results:
        writer.writerow([repr(float(value)), _fmt(res), "ok" if status == "ok" else "failed"])
        if status != "ok":
            print(f"sweep point {sweep.axis}={value}: {status}", file=sys.stderr)
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        with open(out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK


def _override_args(parser: argparse.ArgumentParser):
    for key in CONFIG_KEYS:
        if key == "scenario":
            continue
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)


def _collect(args, with_scenario=True) -> dict:
    values = load_config_file(args.config) if args.config else {}
    if with_scenario and getattr(args, "scenario", None):
        values["scenario"] = args.scenario
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if key != "scenario" and flag is not None:
            values[key] = flag
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twocavity", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario and write its CSV")
    sim.add_argument("--scenario", choices=sorted(BUILTINS))
    sim.add_argument("--config")
    sim.add_argument("--out")
    _override_args(sim)

    sw = sub.add_parser("sweep", help="run a parameter sweep and write a summary CSV")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out")

    val = sub.add_parser("validate", help="print the parameter-regime report")
    val.add_argument("--config")
    val.add_argument("--scenario", choices=sorted(BUILTINS))
    _override_args(val)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            values = _collect(args)
            if not values.get("scenario") and not args.config:
                raise ConfigError("simulate needs --scenario or --config")
            return run(config_from_mapping(values), args.out)
        if args.command == "sweep":
            return run_sweep(sweep_from_mapping(load_config_file(args.config)), args.out)
        config = config_from_mapping(_collect(args))
        for line in validate_regime(config.params).lines():
            print(line)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
