"""Command-line sweeps producing gnuplot-ready CSV.

Usage::

    ramseyfringe fringe   --config run.json --out fringe.csv
    ramseyfringe contour  --engine numeric --threads 4
    ramseyfringe ensemble --oracle
    ramseyfringe width
    ramseyfringe pulse    --set sweep.t0_values=[0,5,10]

A JSON config (``--config``) is merged over the defaults, then ``--set
dotted.key=value`` overrides and the dedicated flags are applied; flags
win. Unknown keys are rejected. The effective configuration is written
as a ``#`` comment at the top of every output, minus execution-only
settings (threads, output path), so outputs are byte-identical across
thread counts.

Exit status: 0 on success, 1 on configuration errors, 2 on numerical
domain errors.
"""
from __future__ import annotations

import argparse
import copy
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np

from . import __version__
from .analysis import find_first_zero, fwhm, grid_axis
from .analytic import central_zero_estimate, exact_central_zero
from .core import SequenceConfig
from .ensemble import PhaseSpaceGaussian
from .errors import NoZeroFound, RamseyError
from .estimators import EnsembleFringeModel, RamseyFringeModel
from .numeric import IntegratorParams, PictureTag
from .pulses import SIN_FOURTH, Mesa

logger = logging.getLogger(__name__)

COMMANDS = ("fringe", "contour", "ensemble", "width", "pulse")
ENGINES = ("analytic", "numeric", "ensemble")


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """Shortest round-trip decimal for a double."""
    return repr(float(x))


@dataclass
class SweepConfig:
    delta_min: float = -8.0
    delta_max: float = 8.0
    delta_points: int = 321
    t0_values: list = field(default_factory=lambda: [0.0, 5.0, 10.0])
    t0_min: float = 0.0
    t0_max: float = 20.0
    t0_points: int = 81
    mode: str = "opposite"

    def __post_init__(self):
        # canonical types so "1" and "1.0" give identical headers
        for name in ("delta_min", "delta_max", "t0_min", "t0_max"):
            setattr(self, name, float(getattr(self, name)))
        for name in ("delta_points", "t0_points"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ConfigError(f"sweep.{name} must be an integer")
            setattr(self, name, int(value))
        if self.mode not in ("opposite", "equal"):
            raise ConfigError(f"sweep.mode must be 'opposite' or 'equal', got {self.mode!r}")
        if self.delta_points < 1 or self.t0_points < 1:
            raise ConfigError("sweep point counts must be >= 1")
        for name in ("delta_min", "delta_max", "t0_min", "t0_max"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"sweep.{name} must be finite")
        self.t0_values = [float(t) for t in self.t0_values]

    def deltas(self) -> np.ndarray:
        return grid_axis(self.delta_min, self.delta_max, self.delta_points)

    def t0_grid(self) -> np.ndarray:
        return grid_axis(self.t0_min, self.t0_max, self.t0_points)


@dataclass
class RunConfig:
    """Everything a CLI run needs."""

    sequence: SequenceConfig = field(default_factory=SequenceConfig)
    ensemble: dict = field(default_factory=lambda: {"k_mean": 1.0, "dk": 0.1})
    spatial: dict = field(default_factory=lambda: {"field_length": 1.0, "gap_length": 5.0, "rabi": None})
    integrator: IntegratorParams = field(default_factory=IntegratorParams)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    engine: str = "analytic"
    picture: str = "i1"
    area_normalized: bool = False
    oracle: bool = False
    # free-form annotations (e.g. transition frequencies); carried, never read
    metadata: dict = field(default_factory=dict)
    threads: Optional[int] = None
    out: Optional[str] = None

    EXECUTION_ONLY = ("threads", "out")

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        PictureTag.parse(self.picture)
        unknown = set(self.ensemble) - {"k_mean", "dk", "dx"}
        if unknown:
            raise ConfigError(f"unknown ensemble keys: {sorted(unknown)}")
        unknown = set(self.spatial) - {"field_length", "gap_length", "rabi"}
        if unknown:
            raise ConfigError(f"unknown spatial keys: {sorted(unknown)}")
        if not isinstance(self.metadata, dict):
            raise ConfigError("metadata must be an object")
        if self.threads is not None and self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def to_dict(self, execution: bool = True) -> dict:
        d = {
            "sequence": self.sequence.to_dict(),
            "ensemble": dict(self.ensemble),
            "spatial": dict(self.spatial),
            "integrator": {"step": self.integrator.step, "max_defect": self.integrator.max_defect},
            "sweep": {f.name: copy.copy(getattr(self.sweep, f.name)) for f in fields(SweepConfig)},
            "engine": self.engine,
            "picture": self.picture,
            "area_normalized": self.area_normalized,
            "oracle": self.oracle,
            "metadata": copy.deepcopy(self.metadata),
            "threads": self.threads,
            "out": self.out,
        }
        if not execution:
            for key in self.EXECUTION_ONLY:
                d.pop(key)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        try:
            if "sequence" in d:
                d["sequence"] = _strict(SequenceConfig.from_dict, d["sequence"], "sequence")
            if "integrator" in d:
                d["integrator"] = _strict(lambda x: IntegratorParams(**x), d["integrator"], "integrator")
            if "sweep" in d:
                d["sweep"] = _strict(lambda x: SweepConfig(**x), d["sweep"], "sweep")
            return cls(**d)
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from exc


def _strict(build, value, where):
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be an object")
    try:
        return build(value)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _set_dotted(d: dict, path: str, value):
    keys = path.split(".")
    node = d
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot set {path!r}: {k!r} is not an object")
    node[keys[-1]] = value


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "envelope":
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(args) -> RunConfig:
    data = RunConfig().to_dict()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be an object")
        unknown = set(user) - set(data)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = _merge(data, user)
    for item in args.set or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        _set_dotted(data, key, value)
    for flag in ("engine", "picture", "threads", "out"):
        value = getattr(args, flag)
        if value is not None:
            data[flag] = value
    if args.oracle:
        data["oracle"] = True
    return RunConfig.from_dict(data)


# ---------------------------------------------------------------- models


def _threads(cfg: RunConfig) -> int:
    return cfg.threads or os.cpu_count() or 1


def fringe_model(cfg: RunConfig) -> RamseyFringeModel:
    seq = cfg.sequence
    p1, p2 = seq.pulse1, seq.pulse2
    if (p1.rabi_peak, p1.duration, p1.envelope) != (p2.rabi_peak, p2.duration, p2.envelope):
        raise ConfigError("sweeps need both pulses to share rabi_peak, duration and envelope")
    return RamseyFringeModel(
        rabi=p1.rabi_peak, tau=p1.duration, gap=seq.gap, entrance_time=seq.entrance_time,
        engine=cfg.engine, envelope=p1.envelope, picture=cfg.picture,
        step=cfg.integrator.step, max_defect=cfg.integrator.max_defect, phi1=p1.phase, phi2=p2.phase,
        area_normalized=cfg.area_normalized, n_jobs=_threads(cfg),
    ).fit()


def ensemble_model(cfg: RunConfig, oracle: Optional[bool] = None) -> EnsembleFringeModel:
    dist = PhaseSpaceGaussian.from_dict(cfg.ensemble)
    sp = cfg.spatial
    return EnsembleFringeModel(
        k_mean=dist.k_mean, dk=dist.dk, field_length=sp.get("field_length", 1.0),
        gap_length=sp.get("gap_length", 5.0), rabi=sp.get("rabi"),
        hbar=cfg.sequence.constants.hbar, mass=cfg.sequence.constants.mass,
        oracle=cfg.oracle if oracle is None else oracle, n_jobs=_threads(cfg),
    ).fit()


def _rows(cfg: RunConfig, deltas: np.ndarray, t0: float) -> np.ndarray:
    t = np.full_like(deltas, t0)
    if cfg.sweep.mode == "equal":
        return np.column_stack([deltas, deltas, t])
    return np.column_stack([deltas, t])


# ---------------------------------------------------------------- commands


INT_KEYS = ("delta_points", "t0_points")


def _canonical(obj, key=None):
    """Integers become floats (except counts) so ``5`` and ``5.0`` print alike."""
    if isinstance(obj, dict):
        return {k: _canonical(v, k) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_canonical(v) for v in obj]
    if isinstance(obj, int) and not isinstance(obj, bool) and key not in INT_KEYS:
        return float(obj)
    return obj


def _header(out, command: str, cfg: RunConfig):
    out.write(f"# ramseyfringe {__version__} {command}\n")
    out.write("# config: " + json.dumps(_canonical(cfg.to_dict(execution=False)), sort_keys=True) + "\n")


def _blocks(out, cfg: RunConfig, model, value_name: str, t0_name: str = "t0", rows=None):
    rows = rows or (lambda d, t0: _rows(cfg, d, t0))
    deltas = cfg.sweep.deltas()
    for i, t0 in enumerate(cfg.sweep.t0_values):
        if i:
            out.write("\n\n")
        out.write(f"# {t0_name} = {fmt(t0)}\n")
        out.write(f"delta,{value_name}\n")
        for d, v in zip(deltas, model.predict(rows(deltas, t0))):
            out.write(f"{fmt(d)},{fmt(v)}\n")


def cmd_fringe(cfg: RunConfig, out):
    if cfg.engine == "ensemble":
        return cmd_ensemble(cfg, out)
    _header(out, "fringe", cfg)
    _blocks(out, cfg, fringe_model(cfg), "p12")


def cmd_pulse(cfg: RunConfig, out):
    seq = cfg.sequence
    envelope = seq.pulse1.envelope
    if isinstance(envelope, Mesa):
        envelope = SIN_FOURTH
    seq = replace(seq, pulse1=replace(seq.pulse1, envelope=envelope), pulse2=replace(seq.pulse2, envelope=envelope))
    cfg = replace(cfg, engine="numeric", sequence=seq)
    _header(out, "pulse", cfg)
    _blocks(out, cfg, fringe_model(cfg), "p12")


def cmd_ensemble(cfg: RunConfig, out):
    _header(out, "ensemble", cfg)
    _blocks(out, cfg, ensemble_model(cfg), "p12_avg", t0_name="t0_center",
            rows=lambda d, t0: np.column_stack([d, np.full_like(d, t0)]))


def cmd_contour(cfg: RunConfig, out):
    _header(out, "contour", cfg)
    deltas, t0s = cfg.sweep.deltas(), cfg.sweep.t0_grid()
    if cfg.engine == "ensemble":
        model = ensemble_model(cfg)
    else:
        model = fringe_model(cfg)
    T, D = np.meshgrid(t0s, deltas, indexing="ij")
    X = np.column_stack([D.ravel(), T.ravel()])
    if cfg.sweep.mode == "equal" and cfg.engine != "ensemble":
        X = np.column_stack([D.ravel(), D.ravel(), T.ravel()])
    grid = np.asarray(model.predict(X)).reshape(len(t0s), len(deltas))
    axis = "t0_center" if cfg.engine == "ensemble" else "t0"
    out.write(f"{axis}\\delta," + ",".join(fmt(d) for d in deltas) + "\n")
    for t0, row in zip(t0s, grid):
        out.write(fmt(t0) + "," + ",".join(fmt(v) for v in row) + "\n")


def cmd_width(cfg: RunConfig, out):
    _header(out, "width", cfg)
    if cfg.engine == "ensemble":
        model = ensemble_model(cfg)
    else:
        model = fringe_model(cfg)
    seq = cfg.sequence
    tau, gap = seq.pulse1.duration, seq.gap
    search = max(abs(cfg.sweep.delta_min), abs(cfg.sweep.delta_max))
    out.write("t0,first_zero,first_zero_neg,exact_zero,estimate,ratio,fwhm,peak\n")
    for t0 in cfg.sweep.t0_values:
        curve = model.curve(t0)
        try:
            zero = find_first_zero(curve, search)
            zero_neg = -find_first_zero(lambda x: curve(-np.asarray(x)), search)
        except NoZeroFound:
            zero = zero_neg = math.nan
        estimate = central_zero_estimate(tau, gap, t0)
        exact = exact_central_zero(tau, gap, t0)
        width = fwhm(curve, search)
        ratio = estimate / zero if zero else math.nan
        cells = (t0, zero, zero_neg, exact, estimate, ratio, width, curve(0.0))
        out.write(",".join(fmt(c) for c in cells) + "\n")


HANDLERS = {
    "fringe": cmd_fringe,
    "contour": cmd_contour,
    "ensemble": cmd_ensemble,
    "width": cmd_width,
    "pulse": cmd_pulse,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ramseyfringe", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", help="JSON run configuration")
        p.add_argument("--out", metavar="PATH", help="output CSV (default: stdout)")
        p.add_argument("--engine", choices=ENGINES)
        p.add_argument("--picture", choices=[t.value for t in PictureTag])
        p.add_argument("--threads", type=int, metavar="N")
        p.add_argument("--oracle", action="store_true", help="ensemble: use the 2D quadrature")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config entry, e.g. sweep.t0_values=[0,10]")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        buf = io.StringIO()
        HANDLERS[args.command](cfg, buf)
    except RamseyError as exc:
        print(f"ramseyfringe: numerical error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, TypeError, KeyError) as exc:
        print(f"ramseyfringe: config error: {exc}", file=sys.stderr)
        return 1
    text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
