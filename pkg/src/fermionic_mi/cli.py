"""Command-line entry point: ``run <config>`` and ``validate [--max-sites N]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import configparser
import datetime as _dt
import hashlib
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    SweepPointError,
    SweepResult,
    reference_dirac,
    reference_holographic,
    sweep_alpha,
    sweep_distance,
    sweep_mu,
    sweep_subsystem_size,
)
from .lattice import (
    FractalDispersion,
    ModelError,
    ModelSpec,
    PhaseModulatedHopping,
    PowerLawHopping,
    SelectiveHopping,
    hopping_model,
    kitaev_model,
)

LOG_ENV = "FERMIONIC_MI_LOG"
CSV_HEADER = "swept_param,l,d,x,l_over_d,S_A,S_B,S_AB,I,I_dirac,I_holo_c1,filling"

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ORACLE = 0, 2, 3, 4

logger = logging.getLogger("fermionic_mi")

_ALLOWED = {
    "model": {
        "kind", "n_sites", "filling", "mu", "alpha", "t", "gamma", "phi",
        "s1", "s2", "t1", "t2", "r", "delta", "hopping_beta",
    },
    "sweep": {"axis", "values", "start", "stop", "count"},
    "partition": {"l", "d", "a_start"},
    "output": {"path", "precision", "holographic_c"},
    "compute": {"workers"},
}
_KINDS = ("tight_binding", "power_law", "fractal", "phase_modulated", "selective", "antipodal", "kitaev")
_AXES = ("distance", "mu", "alpha", "size")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""


@dataclass
class RunConfig:
    spec: ModelSpec
    axis: str
    values: list[float] | None
    l: int
    d: int | None
    a_start: int
    output: Path
    precision: int = 12
    holographic_c: float = 1.0
    workers: int = 1
    digest: str = ""
    raw: dict = field(default_factory=dict)


class _Section:
    def __init__(self, parser: configparser.ConfigParser, name: str):
        self.name = name
        self.items = dict(parser[name]) if parser.has_section(name) else {}

    def _raw(self, key, default):
        if key not in self.items:
            if default is _REQUIRED:
                raise ConfigError(f"{self.name}.{key}: missing required key")
            return default
        return self.items[key]

    def number(self, key, default=None, *, kind=float):
        raw = self._raw(key, default)
        if raw is None or not isinstance(raw, str):
            return raw
        try:
            if kind is int:
                value = float(raw)
                if not value.is_integer():
                    raise ValueError
                return int(value)
            return float(raw)
        except ValueError:
            raise ConfigError(f"{self.name}.{key}: expected {kind.__name__}, got {raw!r}") from None

    def text(self, key, default=None):
        raw = self._raw(key, default)
        return raw.strip().lower() if isinstance(raw, str) else raw

    def numbers(self, key):
        raw = self._raw(key, None)
        if raw is None:
            return None
        out = []
        for part in raw.replace(",", " ").split():
            try:
                out.append(float(part))
            except ValueError:
                raise ConfigError(f"{self.name}.{key}: expected a list of numbers, got {part!r}") from None
        if not out:
            raise ConfigError(f"{self.name}.{key}: empty list")
        return out


_REQUIRED = object()


def _build_model(m: _Section) -> ModelSpec:
    kind = m.text("kind", _REQUIRED)
    if kind not in _KINDS:
        raise ConfigError(f"model.kind: expected one of {', '.join(_KINDS)}, got {kind!r}")
    n = m.number("n_sites", _REQUIRED, kind=int)
    t = m.number("t", None)
    try:
        if kind == "kitaev":
            kw = {}
            if t is not None:
                kw["t"] = t
            for key in ("delta", "hopping_beta"):
                v = m.number(key, None)
                if v is not None:
                    kw[key] = v
            return kitaev_model(n, m.number("alpha", _REQUIRED), m.number("mu", _REQUIRED), **kw)
        filling = m._raw("filling", _REQUIRED)
        try:
            filling = Fraction(filling.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"model.filling: expected a fraction or decimal, got {filling!r}") from None
        t = 1.0 if t is None else t
        if kind == "tight_binding":
            variant = PowerLawHopping(math.inf, t)
        elif kind == "power_law":
            variant = PowerLawHopping(m.number("alpha", _REQUIRED), t)
        elif kind == "fractal":
            variant = FractalDispersion(m.number("gamma", 1, kind=int), t)
        elif kind == "phase_modulated":
            variant = PhaseModulatedHopping(m.number("alpha", _REQUIRED), m.number("phi", _REQUIRED), t)
        elif kind == "antipodal":
            variant = SelectiveHopping(n // 2, t1=t)
        else:
            variant = SelectiveHopping(
                m.number("s1", _REQUIRED, kind=int),
                m.number("s2", 0, kind=int),
                m.number("t1", 1.0),
                m.number("t2", 0.0),
                m.number("r", 0, kind=int),
            )
        return hopping_model(n, variant, filling)
    except ModelError as exc:
        raise ConfigError(f"model: {exc}") from None


def load_config(path: str | os.PathLike) -> RunConfig:
    path = Path(path)
    try:
        data = path.read_bytes()
        text = data.decode("utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ConfigError("config: file is not valid UTF-8") from None
    parser = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None
    )
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"config: {exc.message if hasattr(exc, 'message') else exc}") from None
    for section in parser.sections():
        if section not in _ALLOWED:
            raise ConfigError(f"{section}: unknown section")
        for key in parser[section]:
            if key not in _ALLOWED[section]:
                raise ConfigError(f"{section}.{key}: unknown key")

    spec = _build_model(_Section(parser, "model"))
    sw = _Section(parser, "sweep")
    axis = sw.text("axis", _REQUIRED)
    if axis not in _AXES:
        raise ConfigError(f"sweep.axis: expected one of {', '.join(_AXES)}, got {axis!r}")
    values = sw.numbers("values")
    if values is None and "start" in sw.items:
        start, stop = sw.number("start", _REQUIRED), sw.number("stop", _REQUIRED)
        count = sw.number("count", _REQUIRED, kind=int)
        if count < 1:
            raise ConfigError("sweep.count: must be at least 1")
        # rounding keeps grid points such as 1.0 exact
        values = [float(np.round(v, 12)) for v in np.linspace(start, stop, count)]
    if values is None and axis in ("mu", "alpha", "size"):
        raise ConfigError("sweep.values: a value list or start/stop/count is required")
    if axis in ("distance", "size") and values is not None:
        if any(not float(v).is_integer() for v in values):
            raise ConfigError("sweep.values: distance and size sweeps need integers")
        values = [int(v) for v in values]

    part = _Section(parser, "partition")
    l = part.number("l", _REQUIRED if axis != "size" else 1, kind=int)
    d = part.number("d", None if axis == "distance" else _REQUIRED, kind=int)
    a_start = part.number("a_start", 1, kind=int)
    if l < 1:
        raise ConfigError("partition.l: must be positive")
    if d is not None and d < 0:
        raise ConfigError("partition.d: must be non-negative")
    if not 1 <= a_start <= spec.n_sites:
        raise ConfigError(f"partition.a_start: must lie in 1..{spec.n_sites}")
    if d is not None and axis in ("mu", "alpha", "distance") and 2 * l + d > spec.n_sites:
        raise ConfigError(f"partition.d: 2l + d = {2 * l + d} exceeds model.n_sites = {spec.n_sites}")
    if axis == "alpha" and any(v <= 0 for v in values):
        raise ConfigError("sweep.values: alpha must be positive")

    out = _Section(parser, "output")
    out_path = Path(out.items.get("path", "mi.csv").strip())
    if not out_path.is_absolute():
        out_path = path.parent / out_path
    precision = out.number("precision", 12, kind=int)
    if not 1 <= precision <= 17:
        raise ConfigError("output.precision: must lie in 1..17")
    holo_c = out.number("holographic_c", 1.0)
    if holo_c <= 0:
        raise ConfigError("output.holographic_c: must be positive")
    workers = _Section(parser, "compute").number("workers", 1, kind=int)
    if workers < 1:
        raise ConfigError("compute.workers: must be at least 1")
    raw = {s: dict(parser[s]) for s in parser.sections()}
    return RunConfig(
        spec, axis, values, l, d, a_start, out_path, precision, holo_c, workers,
        hashlib.sha256(data).hexdigest(), raw,
    )


def execute(cfg: RunConfig) -> SweepResult:
    if cfg.axis == "distance":
        return sweep_distance(cfg.spec, cfg.l, cfg.values, a_start=cfg.a_start, workers=cfg.workers)
    if cfg.axis == "size":
        return sweep_subsystem_size(cfg.spec, cfg.d, cfg.values, a_start=cfg.a_start, workers=cfg.workers)
    if not cfg.spec.has_pairing:
        raise ConfigError(f"sweep.axis: {cfg.axis} sweeps need model.kind = kitaev")
    fn = sweep_mu if cfg.axis == "mu" else sweep_alpha
    return fn(cfg.spec, cfg.values, cfg.l, cfg.d, a_start=cfg.a_start, workers=cfg.workers)


def format_rows(result: SweepResult, precision: int = 12, holographic_c: float = 1.0) -> list[str]:
    fmt = lambda v: f"{v:.{precision}g}"  # noqa: E731
    rows = [CSV_HEADER]
    for p in result.points:
        r = p.record
        if r.x >= 1:
            dirac = holo = math.inf
        else:
            dirac, holo = reference_dirac(r.x), reference_holographic(r.x, holographic_c)
        fields = [p.value, r.l, r.d, r.x, r.l_over_d, r.S_A, r.S_B, r.S_AB, r.I, dirac, holo, p.filling]
        rows.append(",".join(str(v) if isinstance(v, int) else fmt(v) for v in fields))
    return rows


def _atomic_write(target: Path, text: str) -> None:
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def cmd_run(config: str, workers: int | None) -> int:
    try:
        cfg = load_config(config)
        if workers is not None:
            if workers < 1:
                raise ConfigError("--workers: must be at least 1")
            cfg.workers = workers
        result = execute(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SweepPointError as exc:
        print(f"numerical failure at {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    rows = format_rows(result, cfg.precision, cfg.holographic_c)
    meta = {
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "engine_version": __version__,
        "config_digest": f"sha256:{cfg.digest}",
        "axis": result.axis,
        "model": result.metadata.get("model"),
        "config": cfg.raw,
        "skipped": [{"value": v, "reason": why} for v, why in result.skipped],
        "flagged": [{"value": p.value, "note": p.note} for p in result.points if p.note],
    }
    try:
        _atomic_write(cfg.output, "\n".join(rows) + "\n")
        _atomic_write(cfg.output.with_name(cfg.output.name + ".meta.json"), json.dumps(meta, indent=2) + "\n")
    except OSError as exc:
        cfg.output.unlink(missing_ok=True)
        print(f"config error: output.path: cannot write {cfg.output}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {len(rows) - 1} rows to {cfg.output}")
    return EXIT_OK


def cmd_validate(max_sites: int) -> int:
    from .validation import format_table, run_validation

    try:
        rows = run_validation(max_sites)
    except ValueError as exc:
        print(f"config error: --max-sites: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(format_table(rows))
    failed = [r for r in rows if r.quantity != "skipped" and not r.passed]
    print(f"{len(rows) - len(failed)}/{len(rows)} checks passed")
    return EXIT_ORACLE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fermionic-mi", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the sweep described by a config file")
    run.add_argument("config")
    run.add_argument("--workers", type=int, default=None, help="override compute.workers")
    val = sub.add_parser("validate", help="cross-check the engine against the Fock oracle")
    val.add_argument("--max-sites", type=int, default=10)
    return ap


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.workers)
    return cmd_validate(args.max_sites)


if __name__ == "__main__":
    sys.exit(main())
