"""Batch front end: ``alpha12 <command> [key=value ...] [--flags]``.

Settings are merged in increasing priority from ``--config`` file,
positional ``key=value`` pairs and ``--key value`` flags.  Exit status is
0 when the checks pass, 1 on a mathematical-check failure and 2 on usage
or configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

SPEC_VERSION = "1.0"
COMMANDS = ("validate-norm", "tensors", "scurvature", "vanishing", "keylemma", "kvfcl")
DEFAULT_SAMPLES = {
    "validate-norm": 201,
    "tensors": 100,
    "scurvature": 100,
    "vanishing": 200,
    "keylemma": 100_000,
    "kvfcl": 1000,
}
DEFAULT_TOL = {"tensors": 1e-6, "scurvature": 1e-5, "vanishing": 1e-8}


class ConfigError(ValueError):
    """Malformed configuration; maps to exit status 2."""


@dataclass
class RunConfig:
    command: str
    family: str = "mroot:2"
    algebra: str = "su3"
    datum: str = "cartan"
    scalars: str = ""
    type: str = ""
    strategy: str = "random"
    dims: str = "4,2"
    left: str = ""
    right: str = ""
    samples: int = 0
    seed: int = 0
    tol: Optional[float] = None
    format: str = "json"
    out: str = ""


_KEYS = {f.name for f in fields(RunConfig)}
_INT_KEYS = {"samples", "seed"}


def _coerce(key: str, value: str, where: str):
    value = value.strip()
    try:
        if key in _INT_KEYS:
            return int(value)
        if key == "tol":
            return None if value in ("", "none") else float(value)
    except ValueError:
        raise ConfigError(f"{where}: {key} expects a number, got {value!r}") from None
    return value


def _parse_pairs(lines, source: str) -> dict:
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source} line {lineno}"
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{where}: expected key=value, got {raw.strip()!r}")
        if key not in _KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        out[key] = _coerce(key, value, where)
    return out


def _check(cfg: RunConfig) -> RunConfig:
    from .families import FamilyError, parse_family
    from .lie import parse_algebra
    from .roots import RootSystemError, parse_root_type

    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}; expected one of {', '.join(COMMANDS)}")
    if cfg.format not in ("json", "csv"):
        raise ConfigError("format must be json or csv")
    if cfg.samples < 0:
        raise ConfigError("samples must be non-negative")
    if not cfg.samples:
        cfg.samples = DEFAULT_SAMPLES[cfg.command]
    try:
        if cfg.command != "keylemma":
            parse_family(cfg.family)
        if cfg.command in ("scurvature", "vanishing", "kvfcl"):
            parse_algebra(cfg.algebra)
            if cfg.datum not in ("cartan", "perturbed"):
                raise ConfigError(f"unknown datum {cfg.datum!r}; expected cartan or perturbed")
        if cfg.command == "keylemma":
            if not cfg.type:
                raise ConfigError("keylemma needs a root system: type=B2, E8, ...")
            parse_root_type(cfg.type)
            if cfg.strategy not in ("random", "exhaustive-directions"):
                raise ConfigError("strategy must be random or exhaustive-directions")
        if cfg.command == "tensors":
            _dims(cfg)
    except (FamilyError, RootSystemError) as exc:
        raise ConfigError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    return cfg


def _build(values: dict) -> RunConfig:
    if "command" not in values or not values["command"]:
        raise ConfigError("missing required key 'command'")
    return _check(RunConfig(**values))


def parse_config(text: str, source: str = "config") -> RunConfig:
    """Parse ``key=value`` lines (``#`` starts a comment) into a defaulted config."""
    return _build(_parse_pairs(text.splitlines(), source))


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for key, value in asdict(cfg).items():
        lines.append(f"{key}={'' if value is None else value}")
    return "\n".join(lines) + "\n"


def _floats(text: str, name: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{name} must be a comma-separated list of numbers") from None


def _dims(cfg: RunConfig) -> tuple[int, int]:
    parts = [p for p in cfg.dims.split(",") if p.strip()]
    try:
        n1, n2 = (int(p) for p in parts)
    except ValueError:
        raise ConfigError("dims must be n1,n2") from None
    if n2 < 2 or n1 < n2:
        raise ConfigError("dims need n1 >= n2 >= 2")
    return n1, n2


# ----------------------------------------------------------------- commands
def _datum(cfg: RunConfig):
    from .families import parse_family
    from .lie import parse_algebra
    from .scurvature import build_cartan_datum, perturbed_datum

    algebra = parse_algebra(cfg.algebra)
    family = parse_family(cfg.family)
    if cfg.datum == "perturbed":
        return perturbed_datum(algebra, family)
    scalars = _floats(cfg.scalars, "scalars") or None
    return build_cartan_datum(algebra, family, scalars)


def run_validate_norm(cfg: RunConfig) -> tuple[dict, bool]:
    from .families import parse_family
    from .norm import validate_generating

    rep = validate_generating(parse_family(cfg.family), grid_size=cfg.samples)
    return {"family": cfg.family, **rep.to_dict()}, rep.valid


def run_tensors(cfg: RunConfig) -> tuple[dict, bool]:
    from .families import parse_family
    from .norm import DatumDecomposition, cartan_tensor, fundamental_tensor, hessian_fd_oracle, log_det_gradient_fd

    family = parse_family(cfg.family)
    n1, n2 = _dims(cfg)
    datum = DatumDecomposition(n1, n2)
    rng = np.random.default_rng(cfg.seed)
    tol = DEFAULT_TOL["tensors"] if cfg.tol is None else cfg.tol
    dev_g = dev_i = sym = cy = 0.0
    for _ in range(cfg.samples):
        y = rng.standard_normal(n1 + n2)
        tb = fundamental_tensor(family, datum, y)
        fd = hessian_fd_oracle(family, datum, y).hessian
        dev_g = max(dev_g, float(np.abs(tb.g - fd).max() / np.abs(tb.g).max()))
        ct = cartan_tensor(family, datum, y)
        grad = log_det_gradient_fd(family, datum, y)
        dev_i = max(dev_i, float(np.abs(ct.I - grad).max() / max(np.abs(ct.I).max(), 1.0)))
        C = ct.C
        sym = max(sym, float(np.abs(C - C.transpose(1, 0, 2)).max()), float(np.abs(C - C.transpose(0, 2, 1)).max()))
        cy = max(cy, float(np.abs(C @ y).max()))
    ok = dev_g < tol and dev_i < tol and sym < 1e-10 and cy < 1e-10
    return {
        "family": cfg.family,
        "dims": [n1, n2],
        "samples": cfg.samples,
        "seed": cfg.seed,
        "max_rel_deviation_g": dev_g,
        "max_rel_deviation_I": dev_i,
        "max_symmetry_residual": sym,
        "max_abs_Cy": cy,
        "tol": tol,
        "pass": ok,
    }, ok


def run_scurvature(cfg: RunConfig) -> tuple[dict, bool]:
    from .scurvature import scurvature_run

    tol = DEFAULT_TOL["scurvature"] if cfg.tol is None else cfg.tol
    rep = scurvature_run(_datum(cfg), cfg.samples, cfg.seed)
    rep["family"] = cfg.family
    rep["tol"] = tol
    rep["pass"] = rep["max_rel_deviation"] < tol
    return rep, rep["pass"]


def run_vanishing(cfg: RunConfig) -> tuple[dict, bool]:
    from .scurvature import random_interior_directions, s_curvature_oracle, vanishing_criterion

    tol = DEFAULT_TOL["vanishing"] if cfg.tol is None else cfg.tol
    datum = _datum(cfg)
    crit = vanishing_criterion(datum)
    ys = random_interior_directions(datum, cfg.samples, cfg.seed)
    max_s = max(abs(s_curvature_oracle(datum, y)) for y in ys) if len(ys) else 0.0
    consistent = (max_s < tol) == crit.holds
    return {
        "algebra": datum.algebra.name,
        "family": cfg.family,
        "datum_kind": datum.kind,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "holds": crit.holds,
        "witness": crit.witness,
        "max_abs_S_oracle": float(max_s),
        "tol": tol,
        "consistent": consistent,
    }, consistent


def run_keylemma(cfg: RunConfig) -> tuple[dict, bool]:
    from .roots import assertion_scan, build_root_system

    rep = assertion_scan(build_root_system(cfg.type), cfg.strategy, cfg.samples, cfg.seed)
    return rep.to_dict(), rep.passed


def run_kvfcl(cfg: RunConfig) -> tuple[dict, bool]:
    from .kvfcl import kvfcl_run

    datum = _datum(cfg)
    dim = datum.algebra.dim
    left = np.array(_floats(cfg.left, "left") or [0.0] * dim)
    right = np.array(_floats(cfg.right, "right") or [0.0] * dim)
    if left.size != dim or right.size != dim:
        raise ConfigError(f"left and right need {dim} frame coordinates")
    rep = kvfcl_run(datum, datum.frame @ left, datum.frame @ right, samples=cfg.samples, seed=cfg.seed)
    return {"algebra": datum.algebra.name, "family": cfg.family, "datum_kind": datum.kind, **rep}, \
        rep["class"] != "inconsistent"


RUNNERS = {
    "validate-norm": run_validate_norm,
    "tensors": run_tensors,
    "scurvature": run_scurvature,
    "vanishing": run_vanishing,
    "keylemma": run_keylemma,
    "kvfcl": run_kvfcl,
}


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for key in sorted(report):
        val = report[key]
        w.writerow([key, json.dumps(val, sort_keys=True) if isinstance(val, (dict, list)) else val])
    return buf.getvalue()


def execute(cfg: RunConfig) -> tuple[int, dict]:
    """Run a validated config; returns the exit status and the report."""
    report, ok = RUNNERS[cfg.command](cfg)
    report = {"command": cfg.command, "spec_version": SPEC_VERSION, **report}
    text = render(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return (0 if ok else 1), report


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alpha12", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", help="one of " + ", ".join(COMMANDS))
    p.add_argument("assignments", nargs="*", metavar="key=value")
    p.add_argument("--config", help="key=value config file")
    for key in sorted(_KEYS - {"command"}):
        p.add_argument(f"--{key}", dest=f"flag_{key}", default=None)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        values: dict = {}
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    values.update(_parse_pairs(fh.read().splitlines(), args.config))
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
        positional = list(args.assignments)
        if args.command and "=" in args.command:
            positional.insert(0, args.command)
        elif args.command:
            values["command"] = args.command
        values.update(_parse_pairs(positional, "arguments"))
        for key in _KEYS - {"command"}:
            flag = getattr(args, f"flag_{key}")
            if flag is not None:
                values[key] = _coerce(key, flag, f"--{key}")
        cfg = _build(values)
        status, _ = execute(cfg)
        return status
    except ConfigError as exc:
        print(f"alpha12: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
