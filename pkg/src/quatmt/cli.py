"""Command-line experiment driver.

Each command reads one JSON config (``--config``) whose entries may be
overridden by flags, and writes CSV/JSON files into ``--out`` (a directory,
default ``.``).  Exit codes: 0 success, 1 a numerical check failed, 2 bad
input.

Config keys
-----------
gram        poles | random_poles, n, degree, nodes, tol
approximate poles, target, n_max, degree, nodes, tol
reconstruct boundary_file | (series, slice), queries, reference, nodes, tol
selftest    seed

``poles`` is either a path to a pole file or an inline object
``{"poles": [[w, x, y, z], ...], "slice": [x, y, z] | null}``.
``random_poles`` is ``{"count": n, "max_radius": r, "slice": [x, y, z] | null}``
drawn with ``seed``; with ``"slice": null`` a random slice is used.

``target`` is one of ``{"series": [[w, x, y, z], ...]}``,
``{"series_file": path}``, ``{"boundary_file": path}`` or
``{"reciprocal": [w, x, y, z]}`` for ``(1 - q b)^-*``.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import checks
from .hardy import (
    SliceBoundaryGrid,
    cauchy_slice_eval,
    extend_from_slice,
    poisson_at,
    regular_cauchy_eval,
)
from .mt_system import (
    PoleSequence,
    build_mt,
    gram_matrix,
    identity_deviation,
)
from .projection import convergence_table, interpolation_residuals, mt_coefficients
from .quat_core import DomainError, Quaternion, UnitImaginary, UNIT_I
from .series import (
    RegularSeries,
    eval_points,
    max_degree,
    regular_reciprocal,
    series_from_list,
)

log = logging.getLogger("quatmt")

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2


class ConfigError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def load_config(args) -> tuple[dict, Path]:
    if args.config is None:
        return {}, Path.cwd()
    path = Path(args.config)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data, path.parent


def merged(cfg: dict, args, key: str, default=None):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    return cfg.get(key, default)


def _resolve(base: Path, p: str) -> Path:
    path = Path(p)
    return path if path.is_absolute() else base / path


def _direction(raw) -> Optional[UnitImaginary]:
    if raw is None:
        return None
    if len(raw) != 3:
        raise ConfigError(f"slice direction must be [x, y, z], got {raw!r}")
    return UnitImaginary.from_vector(raw)


def load_poles(cfg: dict, base: Path, seed: int) -> PoleSequence:
    if "poles" in cfg:
        spec = cfg["poles"]
        if isinstance(spec, str):
            spec = json.loads(_resolve(base, spec).read_text())
        poles = PoleSequence.from_dict(spec)
    elif "random_poles" in cfg:
        spec = cfg["random_poles"]
        rng = np.random.default_rng(seed)
        count = int(spec.get("count", 6))
        rmax = float(spec.get("max_radius", 0.8))
        I = _direction(spec.get("slice")) or UnitImaginary.from_vector(rng.normal(size=3))
        poles = PoleSequence.on_slice(rng.uniform(0.0, rmax, count), rng.uniform(0.0, 2 * math.pi, count), I)
    else:
        raise ConfigError("config needs 'poles' or 'random_poles'")
    if len(poles) == 0:
        raise ConfigError("pole list is empty")
    if poles.common_slice is None:
        detected = poles.detect_slice(fallback=UNIT_I)
        if detected is not None:
            poles = poles.with_slice(detected)
    return poles


def load_target(cfg: dict, base: Path, degree: int):
    spec = cfg.get("target")
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError("'target' must be an object with exactly one of series, series_file, boundary_file, reciprocal")
    kind, value = next(iter(spec.items()))
    if kind == "series":
        return series_from_list(value)
    if kind == "series_file":
        return series_from_list(json.loads(_resolve(base, value).read_text()))
    if kind == "boundary_file":
        return SliceBoundaryGrid.from_csv(_resolve(base, value).read_text())
    if kind == "reciprocal":
        b = Quaternion.coerce(value)
        return regular_reciprocal(RegularSeries([(1.0, 0.0, 0.0, 0.0), (-b).as_array()]), degree=degree)
    raise ConfigError(f"unknown target kind {kind!r}")


def _write(out: Path, name: str, text: str):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _gram_csv(G: np.ndarray) -> str:
    n = G.shape[0]
    header = ",".join(f"g{c}_{comp}" for c in range(n) for comp in "wxyz")
    lines = [header]
    for r in range(n):
        lines.append(",".join(fmt(v) for v in G[r].reshape(-1)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_gram(args) -> int:
    cfg, base = load_config(args)
    seed = int(merged(cfg, args, "seed", 0))
    degree = _degree(cfg, args)
    nodes = int(merged(cfg, args, "nodes", 1024))
    tol = float(merged(cfg, args, "tol", 1e-8))
    _validate(degree, nodes)
    poles = load_poles(cfg, base, seed)
    n = int(cfg.get("n", len(poles)))
    sys_ = build_mt(poles, n, degree)
    out = Path(merged(cfg, args, "out", "."))

    Gc = gram_matrix(sys_, "coeff")
    _write(out, "gram_coeff.csv", _gram_csv(Gc))
    dev_c = identity_deviation(Gc)
    if poles.common_slice is None:
        print(f"gram: poles span several slices; off-slice experiment, coeff deviation {dev_c:.3e} (not asserted)")
        return EXIT_OK
    Gq = gram_matrix(sys_, "quadrature", nodes)
    _write(out, "gram_quadrature.csv", _gram_csv(Gq))
    dev_q = identity_deviation(Gq)
    dev = max(dev_c, dev_q)
    print(f"gram: n={n} degree={degree} nodes={nodes}")
    print(f"gram: max deviation from identity coeff={dev_c:.3e} quadrature={dev_q:.3e}")
    if dev < tol:
        print(f"PASS gram deviation {dev:.3e} < tol {tol:.1e}")
        return EXIT_OK
    rmax = max(a.norm() for a in poles.params[:n])
    print(
        f"FAIL gram deviation {dev:.3e} >= tol {tol:.1e}; largest |a| = {rmax:.6g}, "
        f"coefficient tail ~ |a|^N = {rmax ** degree:.3e} at N = {degree}"
    )
    return EXIT_FAIL


def cmd_approximate(args) -> int:
    cfg, base = load_config(args)
    seed = int(merged(cfg, args, "seed", 0))
    degree = _degree(cfg, args)
    nodes = int(merged(cfg, args, "nodes", 1024))
    _validate(degree, nodes)
    poles = load_poles(cfg, base, seed)
    if poles.common_slice is None:
        raise ConfigError("approximate needs poles on a common slice")
    target = load_target(cfg, base, degree)
    if isinstance(target, SliceBoundaryGrid):
        if np.linalg.norm(target.direction.vector() - poles.common_slice.vector()) > 1e-12:
            raise ConfigError("boundary samples and poles are on different slices")
    n_max = int(cfg.get("n_max", len(poles)))
    out = Path(merged(cfg, args, "out", "."))

    sys_ = build_mt(poles, n_max, degree)
    coeffs = mt_coefficients(target, sys_, nodes=nodes)
    _write(out, "coefficients.json", json.dumps([list(c.as_tuple()) for c in coeffs]) + "\n")
    table = convergence_table(target, poles, n_max, N=degree, nodes=nodes)
    _write(out, "convergence.csv", "n,residual\n" + "".join(f"{n},{fmt(r)}\n" for n, r in table))
    interp = interpolation_residuals(target, sys_, nodes=nodes)
    rows = ["index,pole_w,pole_x,pole_y,pole_z,residual"]
    for k, (a, r) in enumerate(zip(poles.params, interp), start=1):
        rows.append(",".join([str(k), *(fmt(v) for v in a.as_tuple()), fmt(r)]))
    _write(out, "interpolation.csv", "\n".join(rows) + "\n")

    final = table[-1][1]
    monotone = all(b[1] <= a[1] for a, b in zip(table, table[1:]))
    print(f"approximate: n_max={n_max} final residual {final:.3e}; monotone={monotone}; max interpolation residual {max(interp):.3e}")
    tol = merged(cfg, args, "tol", None)
    if tol is not None and final >= float(tol):
        print(f"FAIL final residual {final:.3e} >= tol {float(tol):.1e}")
        return EXIT_FAIL
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg, base = load_config(args)
    nodes = int(merged(cfg, args, "nodes", 1024))
    _validate(1, nodes)
    series = None
    if "boundary_file" in cfg:
        grid = SliceBoundaryGrid.from_csv(_resolve(base, cfg["boundary_file"]).read_text())
    elif "series" in cfg:
        series = series_from_list(cfg["series"])
        I = _direction(cfg.get("slice")) or UNIT_I
        grid = SliceBoundaryGrid.from_series(series, I, nodes)
    else:
        raise ConfigError("reconstruct needs 'boundary_file' or 'series'")
    queries = [Quaternion.coerce(q) for q in cfg.get("queries", [])]
    if not queries:
        raise ConfigError("reconstruct needs a non-empty 'queries' list")
    refs = cfg.get("reference")
    if refs is not None:
        if len(refs) != len(queries):
            raise ConfigError("'reference' must match 'queries' in length")
        refs = [Quaternion.coerce(r) for r in refs]
    elif series is not None:
        refs = [None] * len(queries)
    I = grid.direction
    poisson_slice = lambda z: poisson_at(grid, z)
    cauchy_slice = lambda z: cauchy_slice_eval(grid, z)

    cols = ["index", "status"]
    cols += [f"q_{c}" for c in "wxyz"]
    for name in ("cauchy_regular", "poisson_ext", "cauchy_slice_ext"):
        cols += [f"{name}_{c}" for c in "wxyz"]
    cols += ["err_cauchy_regular", "err_poisson_ext", "err_cauchy_slice_ext"]
    lines = [",".join(cols)]
    worst = 0.0
    nan4 = [math.nan] * 4
    for k, q in enumerate(queries):
        status = "ok"
        try:
            vals = [
                regular_cauchy_eval(grid, q),
                extend_from_slice(poisson_slice, I, q),
                extend_from_slice(cauchy_slice, I, q),
            ]
        except DomainError as exc:
            status = "outside_ball" if q.norm() >= 1.0 - 1e-9 else "error"
            log.info("query %d: %s", k, exc)
            vals = None
        row = [str(k), status, *(fmt(v) for v in q.as_tuple())]
        if vals is None:
            row += [fmt(v) for v in nan4 * 3] + [fmt(math.nan)] * 3
        else:
            for v in vals:
                row += [fmt(c) for c in v.as_tuple()]
            ref = None
            if refs is not None:
                ref = refs[k] if refs[k] is not None else Quaternion.from_array(eval_points(series.coeffs, q.as_array()))
            errs = [math.nan] * 3 if ref is None else [(v - ref).norm() for v in vals]
            worst = max([worst] + [e for e in errs if math.isfinite(e)])
            row += [fmt(e) for e in errs]
        lines.append(",".join(row))
    out = Path(merged(cfg, args, "out", "."))
    _write(out, "reconstruct.csv", "\n".join(lines) + "\n")
    print(f"reconstruct: {len(queries)} queries, worst error {worst:.3e}")
    tol = merged(cfg, args, "tol", None)
    if tol is not None and worst >= float(tol):
        print(f"FAIL worst reconstruction error {worst:.3e} >= tol {float(tol):.1e}")
        return EXIT_FAIL
    return EXIT_OK


def cmd_selftest(args) -> int:
    if args.list:
        for name in checks.names():
            print(name)
        return EXIT_OK
    cfg, _ = load_config(args)
    seed = int(merged(cfg, args, "seed", 0))
    failed = 0
    for name, ok, err, tol, note in checks.run_all(seed):
        tag = "PASS" if ok else "FAIL"
        extra = f" ({note})" if note else ""
        print(f"{tag} {name} err={err:.3e} tol={tol:.1e}{extra}")
        failed += not ok
    total = len(checks.REGISTRY)
    print(f"selftest: {total - failed}/{total} passed (seed {seed})")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _degree(cfg: dict, args) -> int:
    cap = max_degree()
    degree = int(merged(cfg, args, "degree", cap))
    if degree > cap:
        log.warning("degree %d exceeds QUATMT_MAX_DEGREE cap %d; using %d", degree, cap, cap)
        degree = cap
    return degree


def _validate(degree: int, nodes: int):
    if degree < 1:
        raise ConfigError("truncation degree N must be >= 1")
    if nodes < 4:
        raise ConfigError("quadrature nodes M must be >= 4")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output directory (default: config 'out' or .)")
    common.add_argument("--nodes", type=int, help="quadrature nodes M")
    common.add_argument("--degree", type=int, help="series truncation degree N")
    common.add_argument("--tol", type=float, help="pass/fail tolerance")
    common.add_argument("--seed", type=int, help="seed for randomized inputs (default 0)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="quatmt", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gram", parents=[common], help="Gram matrices of an M-T system").set_defaults(func=cmd_gram)
    sub.add_parser("approximate", parents=[common], help="project a target onto the system").set_defaults(
        func=cmd_approximate
    )
    sub.add_parser("reconstruct", parents=[common], help="reconstruct from one-slice boundary data").set_defaults(
        func=cmd_reconstruct
    )
    st = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    st.add_argument("--list", action="store_true", help="list invariant names and exit")
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if "QUATMT_MAX_DEGREE" in os.environ:
        try:
            max_degree()
        except DomainError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
    try:
        return args.func(args)
    except (ConfigError, DomainError, OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
