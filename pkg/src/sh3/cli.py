"""Command-line front end: ``sh3 <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 degenerate or indeterminate
classification, 4 numerical escape (partial output is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import pde, reduced, sweep
from .errors import (
    AmbiguousPartition,
    BracketInvalid,
    DegenerateDenominator,
    DegenerateTransitionNumber,
    IndeterminateBranch,
    InvalidParameters,
    NoCycleFound,
    NonFiniteState,
    NonzeroB,
    StepSizeUnderflow,
    WrongClass,
    WrongSide,
)
from .spectrum import SystemParams, analyze, growth_rates, i4_length
from .transition import classify

EXIT_OK, EXIT_INVALID, EXIT_INDETERMINATE, EXIT_ESCAPE = 0, 2, 3, 4

_INVALID = (InvalidParameters, WrongClass, WrongSide, NonzeroB, BracketInvalid, ValueError)
_INDETERMINATE = (
    DegenerateTransitionNumber,
    IndeterminateBranch,
    AmbiguousPartition,
    DegenerateDenominator,
)
_ESCAPE = (NonFiniteState, StepSizeUnderflow, NoCycleFound)

REDUCED_KINDS = [k.value for k in reduced.SystemKind]


class ConfigError(InvalidParameters):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _range3(text: str) -> tuple[float, float, int]:
    vals = _floats(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected lo,hi,count, got {text!r}")
    return vals[0], vals[1], vals[2]


def _fmt(x) -> str:
    return f"{x:.17g}"


# --- config files -----------------------------------------------------------


def read_config(path) -> dict[str, str]:
    """``key = value`` per line; blank lines and ``#`` comments are ignored."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            out[key.replace("_", "-").lower()] = value
    return out


def _config_tokens(config: dict[str, str], options: dict[str, argparse.Action]) -> list[str]:
    tokens = []
    for key, value in config.items():
        flag = "--" + key
        action = options.get(flag)
        if action is None or flag == "--config":
            raise ConfigError(f"unknown configuration key {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise ConfigError(f"{key}: expected a boolean, got {value!r}")
        else:
            tokens += [flag, value]
    return tokens


# --- parser -----------------------------------------------------------------


def _params_group(p, lam=True):
    p.add_argument("--ell", type=float, default=2 * math.pi, help="domain length (default 2 pi)")
    p.add_argument("--i4-k", type=int, default=None,
                   help="use the I4 length for modes k, k+1 (overrides --ell)")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    if lam:
        p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--tie-tol", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sh3", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="key = value file; flags override its values")
        p.set_defaults(func=func)
        return p

    p = command("spectrum", cmd_spectrum, "eigenvalues beta_n as CSV (n,re,im)")
    _params_group(p)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--out")

    p = command("classify", cmd_classify, "partition class and transition type as JSON")
    _params_group(p, lam=False)
    p.add_argument("--out")

    p = command("simulate", cmd_simulate, "integrate a reduced system or the PDE")
    _params_group(p)
    p.add_argument("--kind", default="planar-cubic", choices=REDUCED_KINDS + ["pde"])
    p.add_argument("--init", default="0.9,0",
                   help="state u1,u2,... (reduced) or profile name (pde)")
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--direction", default="forward", choices=("forward", "backward"))
    p.add_argument("--dt", type=float, default=None,
                   help="max step (reduced, default 0.01) or step (pde, default 1e-3)")
    p.add_argument("--manifold-at", choices=("critical", "current"), default=None)
    p.add_argument("--fixed-step", action="store_true")
    _pde_group(p)
    p.add_argument("--out")
    p.add_argument("--meta", help="metadata JSON path (default: OUT.json)")

    p = command("limit-cycle", cmd_limit_cycle, "locate a cycle of a planar reduced field")
    _params_group(p)
    p.add_argument("--kind", default="planar-full", choices=("planar-cubic", "planar-full"))
    p.add_argument("--init", default="0.9,0")
    p.add_argument("--direction", default="forward", choices=("forward", "backward"))
    p.add_argument("--manifold-at", choices=("critical", "current"), default=None)
    p.add_argument("--t-end", type=float, default=1e4)
    p.add_argument("--out")

    p = command("phase-diagram", cmd_phase_diagram, "classify a (sigma, b) grid")
    _params_group(p, lam=False)
    p.add_argument("--sigma-range", type=_range3, default=(0.0, 10.0, 51))
    p.add_argument("--b-range", type=_range3, default=(0.0, 2.0, 101))
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default="phase_diagram.csv")
    p.add_argument("--boundary", default="boundary.csv")

    p = command("radius-scan", cmd_radius_scan, "cycle radius against lambda")
    _params_group(p, lam=False)
    p.add_argument("--lambdas", type=_floats, default=None)
    p.add_argument("--lambda-range", type=_range3, default=(1e-4, 1e-2, 5),
                   help="lo,hi,count, log-spaced; ignored when --lambdas is given")
    p.add_argument("--method", default="planar-cubic", choices=("planar-cubic", "planar-full"))
    p.add_argument("--manifold-at", choices=("critical", "current"), default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default="radius_scan.csv")

    p = command("pde", cmd_pde, "run the PDE and write the final field (x,u)")
    _params_group(p)
    p.add_argument("--init", default="cosine")
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=pde.DEFAULT_DT)
    _pde_group(p)
    p.add_argument("--out")
    p.add_argument("--meta")

    parser._sh3_subparsers = sub.choices
    return parser


def _pde_group(p):
    p.add_argument("--n-modes", type=int, default=pde.DEFAULT_MODES)
    p.add_argument("--amplitude", type=float, default=0.9)
    p.add_argument("--mode", type=int, default=None, help="mode of the initial profile/readout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--record-every", type=int, default=None)
    p.add_argument("--no-dealias", action="store_true")


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sp = parser._sh3_subparsers[args.command]
        tokens = _config_tokens(read_config(args.config), sp._option_string_actions)
        i = argv.index(args.command)
        args = parser.parse_args(argv[: i + 1] + tokens + argv[i + 1:])
    if getattr(args, "i4_k", None) is not None:
        args.ell = i4_length(args.i4_k)
    return args


# --- output helpers ---------------------------------------------------------


def _open_out(path):
    return open(path, "w", newline="") if path else _Stdout()


class _Stdout(io.StringIO):
    def __exit__(self, *exc):
        sys.stdout.write(self.getvalue())
        return super().__exit__(*exc)


def _emit_json(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, allow_nan=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _params(args) -> SystemParams:
    return SystemParams(args.ell, args.sigma, args.b, getattr(args, "lam", 0.0))


# --- commands ---------------------------------------------------------------


def cmd_spectrum(args) -> int:
    if args.n_max < 0:
        raise InvalidParameters("--n-max must be >= 0")
    p = _params(args)
    n = np.arange(-args.n_max, args.n_max + 1)
    beta = growth_rates(n, p.ell, p.sigma, p.lam)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("n", "re", "im"))
        for i, z in zip(n, beta):
            w.writerow((int(i), _fmt(z.real), _fmt(z.imag)))
    return EXIT_OK


def cmd_classify(args) -> int:
    report = classify(args.ell, args.sigma, args.b, args.tie_tol)
    _emit_json(report.to_dict(), args.out)
    return EXIT_OK


def _reduced_opts(args) -> dict:
    return {} if args.manifold_at is None else {"manifold_at": args.manifold_at}


def cmd_simulate(args) -> int:
    p = _params(args)
    meta = {"command": "simulate", "kind": args.kind, "params": asdict(p),
            "direction": args.direction, "t_end": args.t_end, "escaped": False}
    if args.kind == "pde":
        return _simulate_pde(args, p, meta)

    system = reduced.make_system(args.kind, p, **_reduced_opts(args))
    y0 = _floats(args.init)
    if len(y0) != system.dim:
        raise InvalidParameters(f"{args.kind} needs {system.dim} initial values, got {len(y0)}")
    meta.update(init=y0, options={k: v for k, v in system.options.items() if k != "numbers"})
    code = EXIT_OK
    try:
        traj = reduced.integrate(system, y0, args.t_end, dt_max=args.dt or 0.01,
                                 direction=args.direction, fixed_step=args.fixed_step)
    except (NonFiniteState, StepSizeUnderflow) as exc:
        traj, code = exc.partial, EXIT_ESCAPE
        meta.update(escaped=True, message=str(exc))
        if traj is None:
            raise
    _write_trajectory(traj, args.out)
    _write_meta(args, meta)
    return code


def _write_trajectory(traj, path) -> None:
    if path:
        traj.write_csv(path)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("t",) + tuple(traj.labels))
        for t, y in zip(traj.times, traj.states):
            w.writerow([_fmt(t)] + [_fmt(v) for v in y])
        sys.stdout.write(buf.getvalue())


def _write_meta(args, meta) -> None:
    path = args.meta or (args.out + ".json" if args.out else None)
    if path:
        _emit_json(meta, path)


def _readout_mode(args, p) -> int:
    if args.mode is not None:
        return args.mode
    try:
        return analyze(p.ell, args.tie_tol).k or 1
    except AmbiguousPartition:
        return 1


def _pde_run(args, p):
    mode = _readout_mode(args, p)
    f0 = pde.initial_field(args.init, p.ell, args.n_modes, args.amplitude, mode, args.seed)
    dt = args.dt or pde.DEFAULT_DT
    every = args.record_every or max(1, int(round(0.1 / dt)))
    opts = pde.PdeRunOptions(dt=dt, t_end=args.t_end, dealias=not args.no_dealias,
                             record_every=every)
    escaped, message = False, None
    try:
        records = pde.simulate(f0, p, opts)
    except NonFiniteState as exc:
        records, escaped, message = exc.partial, True, str(exc)
    return records, opts, mode, escaped, message


def _simulate_pde(args, p, meta) -> int:
    records, opts, mode, escaped, message = _pde_run(args, p)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("t", "u1", "u2"))
        for t, f in records:
            u1, u2 = pde.mode_amplitudes(f, mode)
            w.writerow((_fmt(t), _fmt(u1), _fmt(u2)))
    meta.update(init=args.init, mode=mode, options=asdict(opts), n_modes=args.n_modes,
                escaped=escaped)
    if message:
        meta["message"] = message
    _write_meta(args, meta)
    return EXIT_ESCAPE if escaped else EXIT_OK


def cmd_pde(args) -> int:
    p = _params(args)
    records, opts, mode, escaped, message = _pde_run(args, p)
    t_last, field = records[-1]
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "u"))
        for x, u in zip(field.grid(), field.to_physical()):
            w.writerow((_fmt(x), _fmt(u)))
    orbit = pde.orbit_radius(records, mode)
    meta = {"command": "pde", "params": asdict(p), "options": asdict(opts),
            "n_modes": args.n_modes, "init": args.init, "mode": mode, "t_final": t_last,
            "orbit_radius": orbit.radius, "orbit_spread": orbit.spread, "escaped": escaped}
    if message:
        meta["message"] = message
    _write_meta(args, meta)
    return EXIT_ESCAPE if escaped else EXIT_OK


def cmd_limit_cycle(args) -> int:
    p = _params(args)
    system = reduced.make_system(args.kind, p, **_reduced_opts(args))
    y0 = _floats(args.init)
    if len(y0) != 2:
        raise InvalidParameters("--init needs two values u1,u2")
    cyc = reduced.find_limit_cycle(system, y0, direction=args.direction, t_end=args.t_end)
    out = {"kind": args.kind, "params": asdict(p), "init": y0, "direction": args.direction}
    out.update(cyc.to_dict())
    _emit_json(out, args.out)
    return EXIT_OK


def cmd_phase_diagram(args) -> int:
    grid = sweep.GridSpec(args.sigma_range, args.b_range)
    if args.threads is not None and args.threads < 1:
        raise InvalidParameters("--threads must be >= 1")
    diagram = sweep.phase_diagram(args.ell, grid, args.tie_tol, args.threads,
                                  progress=sweep.stderr_progress)
    diagram.write_csv(args.out)
    diagram.write_boundary_csv(args.boundary)
    print(f"wrote {args.out} ({len(diagram.rows)} cells) and {args.boundary} "
          f"({len(diagram.boundary)} points)", file=sys.stderr)
    return EXIT_OK


def cmd_radius_scan(args) -> int:
    if args.lambdas:
        lambdas = args.lambdas
    else:
        lo, hi, n = args.lambda_range
        if not (0 < lo < hi) or int(n) != n or n < 2:
            raise InvalidParameters("--lambda-range needs 0 < lo < hi and integer count >= 2")
        lambdas = np.geomspace(lo, hi, int(n))
    rows = sweep.radius_scan(args.ell, args.sigma, args.b, lambdas, args.method,
                             manifold_at=args.manifold_at, threads=args.threads)
    sweep.write_radius_scan_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    except (ConfigError, OSError) as exc:
        print(f"sh3: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except _INDETERMINATE as exc:
        print(f"sh3: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except _ESCAPE as exc:
        print(f"sh3: {exc}", file=sys.stderr)
        return EXIT_ESCAPE
    except _INVALID as exc:
        print(f"sh3: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
