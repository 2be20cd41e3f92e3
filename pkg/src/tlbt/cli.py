"""Command-line front end for batch Gramian, reduction, and validation runs.

Subcommands: synth, gramian, hsv, reduce, simulate, compare. Systems come
from a Matrix Market set with JSON sidecar (--system plant.json) or from
the builtin generators (--synth weakly_damped --n 200 ...). All numeric
output is printed with 17 significant digits; result files avoid
timestamps and timings (opt in with --timings) so identical runs produce
byte-identical outputs.

Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import mmio, reduction, simulate, synthetic
from .errors import TlbtError
from .gramians import (
    SolverConfig,
    TimeWindow,
    solve_infinite_lowrank,
    solve_modified_lowrank,
    solve_timelimited_lowrank,
)
from .systems import DescriptorIndex1, eliminate_descriptor

__all__ = ["main"]

_GRAMIAN_KIND = {"bt": "infinite", "tlbt": "timelimited", "mtlbt": "modified"}


def _fmt(x):
    """17-significant-digit text for a float."""
    return f"{float(x):.17g}"


def _add_system_args(p):
    src = p.add_argument_group("system source")
    src.add_argument("--system", help="JSON sidecar of a Matrix Market system set")
    src.add_argument("--synth", choices=synthetic.KINDS, help="builtin synthetic generator")
    src.add_argument("--n", type=int, default=100, help="synthetic state dimension")
    src.add_argument("--m", type=int, default=1, help="synthetic input count")
    src.add_argument("--p", type=int, default=1, help="synthetic output count")
    src.add_argument("--seed", type=int, default=0, help="synthetic generator seed")
    src.add_argument("--damping", type=float, default=0.05, help="weakly_damped damping")


def _add_solver_args(p):
    g = p.add_argument_group("solver")
    g.add_argument("--ts", type=float, default=0.0, help="window start time")
    g.add_argument("--te", type=float, default=None, help="window end time")
    g.add_argument("--tol-f", type=float, default=1e-8, dest="tol_f")
    g.add_argument("--tol-p", type=float, default=1e-8, dest="tol_p")
    g.add_argument("--cadence", type=int, default=5)
    g.add_argument("--max-dim", type=int, default=None, dest="max_dim")
    g.add_argument("--method", choices=("krylov", "dense"), default="krylov")


def _add_sim_args(p):
    g = p.add_argument_group("simulation")
    g.add_argument("--dt", type=float, default=0.01, help="integrator step")
    g.add_argument("--tf", type=float, default=None, help="simulation horizon")
    g.add_argument("--input", choices=("impulse", "step", "file"), default="impulse")
    g.add_argument("--step-scale", type=float, default=1.0, dest="step_scale")
    g.add_argument("--input-file", dest="input_file", help="CSV (t, u1..um) for --input file")


def _load_system(args):
    if args.system:
        sys_obj, meta = mmio.load_system(args.system)
        return sys_obj, meta.get("name", Path(args.system).stem)
    if args.synth:
        sys_obj = synthetic.make_synthetic(
            args.synth, args.n, args.m, args.p, seed=args.seed, damping=args.damping
        )
        return sys_obj, f"{args.synth}_n{args.n}_s{args.seed}"
    raise ValueError("either --system or --synth is required")


def _window(args):
    if args.te is None:
        return None
    return TimeWindow(t_e=args.te, t_s=args.ts)


def _config(args):
    return SolverConfig(
        tol_f=args.tol_f, tol_p=args.tol_p, cadence=args.cadence, max_dim=args.max_dim
    )


def _input_signal(args, m):
    if args.input == "impulse":
        return simulate.impulse_input()
    if args.input == "step":
        return simulate.step_input(args.step_scale)
    if not args.input_file:
        raise ValueError("--input file requires --input-file")
    data = np.loadtxt(args.input_file, delimiter=",", skiprows=1, ndmin=2)
    tgrid, vals = data[:, 0], data[:, 1 : m + 1]

    def fn(t):
        return np.array([np.interp(t, tgrid, vals[:, j]) for j in range(m)])

    return simulate.custom_input(fn)


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, (int, float, np.floating)) else str(v) for v in row) + "\n")


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _shift_text(s):
    if np.isinf(np.real(s)):
        return "inf"
    s = complex(s)
    if s.imag == 0:
        return _fmt(s.real)
    return f"{_fmt(s.real)}{'+' if s.imag >= 0 else '-'}{_fmt(abs(s.imag))}j"


def _write_trace(path, trace):
    with open(path, "w") as fh:
        fh.write("k,shift,dim,f_change,mu\n")
        for row in trace:
            fh.write(
                f"{row['k']},{_shift_text(row['shift'])},{row['dim']},"
                f"{_fmt(row['f_change'])},{_fmt(row['mu'])}\n"
            )


# ---------------------------------------------------------------------------
# subcommands


def cmd_synth(args):
    out = _out_dir(args)
    sys_obj = synthetic.make_synthetic(
        args.kind, args.n, args.m, args.p, seed=args.seed, damping=args.damping
    )
    sidecar = mmio.save_system(out, args.name, sys_obj)
    print(f"wrote {sidecar}")
    return 0


def _solve_gramian(sys_obj, mode, window, cfg, side):
    kind = _GRAMIAN_KIND[mode]
    if kind == "infinite":
        return solve_infinite_lowrank(sys_obj, cfg, side)
    if window is None:
        raise ValueError(f"mode {mode!r} requires --te")
    if kind == "timelimited":
        return solve_timelimited_lowrank(sys_obj, window, cfg, side)
    return solve_modified_lowrank(sys_obj, window, cfg, side)


def cmd_gramian(args):
    out = _out_dir(args)
    sys_obj, name = _load_system(args)
    window = _window(args)
    cfg = _config(args)
    sides = {"reach": ["reachability"], "obs": ["observability"]}.get(
        args.side, ["reachability", "observability"]
    )
    for mode in args.mode:
        summary = {"mode": mode, "t_s": args.ts, "t_e": args.te}
        for side in sides:
            g = _solve_gramian(sys_obj, mode, window, cfg, side)
            tag = "ZP" if side == "reachability" else "ZQ"
            mmio.write_matrix(out / f"{name}_{tag}_{mode}.mtx", g.z)
            if args.trace:
                _write_trace(out / f"{name}_trace_{tag}_{mode}.csv", g.trace)
            summary[side] = {
                "d": g.subspace_dim,
                "rank": g.rank,
                "mu": g.residual,
                "seconds": g.wall_time,
            }
            print(
                f"{name} {mode} {side}: d={g.subspace_dim} rank={g.rank} "
                f"mu={_fmt(g.residual)} seconds={_fmt(g.wall_time)}"
            )
        _write_json(out / f"{name}_gramian_{mode}.json", summary)
    return 0


def cmd_hsv(args):
    out = _out_dir(args)
    sys_obj, name = _load_system(args)
    window = _window(args)
    cfg = _config(args)
    for mode in args.mode:
        z_p, z_q, _ = reduction._factor_pair(sys_obj, mode, window, cfg, args.method)
        work = sys_obj
        if isinstance(sys_obj, DescriptorIndex1):
            work, _ = eliminate_descriptor(sys_obj)
        report = reduction.hankel_sv(z_p, z_q, reduction._mass(work), source=mode, window=window)
        _write_csv(
            out / f"{name}_hsv_{mode}.csv",
            ["index", "sigma"],
            [(i + 1, v) for i, v in enumerate(report.values)],
        )
        shown = ", ".join(_fmt(v) for v in report.values[:5])
        print(f"{name} {mode}: {report.values.size} singular values, leading [{shown}]")
    return 0


def _export_reduced(out, name, mode, r, rom, e_max=None, timings=True):
    tag = f"{name}_{mode}_r{r}"
    sidecar = mmio.save_system(out, tag, rom.to_system())
    meta = {
        "mode": mode,
        "r": r,
        "t_s": rom.window.t_s if rom.window else None,
        "t_e": rom.window.t_e if rom.window else None,
        "sigma": [float(v) for v in rom.hsv],
        "stable": int(rom.stable),
        "E_T": e_max,
        "mu_p": rom.info.get("mu_p"),
        "mu_q": rom.info.get("mu_q"),
        "feedthrough_retained": bool(np.any(rom.D)),
    }
    if timings:
        meta["t_mor"] = rom.info.get("t_mor")
    _write_json(out / f"{tag}.json", meta)
    return sidecar


def cmd_reduce(args):
    out = _out_dir(args)
    sys_obj, name = _load_system(args)
    window = _window(args)
    cfg = _config(args)
    for mode in args.mode:
        for r in args.order:
            rom = reduction.reduce(
                sys_obj, mode, window=window, r=r, cfg=cfg, method=args.method
            )
            _export_reduced(out, name, mode, r, rom)
            print(
                f"{name} {mode} r={r}: stable={int(rom.stable)} "
                f"t_mor={_fmt(rom.info.get('t_mor', 0.0))}"
            )
    return 0


def cmd_simulate(args):
    out = _out_dir(args)
    sys_obj, name = _load_system(args)
    m = sys_obj.m
    tf = args.tf if args.tf is not None else (args.te or 1.0)
    u = _input_signal(args, m)
    if args.input == "impulse":
        traj = simulate.impulse_response(sys_obj, dt=args.dt, t_f=tf)
    else:
        traj = simulate.implicit_midpoint(sys_obj, u, None, args.dt, tf)
    cols = [f"y{j + 1}" for j in range(traj.outputs.shape[1])]
    norms = traj.output_norms()
    _write_csv(
        out / f"{name}_response.csv",
        ["t", *cols, "ynorm"],
        [(t, *row, nrm) for t, row, nrm in zip(traj.times, traj.outputs, norms)],
    )
    summary = {
        "dt": args.dt,
        "t_f": tf,
        "input": args.input,
        "max_output_norm": float(np.max(traj.output_norms())),
    }
    _write_json(out / f"{name}_response.json", summary)
    print(f"{name}: simulated {traj.times.size} steps, wrote {name}_response.csv")
    return 0


def cmd_compare(args):
    out = _out_dir(args)
    sys_obj, name = _load_system(args)
    if args.te is None:
        raise ValueError("compare requires --te")
    window = TimeWindow(t_e=args.te, t_s=args.ts)
    cfg = _config(args)
    tf = args.tf if args.tf is not None else args.te
    u = _input_signal(args, sys_obj.m)
    if args.input == "impulse":
        ref = simulate.impulse_response(sys_obj, dt=args.dt, t_f=tf)
    else:
        ref = simulate.implicit_midpoint(sys_obj, u, None, args.dt, tf)

    orders = sorted(args.order)
    table = []
    e_by_mode = {}
    for mode in args.mode:
        z_p, z_q, info = reduction._factor_pair(sys_obj, mode, window, cfg, args.method)
        work = sys_obj
        if isinstance(sys_obj, DescriptorIndex1):
            work, _ = eliminate_descriptor(sys_obj)
        for r in orders:
            rom = reduction.square_root_reduce(work, z_p, z_q, r)
            rom.mode = mode
            rom.window = window
            rom.info = dict(info)
            if args.input == "impulse":
                red = simulate.impulse_response(rom, dt=args.dt, t_f=tf)
            else:
                red = simulate.implicit_midpoint(rom, u, None, args.dt, tf)
            err, e_max = simulate.relative_error_series(ref, red, window)
            _write_csv(
                out / f"{name}_error_t_{mode}_r{r}.csv",
                ["t", "E"],
                list(zip(ref.times, err)),
            )
            entry = {"mode": mode, "r": r, "E_T": e_max, "stable": int(rom.stable)}
            if args.timings:
                entry["t_mor"] = info.get("t_gramians")
            table.append(entry)
            e_by_mode.setdefault(mode, {})[r] = e_max
            print(f"{name} {mode} r={r}: E_T={_fmt(e_max)} stable={int(rom.stable)}")

    _write_csv(
        out / f"{name}_errors_vs_order.csv",
        ["r", *args.mode],
        [(r, *[e_by_mode[mode][r] for mode in args.mode]) for r in orders],
    )
    payload = {
        "system": name,
        "input": args.input,
        "t_s": args.ts,
        "t_e": args.te,
        "dt": args.dt,
        "t_f": tf,
        "seed": args.seed,
        "results": table,
    }
    _write_json(out / f"{name}_compare.json", payload)
    return 0


# ---------------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="tlbt",
        description="Balanced truncation with finite-time Gramians: solvers, reduction, validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate and save a synthetic system")
    p.add_argument("--kind", choices=synthetic.KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--damping", type=float, default=0.05)
    p.add_argument("--name", default="plant")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("gramian", help="compute low-rank Gramian factors")
    _add_system_args(p)
    _add_solver_args(p)
    p.add_argument("--mode", action="append", choices=reduction.MODES, required=True)
    p.add_argument("--side", choices=("reach", "obs", "both"), default="both")
    p.add_argument("--trace", action="store_true", help="write per-iteration trace CSV")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gramian)

    p = sub.add_parser("hsv", help="Hankel singular values (per mode)")
    _add_system_args(p)
    _add_solver_args(p)
    p.add_argument("--mode", action="append", choices=reduction.MODES, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hsv)

    p = sub.add_parser("reduce", help="reduce to the requested orders")
    _add_system_args(p)
    _add_solver_args(p)
    p.add_argument("--mode", action="append", choices=reduction.MODES, required=True)
    p.add_argument("--order", action="append", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("simulate", help="time-domain response of a system")
    _add_system_args(p)
    _add_solver_args(p)
    _add_sim_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="reduction error comparison across modes/orders")
    _add_system_args(p)
    _add_solver_args(p)
    _add_sim_args(p)
    p.add_argument("--mode", action="append", choices=reduction.MODES, required=True)
    p.add_argument("--order", action="append", type=int, required=True)
    p.add_argument("--timings", action="store_true", help="include wall times in the JSON table")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TlbtError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
