"""Command-line front end.

Grammar: ``mlgame <solve|verify|generate|bench|export-tcp> [flags]``.
Exit codes: 0 success/certified, 1 input or I/O error, 2 solver or
verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .bench import BENCH_CONFIG, DEFAULT_GRID, parse_grid, rows_to_csv, run_bench
from .driver import solve_game
from .formats import (
    GameFileError,
    load_game,
    load_profile,
    save_game,
    save_tcp_tensor,
)
from .game import auto_shift, best_response_gap, random_game
from .bridge import equilibrium_values
from .solver import SolverConfig
from .tcp import MemoryBudgetError, TcpInstance, assemble_big_tensor

REPORT_SCHEMA_VERSION = 1


def _fmt_vec(v, digits=6):
    return "[" + ", ".join(f"{x:.{digits}f}" for x in v) + "]"


def _load_game_or_fail(path):
    try:
        return load_game(path)
    except FileNotFoundError:
        raise SystemExit(_input_error(f"cannot read {path!r}: no such file"))
    except GameFileError as exc:
        raise SystemExit(_input_error(str(exc)))


def _input_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _solver_config(args) -> SolverConfig:
    kwargs = {}
    if args.mu0 is not None:
        kwargs["mu0"] = args.mu0
    if args.tol is not None:
        kwargs["tol"] = args.tol
    if args.max_iter is not None:
        kwargs["max_iter"] = args.max_iter
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise SystemExit(_input_error(str(exc)))


def _parse_y0(spec: str | None, m: int):
    if spec is None:
        return None
    parts = spec.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise SystemExit(_input_error(f"bad --y0 value {spec!r}"))
    if len(values) == 1:
        return np.full(m, values[0])
    if len(values) != m:
        raise SystemExit(_input_error(f"--y0 needs 1 or {m} values, got {len(values)}"))
    return np.array(values)


def cmd_solve(args) -> int:
    game, meta = _load_game_or_fail(args.game)
    cfg = _solver_config(args)
    y0 = _parse_y0(args.y0, sum(game.shape))
    pre_shift = 0.0
    if args.auto_shift:
        _, pre_shift = auto_shift(game)
    result = solve_game(game, y0=y0, config=cfg, collect_trace=args.trace,
                        pre_shift=pre_shift)
    rep = result.report

    if args.trace and rep.trace:
        print(f"{'k':>4} {'mu':>12} {'||H||':>12} {'step':>10}")
        for rec in rep.trace:
            lam = "" if rec.step_length is None else f"{rec.step_length:.4g}"
            print(f"{rec.iteration:>4} {rec.mu:>12.4e} {rec.h_norm:>12.4e} {lam:>10}")

    if args.json:
        doc = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "game": game.name or meta.get("name"),
            "status": rep.status,
            "status_detail": rep.status_detail,
            "iterations": rep.iterations,
            "restarts_used": rep.restarts_used,
            "attempts": result.attempts,
            "wall_time": rep.wall_time,
            "h_norm": rep.h_norm,
            "mu0_used": rep.mu0_used,
            "shift_applied": result.shift_applied,
            "certified": result.certified,
        }
        if result.profile is not None:
            cert = result.certification
            doc.update({
                "y": rep.y.tolist(),
                "s": rep.s.tolist(),
                "x": [b.tolist() for b in result.profile.blocks],
                "lambdas": list(cert.lambdas.lambdas),
                "tcp_residual": cert.tcp_residual,
                "max_gap": cert.max_gap,
            })
        print(json.dumps(doc, indent=2))
    else:
        name = game.name or meta.get("name") or args.game
        dims = "x".join(map(str, game.shape))
        print(f"game: {name} ({game.n} players, shape {dims})")
        print(f"status: {rep.status} ({rep.iterations} iterations, "
              f"{rep.restarts_used} restarts, {rep.wall_time:.3f} s)")
        if result.shift_applied:
            print(f"shift applied: {result.shift_applied:g}")
        print(f"||H||: {rep.h_norm:.3e}")
        if result.profile is not None:
            cert = result.certification
            print(f"tcp residual: {cert.tcp_residual:.3e}")
            print(f"y*: {_fmt_vec(rep.y)}")
            print(f"s*: {_fmt_vec(rep.s)}")
            gaps = best_response_gap(game, result.profile)
            for k, block in enumerate(result.profile.blocks, start=1):
                print(f"player {k}: x* = {_fmt_vec(block)}  "
                      f"value = {cert.lambdas.lambdas[k - 1]:.6f}  "
                      f"gap = {gaps[k - 1]:.2e}")
            print(f"certified: {'yes' if result.certified else 'no'}")

    return 0 if result.certified else 2


def cmd_verify(args) -> int:
    game, _ = _load_game_or_fail(args.game)
    try:
        profile = load_profile(args.profile)
    except FileNotFoundError:
        return _input_error(f"cannot read {args.profile!r}: no such file")
    except GameFileError as exc:
        return _input_error(str(exc))
    if profile.shape != game.shape:
        return _input_error(
            f"profile shape {profile.shape} does not match game shape {game.shape}"
        )
    gaps = best_response_gap(game, profile)
    values = equilibrium_values(game, profile)
    tol = args.tol if args.tol is not None else 1e-6
    for k in range(game.n):
        print(f"player {k + 1}: value = {values.lambdas[k]:.6f}  "
              f"gap = {gaps[k]:.3e}")
    ok = float(gaps.max()) <= tol
    print(f"max gap: {gaps.max():.3e} ({'<=' if ok else '>'} tol {tol:g})")
    return 0 if ok else 2


def cmd_generate(args) -> int:
    shape = tuple(args.shape)
    if len(shape) < 2 or any(v < 1 for v in shape):
        return _input_error(f"invalid shape {shape}")
    dims = "x".join(map(str, shape))
    game = random_game(shape, args.seed, name=f"random-{dims}-seed{args.seed}")
    save_game(args.output, game, generator="splitmix64", seed=args.seed)
    print(f"wrote {args.output} ({game.n} players, shape {dims}, seed {args.seed})")
    return 0


def cmd_bench(args) -> int:
    shapes = DEFAULT_GRID
    if args.grid is not None:
        try:
            shapes = parse_grid(args.grid)
        except ValueError as exc:
            return _input_error(str(exc))
    config = BENCH_CONFIG
    if args.tol is not None:
        config = SolverConfig(max_iter=config.max_iter, tol=args.tol)
    rows = run_bench(shapes, seeds=args.seeds, config=config)
    text = rows_to_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.csv} ({len(rows)} rows)")
    else:
        print(text, end="")
    return 0


def cmd_export_tcp(args) -> int:
    game, _ = _load_game_or_fail(args.game)
    t = TcpInstance(game)
    try:
        if args.max_entries is not None:
            big = assemble_big_tensor(t, max_entries=args.max_entries)
        else:
            big = assemble_big_tensor(t)
    except MemoryBudgetError as exc:
        return _input_error(
            f"tensor too large: needs {exc.required} entries, "
            f"budget allows {exc.allowed}"
        )
    save_tcp_tensor(args.output, big, t.q)
    dims = "x".join(map(str, big.shape))
    print(f"wrote {args.output} (order-{big.order} tensor, shape {dims})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlgame",
        description="Equilibria of multilinear games via a complementarity "
                    "reformulation and a smoothing Newton method.",
    )
    parser.add_argument("--version", action="version", version=f"mlgame {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a game file")
    p.add_argument("game")
    p.add_argument("--mu0", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--y0", default=None,
                   help="start vector: a single value or m comma-separated values")
    p.add_argument("--trace", action="store_true", help="print per-iteration records")
    p.add_argument("--auto-shift", action="store_true",
                   help="shift payoffs positive before solving")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a profile for equilibrium")
    p.add_argument("game")
    p.add_argument("profile")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a seeded random game file")
    p.add_argument("--shape", type=int, nargs="+", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="run the seeded benchmark grid")
    p.add_argument("--grid", default=None, help="comma-separated shapes, e.g. 2x2x6,3x5x12")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--csv", default=None, help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-tcp", help="export the explicit complementarity tensor")
    p.add_argument("game")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--max-entries", type=int, default=None)
    p.set_defaults(func=cmd_export_tcp)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 1


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
