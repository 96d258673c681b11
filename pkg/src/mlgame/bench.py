"""Benchmark harness: seeded random games over a grid of shapes.

For every shape in the grid, ``seeds`` games are generated with
consecutive seeds 1..N and pushed through the full solve pipeline.  One
aggregate row per shape reports solved/attempted counts, iteration and
wall-time statistics over the solved instances, the mean final system
norm, and the total number of solver restarts consumed.

Cells are independent and may run in parallel worker processes; the
``MLGAME_THREADS`` environment variable caps the worker count.  Rows
are aggregated in grid order, so results are independent of the worker
count (apart from wall times).
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .driver import solve_game
from .game import random_game
from .solver import SolverConfig

__all__ = ["BenchRow", "DEFAULT_GRID", "BENCH_CONFIG", "run_bench", "rows_to_csv", "parse_grid"]

# The two desk-scale groups (total dimension 10 and 20) exercised by the
# benchmark protocol.
DEFAULT_GRID: tuple[tuple[int, ...], ...] = (
    (2, 2, 6), (2, 3, 5), (2, 4, 4), (3, 5, 2), (3, 2, 5),
    (4, 4, 2), (4, 2, 4), (5, 3, 2), (6, 2, 2),
    (3, 5, 12), (3, 8, 9), (3, 12, 5), (4, 6, 10), (4, 8, 8),
    (4, 10, 6), (6, 5, 9), (8, 4, 8), (12, 5, 3),
)

# Bench cells cap each attempt at 120 iterations so that any reported
# success stays within the protocol's iteration bound; the restart and
# shift machinery provides the fallback paths.
BENCH_CONFIG = SolverConfig(max_iter=120)

CSV_HEADER = [
    "shape", "m", "solved", "attempted",
    "AI", "MinI", "MaxI", "AT", "MinT", "MaxT", "ARes", "restarts",
]


@dataclass(frozen=True)
class BenchRow:
    """Aggregate over the seeded instances of one shape."""

    shape: tuple[int, ...]
    m: int
    solved: int
    attempted: int
    avg_iterations: float
    min_iterations: int
    max_iterations: int
    avg_time: float
    min_time: float
    max_time: float
    avg_residual: float
    restarts: int


def _solve_cell(args) -> tuple[bool, int, float, float, int]:
    shape, seed, config = args
    game = random_game(shape, seed)
    result = solve_game(game, config=config)
    rep = result.report
    return (rep.converged, rep.iterations, rep.wall_time, rep.h_norm,
            result.attempts - 1)


def _worker_count() -> int:
    cap = os.environ.get("MLGAME_THREADS")
    available = os.cpu_count() or 1
    if cap is not None:
        try:
            return max(1, min(int(cap), available))
        except ValueError:
            return 1
    return available


def run_bench(
    shapes=DEFAULT_GRID,
    seeds: int = 10,
    config: SolverConfig | None = None,
    workers: int | None = None,
) -> list[BenchRow]:
    """Run the grid and aggregate one row per shape, in grid order."""
    cfg = config or BENCH_CONFIG
    shapes = [tuple(int(v) for v in s) for s in shapes]
    cells = [(shape, seed, cfg) for shape in shapes for seed in range(1, seeds + 1)]
    nworkers = workers if workers is not None else _worker_count()
    if nworkers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            outcomes = list(pool.map(_solve_cell, cells, chunksize=1))
    else:
        outcomes = [_solve_cell(cell) for cell in cells]

    rows = []
    for i, shape in enumerate(shapes):
        chunk = outcomes[i * seeds : (i + 1) * seeds]
        solved = [c for c in chunk if c[0]]
        iters = [c[1] for c in solved]
        times = [c[2] for c in solved]
        residuals = [c[3] for c in solved]
        restarts = sum(c[4] for c in chunk)
        rows.append(BenchRow(
            shape=shape,
            m=sum(shape),
            solved=len(solved),
            attempted=len(chunk),
            avg_iterations=(sum(iters) / len(iters)) if iters else float("nan"),
            min_iterations=min(iters) if iters else 0,
            max_iterations=max(iters) if iters else 0,
            avg_time=(sum(times) / len(times)) if times else float("nan"),
            min_time=min(times) if times else 0.0,
            max_time=max(times) if times else 0.0,
            avg_residual=(sum(residuals) / len(residuals)) if residuals else float("nan"),
            restarts=restarts,
        ))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([
            "x".join(map(str, r.shape)), r.m, r.solved, r.attempted,
            f"{r.avg_iterations:.1f}", r.min_iterations, r.max_iterations,
            f"{r.avg_time:.4f}", f"{r.min_time:.4f}", f"{r.max_time:.4f}",
            f"{r.avg_residual:.3e}", r.restarts,
        ])
    return buf.getvalue()


def parse_grid(spec: str) -> list[tuple[int, ...]]:
    """Parse a grid spec like ``2x2x6,3x5x12`` into shape tuples."""
    shapes = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            dims = tuple(int(v) for v in part.split("x"))
        except ValueError as exc:
            raise ValueError(f"bad shape {part!r} in grid spec") from exc
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ValueError(f"bad shape {part!r} in grid spec")
        shapes.append(dims)
    if not shapes:
        raise ValueError("empty grid spec")
    return shapes
