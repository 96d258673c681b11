"""Bidirectional map between game equilibria and complementarity solutions.

An equilibrium profile ``x`` with positive per-player values
``lambda_k`` scales blockwise into a solution of the game's
complementarity problem,

    y_k = ( lambda_k^{n-2} / prod_{i != k} lambda_i )^{1/(n-1)} * x_k,

and conversely any solution ``y`` normalizes back to an equilibrium via
``x_k = y_k / sum(y_k)``.  For ``n = 2`` the scaling reduces to
``y_k = x_k / lambda_other``.  Both directions are implemented here
together with a certification helper that checks the two residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import (
    EquilibriumValues,
    MixedProfile,
    MultilinearGame,
    best_response_gap,
    renormalize,
    utility,
)
from .tcp import TcpInstance, join_blocks, residual, split_blocks

__all__ = [
    "NonpositiveValueError",
    "ZeroBlockError",
    "CorrespondenceResult",
    "equilibrium_values",
    "nash_to_tcp",
    "tcp_to_nash",
    "certify",
]

_CLIP_TOL = 1e-9
_ZERO_BLOCK_TOL = 1e-12


class NonpositiveValueError(ValueError):
    """A player's equilibrium value is <= 0; shift the game and retry."""

    def __init__(self, player: int, value: float):
        self.player = player
        self.value = value
        super().__init__(
            f"player {player} has value {value:.6g} <= 0; the scaling into the "
            "complementarity problem needs positive values (apply a shift)"
        )


class ZeroBlockError(ValueError):
    """A candidate solution has an all-zero block, so it cannot be normalized."""

    def __init__(self, player: int):
        self.player = player
        super().__init__(
            f"block {player} has (near-)zero mass; not a valid solution"
        )


@dataclass(frozen=True)
class CorrespondenceResult:
    """A paired ``(profile, y)`` with the residuals used to certify it."""

    profile: MixedProfile
    y: np.ndarray
    lambdas: EquilibriumValues
    certified: bool
    tcp_residual: float
    max_gap: float


def equilibrium_values(game: MultilinearGame, x: MixedProfile) -> EquilibriumValues:
    """Per-player utilities at ``x``; the scaling constants of the map."""
    return EquilibriumValues(
        tuple(utility(game, k, x) for k in range(1, game.n + 1))
    )


def nash_to_tcp(
    game: MultilinearGame,
    x: MixedProfile,
    values: EquilibriumValues | None = None,
) -> np.ndarray:
    """Scale an equilibrium profile into a complementarity solution.

    ``values`` overrides the scaling constants (by default the utilities
    at ``x``); every value must be positive.  The (n-1)-th root is taken
    in log space so large player counts cannot overflow.
    """
    n = game.n
    if values is None:
        values = equilibrium_values(game, x)
    lam = values.lambdas
    if len(lam) != n:
        raise ValueError(f"expected {n} values, got {len(lam)}")
    for k, v in enumerate(lam, start=1):
        if v <= 0.0:
            raise NonpositiveValueError(k, v)
    logs = [math.log(v) for v in lam]
    total = sum(logs)
    blocks = []
    for k in range(n):
        scale = math.exp(((n - 1) * logs[k] - total) / (n - 1))
        blocks.append(scale * x.blocks[k])
    return join_blocks(blocks)


def tcp_to_nash(game: MultilinearGame, y) -> MixedProfile:
    """Normalize each block of a solution onto the probability simplex.

    Negative dust in ``[-1e-9, 0)`` is clipped before normalizing;
    anything more negative is a hard error.  A block with total mass
    below 1e-12 raises :class:`ZeroBlockError`, since every genuine
    solution has strictly positive block sums.
    """
    blocks = split_blocks(np.asarray(y, dtype=np.float64), game.shape)
    for k, b in enumerate(blocks, start=1):
        clipped = np.where(b < 0, np.where(b >= -_CLIP_TOL, 0.0, b), b)
        if clipped.sum() <= _ZERO_BLOCK_TOL:
            raise ZeroBlockError(k)
    return renormalize(blocks, clip_tol=_CLIP_TOL)


def certify(
    game: MultilinearGame,
    x: MixedProfile,
    y,
    tol_residual: float = 1e-6,
    tol_gap: float = 1e-6,
) -> CorrespondenceResult:
    """Two-sided check of a candidate pair; reports rather than raises.

    ``certified`` is true when the complementarity residual of ``y`` and
    the worst best-response gap of ``x`` are both within tolerance.
    """
    t = TcpInstance(game)
    res = residual(t, y)
    gaps = best_response_gap(game, x)
    max_gap = float(gaps.max())
    return CorrespondenceResult(
        profile=x,
        y=np.asarray(y, dtype=np.float64),
        lambdas=equilibrium_values(game, x),
        certified=(res <= tol_residual and max_gap <= tol_gap),
        tcp_residual=res,
        max_gap=max_gap,
    )
