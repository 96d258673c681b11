"""Multilinear games: payoff tensors, utilities, gradients, deviation gaps.

A game has ``n >= 2`` players; player ``k`` owns ``m_k`` pure strategies
and a payoff tensor of shape ``(m_1, .., m_n)``.  Utilities are the full
multilinear form of the payoff tensor against the joint mixed profile.

Convention: payoff entries are read as costs, i.e. a player deviates
only to *lower* the value of their payoff gradient.  This is the
orientation certified by the complementarity reformulation in
:mod:`mlgame.tcp` (on-support gradient entries equal the utility,
off-support entries are >= it).  For full-support equilibria the
distinction is vacuous; to analyse reward-maximising players, negate
the payoff tensors and shift them positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Sequence

import numpy as np

from .tensor import DenseTensor, contract_all, contract_except

__all__ = [
    "SIMPLEX_TOL",
    "SplitMix64",
    "MultilinearGame",
    "MixedProfile",
    "EquilibriumValues",
    "uniform_profile",
    "pure_profile",
    "renormalize",
    "utility",
    "payoff_gradient",
    "shift",
    "auto_shift",
    "best_response_gap",
    "random_game",
]

SIMPLEX_TOL = 1e-9

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The SplitMix64 generator (Steele/Lea/Flood splittable PRNG).

    State update: ``s += 0x9E3779B97F4A7C15``; output mixing:
    ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
    z *= 0x94D049BB133111EB; z ^= z >> 31`` (all mod 2^64).
    ``next_float`` maps the top 53 bits to [0, 1).  The bit stream is
    fixed for all time; games generated from a seed are reproducible
    across platforms and releases.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return (self.next_uint64() >> 11) * 2.0**-53


class MultilinearGame:
    """An n-player game given by one payoff tensor per player."""

    __slots__ = ("_payoffs", "name")

    def __init__(self, payoffs: Sequence, name: str | None = None):
        tensors = tuple(
            p if isinstance(p, DenseTensor) else DenseTensor(p) for p in payoffs
        )
        if len(tensors) < 2:
            raise ValueError(f"a game needs at least 2 players, got {len(tensors)}")
        shape = tensors[0].shape
        if len(shape) != len(tensors):
            raise ValueError(
                f"{len(tensors)} players require order-{len(tensors)} payoff "
                f"tensors, got shape {shape}"
            )
        for k, t in enumerate(tensors, start=1):
            if t.shape != shape:
                raise ValueError(
                    f"payoff tensor of player {k} has shape {t.shape}, expected {shape}"
                )
        self._payoffs = tensors
        self.name = name

    @property
    def payoffs(self) -> tuple[DenseTensor, ...]:
        return self._payoffs

    @property
    def n(self) -> int:
        """Number of players."""
        return len(self._payoffs)

    @property
    def shape(self) -> tuple[int, ...]:
        """Pure-strategy counts ``(m_1, .., m_n)``."""
        return self._payoffs[0].shape

    def min_entry(self) -> float:
        return min(float(t.data.min()) for t in self._payoffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultilinearGame):
            return NotImplemented
        return self._payoffs == other._payoffs

    __hash__ = None

    def __repr__(self) -> str:
        dims = "x".join(map(str, self.shape))
        tag = f" {self.name!r}" if self.name else ""
        return f"MultilinearGame({dims}{tag})"


class MixedProfile:
    """A joint mixed strategy: one simplex vector per player.

    Each block must be entrywise >= -SIMPLEX_TOL and sum to 1 within
    SIMPLEX_TOL.  Blocks are stored read-only.
    """

    __slots__ = ("_blocks",)

    def __init__(self, blocks: Sequence):
        out = []
        for k, b in enumerate(blocks, start=1):
            arr = np.array(b, dtype=np.float64)
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError(f"block {k} must be a nonempty vector")
            if not np.isfinite(arr).all():
                raise ValueError(f"block {k} has non-finite entries")
            if arr.min() < -SIMPLEX_TOL:
                raise ValueError(
                    f"block {k} has a negative entry {arr.min():.3e} beyond tolerance"
                )
            total = arr.sum()
            if abs(total - 1.0) > SIMPLEX_TOL:
                raise ValueError(f"block {k} sums to {total!r}, expected 1")
            arr.setflags(write=False)
            out.append(arr)
        self._blocks = tuple(out)

    @property
    def blocks(self) -> tuple[np.ndarray, ...]:
        return self._blocks

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self._blocks)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedProfile):
            return NotImplemented
        return self.shape == other.shape and all(
            np.array_equal(a, b) for a, b in zip(self._blocks, other._blocks)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"MixedProfile({[list(np.round(b, 4)) for b in self._blocks]})"


@dataclass(frozen=True)
class EquilibriumValues:
    """Per-player utilities at a candidate profile, one scalar each."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if not all(np.isfinite(self.lambdas)):
            raise ValueError("equilibrium values must be finite")


def uniform_profile(shape: Sequence[int]) -> MixedProfile:
    """The profile mixing uniformly over every player's strategies."""
    return MixedProfile([np.full(m, 1.0 / m) for m in shape])


def pure_profile(shape: Sequence[int], strategies: Sequence[int]) -> MixedProfile:
    """The pure profile playing ``strategies`` (1-based, one per player)."""
    if len(strategies) != len(shape):
        raise ValueError("one strategy index per player required")
    blocks = []
    for m, i in zip(shape, strategies):
        if not 1 <= i <= m:
            raise ValueError(f"strategy {i} out of range 1..{m}")
        b = np.zeros(m)
        b[i - 1] = 1.0
        blocks.append(b)
    return MixedProfile(blocks)


def renormalize(blocks: Sequence, clip_tol: float = SIMPLEX_TOL) -> MixedProfile:
    """Clip negative dust in ``[-clip_tol, 0)`` to zero and rescale to the simplex.

    Entries below ``-clip_tol`` are a hard error; a block with
    non-positive mass cannot be normalized and is also an error.
    """
    out = []
    for k, b in enumerate(blocks, start=1):
        arr = np.array(b, dtype=np.float64)
        if arr.min() < -clip_tol:
            raise ValueError(
                f"block {k} entry {arr.min():.3e} is below -{clip_tol:g}; "
                "not normalizable"
            )
        arr[arr < 0] = 0.0
        total = arr.sum()
        if total <= 0.0:
            raise ValueError(f"block {k} has no positive mass")
        out.append(arr / total)
    return MixedProfile(out)


def _check_player(game: MultilinearGame, player: int) -> int:
    if not 1 <= player <= game.n:
        raise ValueError(f"player {player} out of range 1..{game.n}")
    return player - 1


def _check_profile(game: MultilinearGame, x: MixedProfile) -> None:
    if x.shape != game.shape:
        raise ValueError(f"profile shape {x.shape} does not match game {game.shape}")


def utility(game: MultilinearGame, player: int, x: MixedProfile) -> float:
    """Player ``player``'s expected payoff at the joint profile ``x``."""
    idx = _check_player(game, player)
    _check_profile(game, x)
    return contract_all(game.payoffs[idx], x.blocks)


def payoff_gradient(game: MultilinearGame, player: int, x: MixedProfile) -> np.ndarray:
    """Expected payoff of each pure strategy of ``player`` against ``x``.

    Satisfies ``<x_k, gradient> == utility(game, k, x)``.
    """
    idx = _check_player(game, player)
    _check_profile(game, x)
    others = [b for j, b in enumerate(x.blocks) if j != idx]
    return contract_except(game.payoffs[idx], player, others)


def shift(game: MultilinearGame, c: float) -> MultilinearGame:
    """Add ``c`` to every payoff entry; the equilibrium set is unchanged."""
    c = float(c)
    if not np.isfinite(c):
        raise ValueError("shift must be finite")
    return MultilinearGame(
        [DenseTensor(t.data + c) for t in game.payoffs], name=game.name
    )


def auto_shift(game: MultilinearGame) -> tuple[MultilinearGame, float]:
    """Shift the game positive if needed.

    Returns ``(game, 0.0)`` when every entry is already > 0, otherwise
    ``(shift(game, c), c)`` with ``c = 1 - min_entry`` so all entries
    end up >= 1.
    """
    lo = game.min_entry()
    if lo > 0.0:
        return game, 0.0
    c = 1.0 - lo
    return shift(game, c), c


def best_response_gap(game: MultilinearGame, x: MixedProfile) -> np.ndarray:
    """Per-player deviation incentive; all zeros exactly at an equilibrium.

    Component ``k`` is ``utility_k - min_i gradient_k[i]``: how much
    player ``k`` could improve (payoffs read as costs) by the best
    unilateral deviation, which for a linear objective over the simplex
    is attained at a vertex.  Always >= 0 up to rounding.
    """
    _check_profile(game, x)
    gaps = np.empty(game.n)
    for k in range(1, game.n + 1):
        g = payoff_gradient(game, k, x)
        gaps[k - 1] = float(x.blocks[k - 1] @ g) - float(g.min())
    return gaps


def random_game(
    shape: Sequence[int], seed: int, name: str | None = None
) -> MultilinearGame:
    """A game with i.i.d. uniform [0, 1) payoff entries from SplitMix64.

    One stream seeded with ``seed`` fills player 1's tensor in row-major
    order, then player 2's, and so on; identical ``(shape, seed)``
    reproduce bit-identical games.
    """
    dims = tuple(int(m) for m in shape)
    rng = SplitMix64(int(seed))
    size = int(np.prod(dims)) if dims else 0
    payoffs = []
    for _ in range(len(dims)):
        flat = np.fromiter(
            (rng.next_float() for _ in range(size)), dtype=np.float64, count=size
        )
        payoffs.append(DenseTensor(flat, dims))
    return MultilinearGame(payoffs, name=name)
