"""The complementarity reformulation of a multilinear game.

A game with strategy counts ``(m_1, .., m_n)`` induces the problem

    find y >= 0 with F(y) >= 0 and <y, F(y)> = 0,

where ``y`` concatenates one block per player (``m = sum m_k``) and
block ``k`` of ``F(y)`` is player ``k``'s payoff gradient evaluated on
the other blocks, minus the all-ones vector.  Equivalently
``F(y) = A y^{n-1} + q`` for a cubical order-n tensor ``A`` of dimension
``m`` carrying every payoff tensor once, and ``q = -e``.

``F`` and its Jacobian are always computed blockwise; the big tensor is
assembled only as a cross-check oracle and for export, since its
``m^n`` storage is almost entirely zeros.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .game import MultilinearGame
from .tensor import DenseTensor

__all__ = [
    "MemoryBudgetError",
    "TcpInstance",
    "split_blocks",
    "join_blocks",
    "eval_F",
    "jacobian_F",
    "residual",
    "assemble_big_tensor",
    "DEFAULT_BIG_TENSOR_BUDGET",
]

DEFAULT_BIG_TENSOR_BUDGET = 100_000_000


class MemoryBudgetError(ValueError):
    """Raised when the dense big tensor would exceed the entry budget."""

    def __init__(self, required: int, allowed: int):
        self.required = required
        self.allowed = allowed
        super().__init__(
            f"big tensor needs {required} entries, budget allows {allowed}"
        )


def split_blocks(y: np.ndarray, sizes: Sequence[int]) -> list[np.ndarray]:
    """Partition ``y`` into consecutive blocks of the given sizes."""
    y = np.asarray(y, dtype=np.float64)
    total = int(sum(sizes))
    if y.ndim != 1 or y.shape[0] != total:
        raise ValueError(f"vector has length {y.shape}, expected {total}")
    out = []
    pos = 0
    for size in sizes:
        out.append(y[pos : pos + size])
        pos += size
    return out


def join_blocks(blocks: Sequence) -> np.ndarray:
    """Concatenate blocks back into a single vector (inverse of split)."""
    return np.concatenate([np.asarray(b, dtype=np.float64) for b in blocks])


class TcpInstance:
    """Problem data for the complementarity form of a game.

    Positivity of the payoff entries is assumed by the equilibrium
    correspondence but deliberately not enforced here.
    """

    __slots__ = ("_game", "_sizes", "_offsets", "_q")

    def __init__(self, game: MultilinearGame):
        self._game = game
        self._sizes = game.shape
        offsets = np.concatenate(([0], np.cumsum(self._sizes)))
        self._offsets = tuple(int(v) for v in offsets[:-1])
        q = -np.ones(int(offsets[-1]))
        q.setflags(write=False)
        self._q = q

    @property
    def game(self) -> MultilinearGame:
        return self._game

    @property
    def m(self) -> int:
        """Total dimension ``sum m_k``."""
        return self._q.shape[0]

    @property
    def q(self) -> np.ndarray:
        return self._q

    @property
    def block_offsets(self) -> tuple[int, ...]:
        """Start index of each player's block in the concatenated vector."""
        return self._offsets

    def split(self, y: np.ndarray) -> list[np.ndarray]:
        return split_blocks(y, self._sizes)

    def join(self, blocks: Sequence) -> np.ndarray:
        return join_blocks(blocks)

    def __repr__(self) -> str:
        return f"TcpInstance(m={self.m}, shape={self._sizes})"


def _check_y(t: TcpInstance, y) -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != t.m:
        raise ValueError(f"y has shape {arr.shape}, expected ({t.m},)")
    if not np.isfinite(arr).all():
        raise ValueError("y has non-finite entries")
    return arr


def _contract_keeping(data: np.ndarray, keep: tuple[int, ...], blocks) -> np.ndarray:
    # Contract every axis not in `keep` against its block, highest axis
    # first so lower axis indices stay valid.
    for ax in range(data.ndim - 1, -1, -1):
        if ax not in keep:
            data = np.tensordot(data, blocks[ax], axes=([ax], [0]))
    return data


def eval_F(t: TcpInstance, y) -> np.ndarray:
    """Blockwise map: block k is player k's gradient on the other blocks, minus e."""
    arr = _check_y(t, y)
    blocks = t.split(arr)
    out = []
    for k in range(len(blocks)):
        g = _contract_keeping(t.game.payoffs[k].data, (k,), blocks)
        out.append(g - 1.0)
    return join_blocks(out)


def jacobian_F(t: TcpInstance, y) -> np.ndarray:
    """Dense m-by-m Jacobian of :func:`eval_F`.

    Off-diagonal block ``(k, j)`` contracts player k's tensor over all
    modes except ``k`` and ``j``; diagonal blocks are identically zero
    because no player's own block enters their own gradient.
    """
    arr = _check_y(t, y)
    blocks = t.split(arr)
    n = t.game.n
    offs = t.block_offsets + (t.m,)
    J = np.zeros((t.m, t.m))
    for k in range(n):
        for j in range(n):
            if j == k:
                continue
            mat = _contract_keeping(t.game.payoffs[k].data, (k, j), blocks)
            if k > j:
                mat = mat.T
            J[offs[k] : offs[k + 1], offs[j] : offs[j + 1]] = mat
    return J


def residual(t: TcpInstance, y) -> float:
    """Max violation of the three complementarity conditions at ``y``.

    ``max(||min(y,0)||_inf, ||min(F(y),0)||_inf, |<y, F(y)>|)``; zero
    exactly at a solution.
    """
    arr = _check_y(t, y)
    F = eval_F(t, arr)
    neg_y = max(0.0, -float(arr.min()))
    neg_F = max(0.0, -float(F.min()))
    comp = abs(float(arr @ F))
    return max(neg_y, neg_F, comp)


def assemble_big_tensor(
    t: TcpInstance, max_entries: int = DEFAULT_BIG_TENSOR_BUDGET
) -> DenseTensor:
    """The explicit cubical order-n tensor ``A`` with ``A y^{n-1} + q = F(y)``.

    Player k's payoff tensor occupies the index region where tensor mode
    1 runs over block k, mode k over block 1, and every other mode j
    over block j, with the payoff subscripts permuted accordingly (modes
    1 and k swapped).  All other entries are zero.  Refuses to allocate
    beyond ``max_entries``.
    """
    n = t.game.n
    m = t.m
    required = m**n
    if required > max_entries:
        raise MemoryBudgetError(required, max_entries)
    offs = t.block_offsets + (t.m,)
    big = np.zeros((m,) * n)
    for k in range(n):
        block_of_mode = list(range(n))
        if k > 0:
            block_of_mode[0], block_of_mode[k] = k, 0
        region = tuple(slice(offs[b], offs[b + 1]) for b in block_of_mode)
        data = t.game.payoffs[k].data
        big[region] = data if k == 0 else np.swapaxes(data, 0, k)
    return DenseTensor(big)
