"""Dense order-n tensors and the multilinear contraction primitives.

Conventions used throughout the package:

* Modes (and players) are numbered ``1..n``; mode ``k`` corresponds to
  axis ``k - 1`` of the underlying array.
* Storage is row-major float64, the last mode varying fastest.
* Tensors are immutable after construction and therefore safe to share
  between threads; every operation allocates a fresh output.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

__all__ = [
    "DenseTensor",
    "mode_product",
    "contract_all",
    "contract_except",
    "bar_permute",
    "power_contract",
]

_MAX_ELEMENTS = np.iinfo(np.intp).max


def _validated_dims(dims: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    for d in out:
        if d < 1:
            raise ValueError(f"tensor dimensions must be >= 1, got {d}")
    if out and math.prod(out) > _MAX_ELEMENTS:
        raise ValueError(
            f"shape {'x'.join(map(str, out))} exceeds the addressable element range"
        )
    return out


class DenseTensor:
    """Immutable dense real tensor with finite float64 entries.

    ``DenseTensor(data)`` adopts the shape of ``data``;
    ``DenseTensor(flat, shape)`` reshapes a flat row-major sequence.
    Order 0 (a scalar) is a legal value so that contractions compose.
    """

    __slots__ = ("_data",)

    def __init__(self, data, shape: Sequence[int] | None = None):
        arr = np.array(data, dtype=np.float64, order="C")
        if shape is not None:
            dims = _validated_dims(shape)
            expected = math.prod(dims)
            if arr.size != expected:
                raise ValueError(
                    f"data has {arr.size} entries but shape "
                    f"{'x'.join(map(str, dims))} requires {expected}"
                )
            arr = arr.reshape(dims)
        else:
            _validated_dims(arr.shape)
        if arr.size and not np.isfinite(arr).all():
            raise ValueError("tensor entries must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        """The underlying read-only array."""
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def order(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return self._data.size

    def item(self) -> float:
        """Value of an order-0 tensor."""
        if self.order != 0:
            raise ValueError(f"item() requires an order-0 tensor, got order {self.order}")
        return float(self._data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other._data)

    __hash__ = None  # value semantics without hashing

    def __repr__(self) -> str:
        dims = "x".join(map(str, self.shape)) or "scalar"
        return f"DenseTensor({dims})"


def _check_mode(t: DenseTensor, mode: int) -> int:
    """Validate a 1-based mode index, returning the 0-based axis."""
    if not 1 <= mode <= t.order:
        raise ValueError(f"mode {mode} out of range for an order-{t.order} tensor")
    return mode - 1


def _check_vector(v, length: int, what: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional")
    if arr.shape[0] != length:
        raise ValueError(f"{what} has length {arr.shape[0]}, expected {length}")
    return arr


def mode_product(t: DenseTensor, mode: int, vector) -> DenseTensor:
    """Contract ``t`` against ``vector`` along ``mode``, dropping that mode.

    Entry ``(i_1,..,i_{k-1},i_{k+1},..,i_n)`` of the result is
    ``sum_j t[i_1,..,j,..,i_n] * vector[j]`` with ``j`` running over mode
    ``k``.  An order-1 input yields an order-0 tensor.
    """
    ax = _check_mode(t, mode)
    v = _check_vector(vector, t.shape[ax], f"mode-{mode} vector")
    return DenseTensor(np.tensordot(t.data, v, axes=([ax], [0])))


def contract_all(t: DenseTensor, vectors: Sequence) -> float:
    """Full multilinear form: contract one vector against every mode."""
    if len(vectors) != t.order:
        raise ValueError(f"expected {t.order} vectors, got {len(vectors)}")
    data = t.data
    for mode in range(t.order, 0, -1):
        v = _check_vector(vectors[mode - 1], t.shape[mode - 1], f"mode-{mode} vector")
        data = np.tensordot(data, v, axes=([data.ndim - 1], [0]))
    return float(data)


def contract_except(t: DenseTensor, mode: int, vectors: Sequence) -> np.ndarray:
    """Contract every mode but ``mode``; returns a vector of length m_k.

    ``vectors`` supplies one vector per remaining mode, in increasing
    mode order.  Component ``i`` equals ``contract_all`` with the i-th
    standard basis vector in position ``mode``, which is the gradient of
    the multilinear form with respect to the mode-``k`` argument.
    """
    keep = _check_mode(t, mode)
    others = [ax for ax in range(t.order) if ax != keep]
    if len(vectors) != len(others):
        raise ValueError(f"expected {len(others)} vectors, got {len(vectors)}")
    data = t.data
    for ax, v in zip(reversed(others), reversed(list(vectors))):
        v = _check_vector(v, t.shape[ax], f"mode-{ax + 1} vector")
        data = np.tensordot(data, v, axes=([ax], [0]))
    return np.asarray(data, dtype=np.float64).reshape(t.shape[keep])


def bar_permute(t: DenseTensor, mode: int) -> DenseTensor:
    """Move ``mode`` to the front, preserving the order of the rest.

    The result has shape ``(m_k, m_1, .., m_{k-1}, m_{k+1}, .., m_n)``;
    ``bar_permute(t, 1)`` is ``t`` itself.  Front-mode gradient
    contraction of the result equals ``contract_except(t, mode, ...)``.
    """
    ax = _check_mode(t, mode)
    return DenseTensor(np.moveaxis(t.data, ax, 0))


def power_contract(t: DenseTensor, vector) -> np.ndarray:
    """Contract a cubical tensor with ``order - 1`` copies of ``vector``.

    Component ``i`` is ``sum t[i, i_2, .., i_n] * v[i_2] .. v[i_n]``.
    """
    if t.order < 1:
        raise ValueError("power_contract requires order >= 1")
    m = t.shape[0]
    if any(d != m for d in t.shape):
        raise ValueError(f"tensor is not cubical: shape {t.shape}")
    v = _check_vector(vector, m, "vector")
    data = t.data
    for _ in range(t.order - 1):
        data = np.tensordot(data, v, axes=([data.ndim - 1], [0]))
    return np.asarray(data, dtype=np.float64).reshape(m)
