"""Shared fixtures and independent brute-force oracles.

The oracle functions recompute contractions with plain Python loops so
library results can be checked against an implementation that shares no
code with the package.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from mlgame import MultilinearGame, battle_of_the_sexes, three_player_sample


def naive_contract_all(data: np.ndarray, vectors) -> float:
    """Full multilinear form by explicit summation."""
    total = 0.0
    for idx in itertools.product(*(range(d) for d in data.shape)):
        term = float(data[idx])
        for ax, i in enumerate(idx):
            term *= float(vectors[ax][i])
        total += term
    return total


def naive_mode_product(data: np.ndarray, mode: int, v) -> np.ndarray:
    """k-mode product by explicit summation (mode is 1-based)."""
    ax = mode - 1
    out_shape = data.shape[:ax] + data.shape[ax + 1 :]
    out = np.zeros(out_shape)
    for idx in itertools.product(*(range(d) for d in out_shape)):
        acc = 0.0
        for j in range(data.shape[ax]):
            full = idx[:ax] + (j,) + idx[ax:]
            acc += float(data[full]) * float(v[j])
        out[idx] = acc
    return out


def naive_contract_except(data: np.ndarray, mode: int, vectors) -> np.ndarray:
    """Gradient contraction: basis vector in position ``mode`` (1-based)."""
    ax = mode - 1
    m = data.shape[ax]
    out = np.zeros(m)
    for i in range(m):
        vecs = []
        pos = 0
        for a in range(data.ndim):
            if a == ax:
                e = np.zeros(m)
                e[i] = 1.0
                vecs.append(e)
            else:
                vecs.append(np.asarray(vectors[pos]))
                pos += 1
        out[i] = naive_contract_all(data, vecs)
    return out


def random_simplex_blocks(shape, rng) -> list[np.ndarray]:
    """One random interior simplex vector per player."""
    blocks = []
    for m in shape:
        raw = rng.random(m) + 0.05
        blocks.append(raw / raw.sum())
    return blocks


@pytest.fixture
def bos() -> MultilinearGame:
    return battle_of_the_sexes()


@pytest.fixture
def three_player() -> MultilinearGame:
    return three_player_sample()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)
