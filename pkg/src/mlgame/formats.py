"""JSON file formats: games, profiles, and exported complementarity tensors.

All files are UTF-8 JSON without comments.  Multi-dimensional payload
arrays are stored flat in row-major order (last index fastest) with
1-based index conventions in the documentation; NaN and Inf are
rejected on input.  Floats survive a round trip bit-exactly because the
writer emits shortest-round-trip decimal literals.

Game file keys: ``players`` (n), ``shape`` (list of m_k), ``payoffs``
(n flat arrays of length prod m_k), optional ``name``,
``shift_applied``, ``generator``, ``seed``.  Unknown keys are ignored.

Profile file keys: ``blocks`` (one probability vector per player).

Tensor file keys: ``kind`` = "tcp-tensor", ``order``, ``shape``,
``data`` (flat row-major), ``q``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .game import MixedProfile, MultilinearGame
from .tensor import DenseTensor

__all__ = [
    "GameFileError",
    "GAME_SCHEMA_VERSION",
    "game_to_document",
    "game_from_document",
    "save_game",
    "load_game",
    "save_profile",
    "load_profile",
    "save_tcp_tensor",
    "load_tcp_tensor",
]

GAME_SCHEMA_VERSION = 1

_META_KEYS = ("name", "shift_applied", "generator", "seed")


class GameFileError(ValueError):
    """A structural or numeric problem in an input file, with its location."""


def _reject_constant(token: str):
    raise GameFileError(f"non-finite number {token!r} is not allowed")


def _loads(text: str, what: str) -> dict:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise GameFileError(f"{what}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise GameFileError(f"{what}: top level must be a JSON object")
    return doc


def _number_list(doc: dict, key: str, what: str = "") -> list:
    where = f"{what}{key}"
    if key not in doc:
        raise GameFileError(f"missing key {where!r}")
    value = doc[key]
    if not isinstance(value, list):
        raise GameFileError(f"{where!r} must be an array")
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise GameFileError(f"{where!r}[{i}] is not a number")
        if not math.isfinite(v):
            raise GameFileError(f"{where!r}[{i}] is not finite")
    return value


def game_to_document(game: MultilinearGame, **meta) -> dict:
    """Plain-dict form of a game, ready for json.dump."""
    doc = {
        "schema_version": GAME_SCHEMA_VERSION,
        "players": game.n,
        "shape": list(game.shape),
        "payoffs": [t.data.reshape(-1).tolist() for t in game.payoffs],
    }
    if game.name is not None:
        doc["name"] = game.name
    for key in _META_KEYS:
        if key in meta and meta[key] is not None and key not in doc:
            doc[key] = meta[key]
    return doc


def game_from_document(doc: dict) -> tuple[MultilinearGame, dict]:
    """Parse and validate a game document; returns (game, metadata)."""
    if "players" not in doc:
        raise GameFileError("missing key 'players'")
    players = doc["players"]
    if isinstance(players, bool) or not isinstance(players, int) or players < 2:
        raise GameFileError("'players' must be an integer >= 2")
    shape = _number_list(doc, "shape")
    if len(shape) != players:
        raise GameFileError(
            f"'shape' has {len(shape)} entries, expected {players}"
        )
    dims = []
    for i, v in enumerate(shape):
        if not isinstance(v, int) or v < 1:
            raise GameFileError(f"'shape'[{i}] must be a positive integer")
        dims.append(v)
    expected = math.prod(dims)
    if "payoffs" not in doc:
        raise GameFileError("missing key 'payoffs'")
    payoffs = doc["payoffs"]
    if not isinstance(payoffs, list) or len(payoffs) != players:
        raise GameFileError(f"'payoffs' must hold {players} arrays")
    tensors = []
    for k in range(players):
        flat = _number_list({"entries": payoffs[k]}, "entries", f"payoffs[{k + 1}].")
        if len(flat) != expected:
            raise GameFileError(
                f"'payoffs'[{k + 1}] has {len(flat)} entries, expected {expected} "
                f"(shape {'x'.join(map(str, dims))})"
            )
        tensors.append(DenseTensor(flat, dims))
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise GameFileError("'name' must be a string")
    meta = {key: doc[key] for key in _META_KEYS if key in doc}
    return MultilinearGame(tensors, name=name), meta


def save_game(path, game: MultilinearGame, **meta) -> None:
    doc = game_to_document(game, **meta)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_game(path) -> tuple[MultilinearGame, dict]:
    text = Path(path).read_text(encoding="utf-8")
    return game_from_document(_loads(text, str(path)))


def save_profile(path, profile: MixedProfile) -> None:
    doc = {"blocks": [b.tolist() for b in profile.blocks]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_profile(path) -> MixedProfile:
    doc = _loads(Path(path).read_text(encoding="utf-8"), str(path))
    if "blocks" not in doc or not isinstance(doc["blocks"], list):
        raise GameFileError("missing key 'blocks'")
    blocks = []
    for k, b in enumerate(doc["blocks"], start=1):
        blocks.append(_number_list({"block": b}, "block", f"blocks[{k}]."))
    try:
        return MixedProfile(blocks)
    except ValueError as exc:
        raise GameFileError(f"invalid profile: {exc}") from exc


def save_tcp_tensor(path, big: DenseTensor, q: np.ndarray) -> None:
    doc = {
        "schema_version": GAME_SCHEMA_VERSION,
        "kind": "tcp-tensor",
        "order": big.order,
        "shape": list(big.shape),
        "data": big.data.reshape(-1).tolist(),
        "q": np.asarray(q, dtype=np.float64).tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_tcp_tensor(path) -> tuple[DenseTensor, np.ndarray]:
    doc = _loads(Path(path).read_text(encoding="utf-8"), str(path))
    shape = _number_list(doc, "shape")
    data = _number_list(doc, "data")
    q = _number_list(doc, "q")
    try:
        tensor = DenseTensor(data, shape)
    except ValueError as exc:
        raise GameFileError(f"invalid tensor data: {exc}") from exc
    return tensor, np.asarray(q, dtype=np.float64)
