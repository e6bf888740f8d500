"""Path-membership topology matrix built from received message copies.

Each received copy names the relays it passed through.  Stacking those relay
sets gives a boolean ``k x n`` matrix (rows are paths, columns are relays).
Rows carrying content 1 are placed first, so the matrix takes the block form
``[[B1, Bs1, 0], [0, Bs0, B0]]`` once columns are grouped by type.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateConflict, EmptyInput


@dataclass(frozen=True)
class MessageCopy:
    """One received copy: its content bit and the relays it travelled through.

    ``path`` excludes the source and the destination, so a copy sent straight
    from source to destination has an empty path and one hop.
    """

    content: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if self.content not in (0, 1):
            raise ValueError(f"content must be 0 or 1, got {self.content!r}")
        path = tuple(int(v) for v in self.path)
        if len(set(path)) != len(path):
            raise ValueError(f"path {path} visits a relay twice")
        object.__setattr__(self, "path", path)

    @property
    def hops(self) -> int:
        return len(self.path) + 1


@dataclass(frozen=True, eq=False)
class PathSystem:
    matrix: np.ndarray
    contents: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]
    vehicle_ids: tuple[int, ...]
    path_ids: tuple[int, ...]
    direct: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    @property
    def k1(self) -> int:
        return sum(self.contents)

    @property
    def hops(self) -> tuple[int, ...]:
        return tuple(len(p) + 1 for p in self.paths)

    @property
    def unanimous(self) -> int | None:
        """The shared content when there is no conflict, else ``None``.

        A direct source-to-destination copy wins outright since the source is
        honest.
        """
        if self.direct:
            return self.direct[0]
        if self.k and self.k1 in (0, self.k):
            return self.contents[0]
        return None

    def row_sets(self) -> list[frozenset[int]]:
        return [frozenset(p) for p in self.paths]


@dataclass(frozen=True, eq=False)
class Partition:
    """Column classification of a :class:`PathSystem` by the contents it relays.

    Type 1 relays sit only on content-1 paths, Type 0 only on content-0 paths
    and Type 2 on both.  ``b1`` and ``b0`` are the content-1 rows restricted to
    Type 1 columns and the content-0 rows restricted to Type 0 columns.
    """

    k: int
    k1: int
    n: int
    type1: tuple[int, ...]
    type0: tuple[int, ...]
    type2: tuple[int, ...]
    b1: np.ndarray
    b0: np.ndarray

    @property
    def n1(self) -> int:
        return len(self.type1)

    @property
    def n0(self) -> int:
        return len(self.type0)

    @property
    def n2(self) -> int:
        return len(self.type2)

    @property
    def conflicting(self) -> bool:
        return 0 < self.k1 < self.k


def build_path_system(copies: Iterable[MessageCopy]) -> PathSystem:
    copies = list(copies)
    if not copies:
        raise EmptyInput("no message copies received")

    direct: list[int] = []
    seen: dict[tuple[int, ...], int] = {}
    kept: list[tuple[int, MessageCopy]] = []
    for idx, copy in enumerate(copies):
        if not copy.path:
            if direct and direct[0] != copy.content:
                raise DuplicateConflict("direct copies from the source disagree")
            direct.append(copy.content)
            continue
        prev = seen.get(copy.path)
        if prev is not None:
            if prev != copy.content:
                raise DuplicateConflict(f"path {copy.path} delivered both 0 and 1")
            continue
        seen[copy.path] = copy.content
        kept.append((idx, copy))

    # content-1 rows first, input order preserved within each group
    kept.sort(key=lambda item: 1 - item[1].content)
    vehicles = sorted({v for _, c in kept for v in c.path})
    col = {v: j for j, v in enumerate(vehicles)}
    matrix = np.zeros((len(kept), len(vehicles)), dtype=bool)
    for i, (_, c) in enumerate(kept):
        matrix[i, [col[v] for v in c.path]] = True

    return PathSystem(
        matrix=matrix,
        contents=tuple(c.content for _, c in kept),
        paths=tuple(c.path for _, c in kept),
        vehicle_ids=tuple(vehicles),
        path_ids=tuple(idx for idx, _ in kept),
        direct=tuple(direct[:1]),
    )


def partition(ps: PathSystem) -> Partition:
    contents = np.asarray(ps.contents, dtype=bool)
    m = ps.matrix
    on1 = m[contents].any(axis=0) if contents.any() else np.zeros(ps.n, dtype=bool)
    on0 = m[~contents].any(axis=0) if (~contents).any() else np.zeros(ps.n, dtype=bool)
    t1 = np.flatnonzero(on1 & ~on0)
    t0 = np.flatnonzero(on0 & ~on1)
    t2 = np.flatnonzero(on0 & on1)
    return Partition(
        k=ps.k,
        k1=int(contents.sum()),
        n=ps.n,
        type1=tuple(int(j) for j in t1),
        type0=tuple(int(j) for j in t0),
        type2=tuple(int(j) for j in t2),
        b1=m[contents][:, t1],
        b0=m[~contents][:, t0],
    )


def copies_from_dict(data: dict) -> list[MessageCopy]:
    try:
        raw = data["copies"]
    except (KeyError, TypeError):
        raise ValueError("scenario needs a 'copies' list") from None
    if not isinstance(raw, list):
        raise ValueError("'copies' must be a list")
    out = []
    for item in raw:
        if not isinstance(item, dict) or "content" not in item:
            raise ValueError(f"bad copy entry {item!r}")
        content = item["content"]
        if isinstance(content, bool) or content not in (0, 1):
            raise ValueError(f"content must be 0 or 1, got {content!r}")
        path = item.get("path", [])
        if not isinstance(path, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in path
        ):
            raise ValueError(f"path must be a list of ints, got {path!r}")
        out.append(MessageCopy(content, tuple(path)))
    return out


def copies_to_dict(copies: Sequence[MessageCopy]) -> list[dict]:
    return [{"content": c.content, "path": list(c.path)} for c in copies]


def load_scenario(path: str | Path) -> dict:
    """Read a scenario file into ``{"copies": [...], "p": ..., "p1": ...}``.

    Unknown keys are kept as-is so dumped sweep trials can be replayed.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("scenario must be a JSON object")
    data = dict(data)
    data["copies"] = copies_from_dict(data)
    for key in ("p", "p1"):
        if key in data and data[key] is not None:
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"{key} must be a number")
            data[key] = float(value)
    return data
