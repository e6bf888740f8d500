"""One-dimensional vehicular road: Poisson relays, unit-disk links, path harvest.

Node indices: 0 is the source at coordinate 0, relays are ``1..N`` in order of
position, and ``N + 1`` is the destination at coordinate ``L``.  Relay ids in
message paths are the relay node indices, so ascending id means ascending
position.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .errors import NoRoute
from .topology import MessageCopy


@dataclass(frozen=True)
class ScenarioConfig:
    rho: float = 0.01  # vehicles per metre
    dist: float = 2000.0  # source-destination distance, metres
    wait: float = 0.1  # waiting window after first arrival, seconds
    p: float = 0.1
    p1: float = 0.001
    range: float = 250.0
    beta: float = 0.004  # per-hop delay, seconds
    max_paths: int = 64
    max_retries: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.rho < 0 or self.dist <= 0 or self.wait < 0 or self.range <= 0 or self.beta <= 0:
            raise ValueError("rho, wait must be >= 0 and dist, range, beta > 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 < self.p1 < 1.0:
            raise ValueError(f"p1 must lie in (0, 1), got {self.p1}")
        if self.max_paths < 1 or self.max_retries < 1:
            raise ValueError("max_paths and max_retries must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    return ScenarioConfig.from_dict(data)


@dataclass(frozen=True, eq=False)
class Road:
    coords: np.ndarray  # source, relays ascending, destination
    range: float

    @property
    def n_relays(self) -> int:
        return len(self.coords) - 2

    @property
    def dest(self) -> int:
        return len(self.coords) - 1

    def successors(self, u: int) -> list[int]:
        """Nodes ahead of ``u`` within range (forward-progress links)."""
        x = self.coords
        hi = int(np.searchsorted(x, x[u] + self.range, side="right"))
        return list(range(u + 1, hi))

    def adjacency(self) -> dict[int, list[int]]:
        """Undirected unit-disk neighbour lists."""
        x = self.coords
        out = {}
        for u in range(len(x)):
            lo = int(np.searchsorted(x, x[u] - self.range, side="left"))
            hi = int(np.searchsorted(x, x[u] + self.range, side="right"))
            out[u] = [v for v in range(lo, hi) if v != u]
        return out

    @property
    def connected(self) -> bool:
        return bool(np.all(np.diff(self.coords) <= self.range))


def road_from_relays(relays, dist: float, range_: float = 250.0) -> Road:
    relays = np.sort(np.asarray(relays, dtype=float))
    return Road(np.concatenate([[0.0], relays, [float(dist)]]), float(range_))


def generate_road(cfg: ScenarioConfig, rng: np.random.Generator) -> Road:
    """Relays from a rate-``rho`` Poisson process on ``(0, L)``."""
    relays = []
    if cfg.rho > 0:
        x = rng.exponential(1.0 / cfg.rho)
        while x < cfg.dist:
            relays.append(x)
            x += rng.exponential(1.0 / cfg.rho)
    return road_from_relays(relays, cfg.dist, cfg.range)


def _hop_sets(road: Road) -> list[int]:
    """Bitmask per node of the exact hop counts with which it can reach the destination."""
    dest = road.dest
    reach = [0] * (dest + 1)
    reach[dest] = 1
    for u in range(dest - 1, -1, -1):
        acc = 0
        for v in road.successors(u):
            acc |= reach[v]
        reach[u] = acc << 1
    return reach


def harvest_paths(road: Road, wait: float, beta: float, max_paths: int = 64
                  ) -> list[tuple[tuple[int, ...], int]]:
    """Forward-progress source-destination paths arriving within the window.

    A path of ``h`` hops arrives at ``h * beta``; paths arriving no later than
    the first arrival plus ``wait`` are kept, fewest hops first and then in
    lexicographic relay order, up to ``max_paths``.
    """
    reach = _hop_sets(road)
    if reach[0] == 0:
        raise NoRoute("destination unreachable")
    h_min = (reach[0] & -reach[0]).bit_length() - 1
    h_max = reach[0].bit_length() - 1
    slack = int(math.floor(wait / beta + 1e-9))
    dest = road.dest
    out: list[tuple[tuple[int, ...], int]] = []

    def walk(u: int, left: int, trail: list[int]):
        if len(out) >= max_paths:
            return
        if left == 0:
            out.append((tuple(trail), len(trail) + 1))
            return
        for v in road.successors(u):
            if v == dest:
                if left == 1:
                    walk(v, 0, trail)
            elif reach[v] >> (left - 1) & 1:
                trail.append(v)
                walk(v, left - 1, trail)
                trail.pop()
            if len(out) >= max_paths:
                return

    for h in range(h_min, min(h_max, h_min + slack) + 1):
        if reach[0] >> h & 1:
            walk(0, h, [])
        if len(out) >= max_paths:
            break
    return out


@dataclass(frozen=True, eq=False)
class TrialOutcome:
    m0: int
    malicious: frozenset[int]
    copies: tuple[MessageCopy, ...]
    positions: dict[int, float]
    discarded: int = 0  # disconnected roads redrawn before this one

    def flipped(self) -> "TrialOutcome":
        """Same topology and attackers with the other source content."""
        return replace(self, m0=1 - self.m0,
                       copies=tuple(MessageCopy(1 - c.content, c.path) for c in self.copies))


def tamper(paths, malicious, m0: int) -> tuple[MessageCopy, ...]:
    """A path carrying any malicious relay delivers the wrong content."""
    return tuple(MessageCopy(m0 ^ int(not malicious.isdisjoint(path)), path) for path in paths)


def connected_road(cfg: ScenarioConfig, rng: np.random.Generator) -> tuple[Road, int]:
    for attempt in range(cfg.max_retries):
        road = generate_road(cfg, rng)
        if road.connected:
            return road, attempt
    raise NoRoute(f"no connected road in {cfg.max_retries} draws")


def run_trial(cfg: ScenarioConfig, rng: np.random.Generator,
              road: Road | None = None, discarded: int = 0) -> TrialOutcome:
    """Draw a connected road, attackers and source content; deliver copies.

    The road, the attacker uniforms and the source uniform are drawn from
    three child streams, so the same seed gives nested attacker sets as ``p``
    grows and the same road for every ``p`` and ``wait``.
    """
    road_rng, bad_rng, src_rng = rng.spawn(3)
    if road is None:
        road, discarded = connected_road(cfg, road_rng)
    n = road.n_relays
    u = bad_rng.random(n)
    malicious = frozenset(int(i) + 1 for i in np.flatnonzero(u < cfg.p))
    m0 = int(src_rng.random() < cfg.p1)
    harvested = harvest_paths(road, cfg.wait, cfg.beta, cfg.max_paths)
    copies = tamper([path for path, _ in harvested], malicious, m0)
    positions = {i: float(road.coords[i]) for i in range(1, n + 1)}
    return TrialOutcome(m0, malicious, copies, positions, discarded)
