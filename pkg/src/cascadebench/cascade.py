"""Cascade data model: adoption timelines, early-stage views, diffusion
surfaces and the frontier / non-adopter split of the first surface.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import SocialGraph

log = logging.getLogger(__name__)


class CascadeParseError(ValueError):
    pass


@dataclass
class Cascade:
    """Time-ordered adoptions of one message.

    Events are (node, seconds since the root adoption); node ids are
    distinct (first adoption kept) and times ascend with the root at 0.
    """

    id: str
    nodes: list[str]
    times: np.ndarray

    @property
    def final_size(self) -> int:
        return len(self.nodes)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def root(self) -> str:
        return self.nodes[0]


@dataclass
class EarlyStage:
    """First n adoptions of a cascade; t_obs is the n-th adoption time."""

    cascade_id: str
    nodes: list[str]
    times: np.ndarray
    n: int

    @property
    def t_obs(self) -> float:
        return float(self.times[-1])


@dataclass
class SurfaceSet:
    """Adopters plus the first and second out-neighborhood surfaces.

    f1_exposure[i] is the time f1_nodes[i] first gained an adopting
    in-neighbor.  missing_adopters counts early-stage adopters absent
    from the graph (kept in timelines, skipped here).
    """

    adopters: np.ndarray          # internal indices, adoption order
    adopter_times: np.ndarray
    f1_nodes: np.ndarray
    f1_exposure: np.ndarray
    f2_nodes: np.ndarray
    missing_adopters: int = 0


@dataclass
class FrontierSplit:
    frontiers: np.ndarray
    non_adopters: np.ndarray
    t_lambda: float


def load_cascades(path, min_size: int = 50) -> list[Cascade]:
    """Load `cascade_id,node_id,timestamp` lines into per-cascade timelines.

    Events are sorted by time, repeat adoptions keep the earliest event,
    times are shifted so the root adopts at 0, and cascades smaller than
    min_size are dropped.
    """
    events: dict[str, list[tuple[float, str]]] = {}
    order: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",") if "," in line else line.split()
            if len(parts) != 3:
                raise CascadeParseError(
                    f"{path}: line {lineno}: expected 'cascade,node,timestamp'")
            cid, node, ts = (p.strip() for p in parts)
            try:
                t = float(ts)
            except ValueError:
                raise CascadeParseError(
                    f"{path}: line {lineno}: non-numeric timestamp {ts!r}") from None
            if cid not in events:
                events[cid] = []
                order.append(cid)
            events[cid].append((t, node))
    cascades = []
    dropped = 0
    for cid in order:
        evs = sorted(events[cid], key=lambda e: e[0])
        seen: set[str] = set()
        nodes: list[str] = []
        times: list[float] = []
        for t, node in evs:
            if node in seen:
                continue
            seen.add(node)
            nodes.append(node)
            times.append(t)
        if len(nodes) < min_size:
            dropped += 1
            continue
        t0 = times[0]
        cascades.append(Cascade(cid, nodes, np.asarray(times) - t0))
    if dropped:
        log.info("dropped %d cascades below min_size=%d", dropped, min_size)
    return cascades


def write_cascades(cascades: list[Cascade], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in cascades:
            for node, t in zip(c.nodes, c.times):
                fh.write(f"{c.id},{node},{t:.6f}\n")


def early_stage(c: Cascade, n: int = 50) -> EarlyStage:
    if c.final_size < n:
        raise ValueError(
            f"cascade {c.id} has {c.final_size} adopters, fewer than n={n}")
    return EarlyStage(c.id, c.nodes[:n], c.times[:n].copy(), n)


def surfaces(es: EarlyStage, g: SocialGraph) -> SurfaceSet:
    """First and second diffusion surfaces of an early-stage adopter set.

    F1 holds non-adopters with an adopting in-neighbor; F2 holds nodes
    one further out-step away, excluding adopters and F1.  Exposure time
    of an F1 node is the earliest adoption among its in-neighbors.
    """
    adopters = []
    times = []
    missing = 0
    for node, t in zip(es.nodes, es.times):
        if g.has_node(node):
            adopters.append(g.node_index(node))
            times.append(t)
        else:
            missing += 1
    if missing:
        log.debug("cascade %s: %d adopters not in graph", es.cascade_id, missing)
    adopters = np.asarray(adopters, dtype=np.int64)
    times = np.asarray(times, dtype=np.float64)
    adopter_set = set(adopters.tolist())
    exposure: dict[int, float] = {}
    for a, t in zip(adopters, times):  # ascending time: first touch is earliest
        for v in g.out_neighbors_idx(a):
            v = int(v)
            if v not in adopter_set and v not in exposure:
                exposure[v] = float(t)
    f1 = np.fromiter(exposure.keys(), dtype=np.int64, count=len(exposure))
    f1_exp = np.fromiter(exposure.values(), dtype=np.float64, count=len(exposure))
    if len(f1):
        reach = np.unique(np.concatenate([g.out_neighbors_idx(int(v)) for v in f1]))
        excluded = np.union1d(adopters, f1)
        f2 = np.setdiff1d(reach.astype(np.int64), excluded, assume_unique=False)
    else:
        f2 = np.empty(0, dtype=np.int64)
    return SurfaceSet(adopters, times, f1, f1_exp, f2, missing)


def frontier_split(s: SurfaceSet, t_obs: float, t_lambda: float) -> FrontierSplit:
    """Split F1 by exposure recency; boundary (== t_lambda) is a frontier."""
    if t_lambda < 0:
        raise ValueError("t_lambda must be non-negative")
    fresh = (t_obs - s.f1_exposure) <= t_lambda
    return FrontierSplit(s.f1_nodes[fresh], s.f1_nodes[~fresh], t_lambda)


def default_t_lambda(es: EarlyStage) -> float:
    """Median inter-adoption gap of the early stage; unit-free default."""
    if len(es.times) < 2:
        return 0.0
    return float(np.median(np.diff(es.times)))
