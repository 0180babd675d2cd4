"""Immutable directed social graph backed by CSR adjacency arrays.

An arc (u, v) means user v follows user u, so content posted by u can
reach v.  Both orientations are stored so that follower queries
(out-neighbors) and followee queries (in-neighbors) are O(degree).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


class GraphParseError(ValueError):
    """Malformed edge-list input (carries the offending line number)."""


@dataclass
class GraphLoadStats:
    lines_read: int = 0
    self_loops_dropped: int = 0
    duplicates_collapsed: int = 0


def _csr_from_arcs(n: int, src: np.ndarray, dst: np.ndarray):
    """Build (indptr, indices) with indices sorted per row."""
    order = np.lexsort((dst, src))
    indices = dst[order].astype(np.int32, copy=False)
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


class SocialGraph:
    """Follower network, immutable after construction.

    Node ids are arbitrary external tokens; internally nodes carry dense
    indices 0..n-1 in first-seen order.  Safe for concurrent reads.
    """

    def __init__(self, node_ids: list[str], src: np.ndarray, dst: np.ndarray,
                 directed: bool, edge_count: int,
                 stats: GraphLoadStats | None = None):
        n = len(node_ids)
        self.node_ids = node_ids
        self._index = {t: i for i, t in enumerate(node_ids)}
        self.directed = directed
        self.node_count = n
        self.edge_count = edge_count
        self.load_stats = stats or GraphLoadStats()
        self.out_indptr, self.out_indices = _csr_from_arcs(n, src, dst)
        self.in_indptr, self.in_indices = _csr_from_arcs(n, dst, src)
        self._und = None

    # -- id mapping ----------------------------------------------------
    def has_node(self, node_id: str) -> bool:
        return node_id in self._index

    def node_index(self, node_id: str) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    def node_id(self, index: int) -> str:
        return self.node_ids[index]

    # -- adjacency, internal indices ------------------------------------
    def out_neighbors_idx(self, i: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[i]:self.out_indptr[i + 1]]

    def in_neighbors_idx(self, i: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[i]:self.in_indptr[i + 1]]

    @property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    @property
    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    @property
    def arc_count(self) -> int:
        """Number of stored directed arcs (2x edge_count when undirected)."""
        return int(len(self.out_indices))

    # -- adjacency, external ids ----------------------------------------
    def out_neighbors(self, node_id: str) -> list[str]:
        """Followers of node_id, sorted by internal index, no duplicates."""
        i = self.node_index(node_id)
        return [self.node_ids[j] for j in self.out_neighbors_idx(i)]

    def in_neighbors(self, node_id: str) -> list[str]:
        i = self.node_index(node_id)
        return [self.node_ids[j] for j in self.in_neighbors_idx(i)]

    def out_degree(self, node_id: str) -> int:
        i = self.node_index(node_id)
        return int(self.out_indptr[i + 1] - self.out_indptr[i])

    def in_degree(self, node_id: str) -> int:
        i = self.node_index(node_id)
        return int(self.in_indptr[i + 1] - self.in_indptr[i])

    # -- undirected projection (cached) ----------------------------------
    def _und_csr(self):
        if self._und is None:
            src = np.concatenate([self._arc_src(), self.in_indices_src()])
            dst = np.concatenate([self.out_indices, self.in_indices])
            key = src.astype(np.int64) * self.node_count + dst
            uniq = np.unique(key)
            u_src = (uniq // self.node_count).astype(np.int64)
            u_dst = (uniq % self.node_count).astype(np.int32)
            self._und = _csr_from_arcs(self.node_count, u_src, u_dst)
        return self._und

    def _arc_src(self) -> np.ndarray:
        return np.repeat(np.arange(self.node_count, dtype=np.int64),
                         np.diff(self.out_indptr))

    def in_indices_src(self) -> np.ndarray:
        return np.repeat(np.arange(self.node_count, dtype=np.int64),
                         np.diff(self.in_indptr))

    def und_neighbors_idx(self, i: int) -> np.ndarray:
        indptr, indices = self._und_csr()
        return indices[indptr[i]:indptr[i + 1]]

    @property
    def und_degrees(self) -> np.ndarray:
        indptr, _ = self._und_csr()
        return np.diff(indptr)

    @property
    def und_edge_count(self) -> int:
        _, indices = self._und_csr()
        return int(len(indices)) // 2


def from_edges(edges, directed: bool = True,
               stats: GraphLoadStats | None = None) -> SocialGraph:
    """Build a graph from (src, dst) token pairs.

    Self-loops are dropped (counted in load stats) and duplicate edges
    collapsed.  Undirected inputs are materialized as two arcs each but
    edge_count counts each undirected edge once.
    """
    stats = stats or GraphLoadStats()
    index: dict[str, int] = {}
    node_ids: list[str] = []
    src_list: list[int] = []
    dst_list: list[int] = []
    for u, v in edges:
        iu = index.get(u)
        if iu is None:
            iu = index[u] = len(node_ids)
            node_ids.append(u)
        iv = index.get(v)
        if iv is None:
            iv = index[v] = len(node_ids)
            node_ids.append(v)
        if iu == iv:
            stats.self_loops_dropped += 1
            continue
        src_list.append(iu)
        dst_list.append(iv)
    if not node_ids:
        raise GraphParseError("edge list is empty")
    src = np.asarray(src_list, dtype=np.int64)
    dst = np.asarray(dst_list, dtype=np.int64)
    return _assemble(node_ids, src, dst, directed, stats)


def from_index_arcs(node_count: int, src: np.ndarray, dst: np.ndarray,
                    directed: bool = True,
                    node_ids: list[str] | None = None) -> SocialGraph:
    """Fast path for generators that already hold dense integer arcs."""
    if node_ids is None:
        node_ids = [str(i) for i in range(node_count)]
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    stats = GraphLoadStats()
    keep = src != dst
    stats.self_loops_dropped = int(len(src) - keep.sum())
    return _assemble(node_ids, src[keep], dst[keep], directed, stats)


def _assemble(node_ids: list[str], src: np.ndarray, dst: np.ndarray,
              directed: bool, stats: GraphLoadStats) -> SocialGraph:
    n = len(node_ids)
    if n > np.iinfo(np.int32).max:
        raise GraphParseError("graph exceeds 32-bit node index range")
    if directed:
        key = src * n + dst
        uniq = np.unique(key)
        stats.duplicates_collapsed += int(len(key) - len(uniq))
        a_src, a_dst = uniq // n, uniq % n
        edge_count = len(uniq)
    else:
        lo, hi = np.minimum(src, dst), np.maximum(src, dst)
        key = lo * n + hi
        uniq = np.unique(key)
        stats.duplicates_collapsed += int(len(key) - len(uniq))
        lo, hi = uniq // n, uniq % n
        a_src = np.concatenate([lo, hi])
        a_dst = np.concatenate([hi, lo])
        edge_count = len(uniq)
    return SocialGraph(node_ids, a_src, a_dst, directed, edge_count, stats)


def load_edge_list(path, directed: bool = True) -> SocialGraph:
    """Load a graph from a text edge list.

    One edge per line as ``src<sep>dst`` with a whitespace or comma
    separator; ``#``-prefixed comment lines are ignored.  Node ids are
    arbitrary tokens without whitespace.  Loading is deterministic:
    internal indices follow first-seen order.
    """
    stats = GraphLoadStats()

    def gen():
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                stats.lines_read += 1
                parts = line.split(",") if "," in line else line.split()
                if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                    raise GraphParseError(
                        f"{path}: line {lineno}: expected 'src dst', got {line!r}")
                yield parts[0].strip(), parts[1].strip()

    g = from_edges(gen(), directed=directed, stats=stats)
    if g.load_stats.self_loops_dropped:
        log.info("dropped %d self-loops while loading %s",
                 g.load_stats.self_loops_dropped, path)
    return g


def write_edge_list(g: SocialGraph, path) -> None:
    """Write the graph back out in loadable edge-list form.

    Undirected graphs emit each edge once (lower index first).
    """
    src = g._arc_src()
    dst = g.out_indices
    if not g.directed:
        keep = src < dst
        src, dst = src[keep], dst[keep]
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in zip(src, dst):
            fh.write(f"{g.node_ids[u]} {g.node_ids[v]}\n")
