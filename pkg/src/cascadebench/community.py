"""Node-to-community assignments: ingest external partitions or detect
communities with Louvain, plus Newman modularity on the undirected
projection.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import SocialGraph

log = logging.getLogger(__name__)


@dataclass
class CommunityAssignment:
    """Total mapping internal node index -> dense community id."""

    node_to_community: np.ndarray
    community_count: int
    modularity: float
    graph: SocialGraph = field(repr=False)
    singleton_fallbacks: int = 0

    def community_of(self, node_id: str) -> int:
        return int(self.node_to_community[self.graph.node_index(node_id)])

    def communities_of(self, nodes_idx: np.ndarray) -> np.ndarray:
        return self.node_to_community[nodes_idx]


def _und_edges(g: SocialGraph):
    """Each undirected edge once, as (u, v) arrays with u < v."""
    indptr, indices = g._und_csr()
    src = np.repeat(np.arange(g.node_count, dtype=np.int64), np.diff(indptr))
    keep = src < indices
    return src[keep], indices[keep].astype(np.int64)


def modularity(g: SocialGraph, mapping: np.ndarray) -> float:
    """Newman modularity Q = sum_c [ e_c/m - (deg_c / 2m)^2 ].

    Computed on the undirected projection with unit weights; an edgeless
    graph has Q = 0 by convention.
    """
    mapping = np.asarray(mapping)
    if mapping.shape != (g.node_count,):
        raise ValueError("mapping must cover every graph node exactly once")
    m = g.und_edge_count
    if m == 0:
        return 0.0
    u, v = _und_edges(g)
    _, dense = np.unique(mapping, return_inverse=True)
    intra = np.bincount(dense[u][dense[u] == dense[v]], minlength=dense.max() + 1)
    deg_sum = np.bincount(dense, weights=g.und_degrees.astype(np.float64))
    return float((intra / m - (deg_sum / (2.0 * m)) ** 2).sum())


def load_assignment(path, g: SocialGraph) -> CommunityAssignment:
    """Load `node_id<sep>community_id` lines; comma or whitespace separated.

    Nodes absent from the file become singleton communities (counted in
    singleton_fallbacks).  Unknown node ids are an error.
    """
    mapping = np.full(g.node_count, -1, dtype=np.int64)
    labels: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",") if "," in line else line.split()
            if len(parts) != 2:
                raise ValueError(
                    f"{path}: line {lineno}: expected 'node community', got {line!r}")
            node, com = parts[0].strip(), parts[1].strip()
            if not g.has_node(node):
                raise KeyError(f"{path}: line {lineno}: unknown node id {node!r}")
            cid = labels.setdefault(com, len(labels))
            mapping[g.node_index(node)] = cid
    missing = np.flatnonzero(mapping < 0)
    next_id = len(labels)
    mapping[missing] = np.arange(next_id, next_id + len(missing))
    if len(missing):
        log.info("assigned %d uncovered nodes to singleton communities", len(missing))
    q = modularity(g, mapping)
    return CommunityAssignment(mapping, int(len(np.unique(mapping))), q, g,
                               singleton_fallbacks=int(len(missing)))


def write_assignment(a: CommunityAssignment, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, c in enumerate(a.node_to_community):
            fh.write(f"{a.graph.node_ids[i]},{c}\n")


# ---------------------------------------------------------------------------
# Louvain


def _local_move(adj: list[dict[int, float]], self_w: np.ndarray, m2: float,
                rng: np.random.Generator, max_sweeps: int) -> np.ndarray:
    """Greedy modularity moves until stable or sweep budget exhausted."""
    n = len(adj)
    comm = np.arange(n, dtype=np.int64)
    k = np.array([sum(nbrs.values()) + self_w[i] for i, nbrs in enumerate(adj)])
    sigma_tot = k.astype(np.float64).copy()
    order = rng.permutation(n)
    for _ in range(max_sweeps):
        moved = 0
        for v in order:
            cv = comm[v]
            weights: dict[int, float] = {}
            for u, w in adj[v].items():
                cu = comm[u]
                weights[cu] = weights.get(cu, 0.0) + w
            sigma_tot[cv] -= k[v]
            # gain of joining c (up to constants): w_vc - sigma_tot[c]*k_v/m2
            best_c, best_gain = cv, weights.get(cv, 0.0) - sigma_tot[cv] * k[v] / m2
            for c, w_vc in weights.items():
                gain = w_vc - sigma_tot[c] * k[v] / m2
                if gain > best_gain + 1e-12 or (abs(gain - best_gain) <= 1e-12 and c < best_c):
                    best_c, best_gain = c, gain
            sigma_tot[best_c] += k[v]
            if best_c != cv:
                comm[v] = best_c
                moved += 1
        if moved == 0:
            break
    return comm


def _aggregate(adj: list[dict[int, float]], self_w: np.ndarray, comm: np.ndarray):
    """Collapse communities into super-nodes, keeping intra weight as loops."""
    labels, dense = np.unique(comm, return_inverse=True)
    nc = len(labels)
    new_adj: list[dict[int, float]] = [dict() for _ in range(nc)]
    new_self = np.zeros(nc, dtype=np.float64)
    for i, c in enumerate(dense):
        new_self[c] += self_w[i]
    for v, nbrs in enumerate(adj):
        cv = dense[v]
        for u, w in nbrs.items():
            cu = dense[u]
            if cu == cv:
                new_self[cv] += w  # each intra edge visited from both ends
            else:
                new_adj[cv][cu] = new_adj[cv].get(cu, 0.0) + w
    return new_adj, new_self, dense


def louvain(g: SocialGraph, random_seed: int = 0, starts: int = 10,
            iterations: int = 10) -> CommunityAssignment:
    """Best-modularity Louvain partition over `starts` seeded restarts.

    `iterations` caps the local-move sweeps per aggregation level.
    Deterministic given random_seed; runs on the undirected projection.
    """
    if g.node_count == 0:
        raise ValueError("louvain requires a nonempty graph")
    u, v = _und_edges(g)
    base_adj: list[dict[int, float]] = [dict() for _ in range(g.node_count)]
    for a, b in zip(u, v):
        base_adj[a][b] = base_adj[a].get(b, 0.0) + 1.0
        base_adj[b][a] = base_adj[b].get(a, 0.0) + 1.0
    m2 = 2.0 * max(g.und_edge_count, 1)

    best_mapping = None
    best_q = -np.inf
    for s in range(starts):
        rng = np.random.default_rng([random_seed, s])
        adj = [dict(d) for d in base_adj]
        self_w = np.zeros(len(adj), dtype=np.float64)
        node_to_level = np.arange(g.node_count, dtype=np.int64)
        while True:
            comm = _local_move(adj, self_w, m2, rng, iterations)
            adj2, self2, dense = _aggregate(adj, self_w, comm)
            node_to_level = dense[node_to_level]
            if len(adj2) == len(adj):
                break
            adj, self_w = adj2, self2
        q = modularity(g, node_to_level)
        if q > best_q + 1e-12:
            best_q, best_mapping = q, node_to_level
    # relabel to dense ids in first-node order for stability
    _, first = np.unique(best_mapping, return_index=True)
    order = {best_mapping[i]: rank for rank, i in enumerate(np.sort(first))}
    mapping = np.array([order[c] for c in best_mapping], dtype=np.int64)
    return CommunityAssignment(mapping, len(order), best_q, g)
