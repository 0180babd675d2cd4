"""Early-stage feature vectors for the two feature-based predictors.

Method A: community distribution features of adopters, frontiers and
non-adopters, pairwise shared-community counts, and the mean adoption
time.  Method B: neighborhood sizes, path-length features (step
distances, diameter), the same community block, and step-time features.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade import EarlyStage, FrontierSplit, SurfaceSet
from .community import CommunityAssignment
from .graph import SocialGraph

COMMUNITY_FEATURE_NAMES = (
    "n_adopter_communities", "adopter_community_entropy", "adopter_community_gini",
    "n_frontier_communities", "frontier_community_entropy", "frontier_community_gini",
    "n_nonadopter_communities", "nonadopter_community_entropy", "nonadopter_community_gini",
    "shared_communities_adopter_frontier",
    "shared_communities_adopter_nonadopter",
    "shared_communities_frontier_nonadopter",
)

FEATURES_A_NAMES = COMMUNITY_FEATURE_NAMES + ("mean_adoption_time",)

FEATURES_B_NAMES = (
    "first_surface_size", "second_surface_size",
    "mean_step_distance", "cv_step_distance", "cascade_diameter",
) + COMMUNITY_FEATURE_NAMES + ("mean_step_time", "cv_step_time")


@dataclass
class FeatureVector:
    cascade_id: str
    method: str                 # "A" or "B"
    values: np.ndarray
    names: tuple[str, ...]


def community_features(nodes_idx: np.ndarray,
                       assignment: CommunityAssignment) -> tuple[int, float, float]:
    """(community count, entropy, gini) of a node set's community histogram.

    Entropy uses natural log; an empty set maps to (0, 0, 0).
    """
    nodes_idx = np.asarray(nodes_idx, dtype=np.int64)
    if len(nodes_idx) == 0:
        return 0, 0.0, 0.0
    _, counts = np.unique(assignment.communities_of(nodes_idx), return_counts=True)
    p = counts / counts.sum()
    entropy = float(-(p * np.log(p)).sum())
    gini = float(1.0 - (p * p).sum())
    return int(len(counts)), entropy, gini


def shared_communities(a: np.ndarray, b: np.ndarray,
                       assignment: CommunityAssignment) -> int:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return 0
    ca = np.unique(assignment.communities_of(a))
    cb = np.unique(assignment.communities_of(b))
    return int(len(np.intersect1d(ca, cb, assume_unique=True)))


def _cv(values: np.ndarray) -> float:
    """Population std over mean; 0 for empty samples or zero mean."""
    if len(values) == 0:
        return 0.0
    mean = float(np.mean(values))
    if mean == 0.0:
        return 0.0
    return float(np.std(values) / mean)


def und_distance_capped(g: SocialGraph, src: int, dst: int, cap: int) -> int:
    """Shortest undirected path length, or cap+1 when longer or unreachable.

    Bidirectional level-by-level BFS; exact for distances <= cap.
    """
    if src == dst:
        return 0
    indptr, indices = g._und_csr()
    dist_a = {src: 0}
    dist_b = {dst: 0}
    frontier_a, frontier_b = [src], [dst]
    depth_a = depth_b = 0
    best = cap + 1
    while frontier_a and frontier_b and depth_a + depth_b < min(best, cap + 1):
        if len(frontier_a) <= len(frontier_b):
            frontier, dist_here, dist_other = frontier_a, dist_a, dist_b
            depth_a += 1
            depth = depth_a
        else:
            frontier, dist_here, dist_other = frontier_b, dist_b, dist_a
            depth_b += 1
            depth = depth_b
        nxt = []
        for v in frontier:
            for u in indices[indptr[v]:indptr[v + 1]]:
                u = int(u)
                if u in dist_here:
                    continue
                dist_here[u] = depth
                other = dist_other.get(u)
                if other is not None and depth + other < best:
                    best = depth + other
                nxt.append(u)
        if frontier is frontier_a:
            frontier_a = nxt
        else:
            frontier_b = nxt
    return best if best <= cap else cap + 1


def step_distances(es: EarlyStage, g: SocialGraph, cap: int = 5) -> list[int]:
    """Undirected distance between each pair of consecutive adopters.

    Distances beyond cap, unreachable pairs and adopters missing from
    the graph all yield the cap+1 sentinel.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    out = []
    for a, b in zip(es.nodes[:-1], es.nodes[1:]):
        if not (g.has_node(a) and g.has_node(b)):
            out.append(cap + 1)
            continue
        out.append(und_distance_capped(g, g.node_index(a), g.node_index(b), cap))
    return out


def cascade_diameter(es: EarlyStage, g: SocialGraph) -> int:
    """Longest finite shortest path within the adopter-induced subgraph;
    0 when the induced subgraph has no edges."""
    members = [g.node_index(n) for n in es.nodes if g.has_node(n)]
    if not members:
        return 0
    pos = {v: i for i, v in enumerate(members)}
    adj: list[list[int]] = [[] for _ in members]
    for v, i in pos.items():
        for u in g.und_neighbors_idx(v):
            j = pos.get(int(u))
            if j is not None:
                adj[i].append(j)
    diameter = 0
    for start in range(len(members)):
        dist = {start: 0}
        frontier = [start]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for i in frontier:
                for j in adj[i]:
                    if j not in dist:
                        dist[j] = d
                        nxt.append(j)
            frontier = nxt
        if dist:
            diameter = max(diameter, max(dist.values()))
    return diameter


def _community_block(s: SurfaceSet, fs: FrontierSplit,
                     assignment: CommunityAssignment) -> list[float]:
    values: list[float] = []
    for group in (s.adopters, fs.frontiers, fs.non_adopters):
        values.extend(community_features(group, assignment))
    values.append(shared_communities(s.adopters, fs.frontiers, assignment))
    values.append(shared_communities(s.adopters, fs.non_adopters, assignment))
    values.append(shared_communities(fs.frontiers, fs.non_adopters, assignment))
    return values


def features_A(es: EarlyStage, s: SurfaceSet, fs: FrontierSplit,
               assignment: CommunityAssignment) -> FeatureVector:
    values = _community_block(s, fs, assignment)
    values.append(float(np.mean(es.times)))
    return FeatureVector(es.cascade_id, "A", np.asarray(values, dtype=np.float64),
                         FEATURES_A_NAMES)


def features_B(es: EarlyStage, s: SurfaceSet, fs: FrontierSplit,
               assignment: CommunityAssignment, g: SocialGraph,
               cap: int = 5) -> FeatureVector:
    dists = np.asarray(step_distances(es, g, cap), dtype=np.float64)
    gaps = np.diff(es.times)
    values = [
        float(len(s.f1_nodes)),
        float(len(s.f2_nodes)),
        float(np.mean(dists)) if len(dists) else 0.0,
        _cv(dists),
        float(cascade_diameter(es, g)),
    ]
    values.extend(_community_block(s, fs, assignment))
    values.append(float(np.mean(gaps)) if len(gaps) else 0.0)
    values.append(_cv(gaps))
    return FeatureVector(es.cascade_id, "B", np.asarray(values, dtype=np.float64),
                         FEATURES_B_NAMES)
