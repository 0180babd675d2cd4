"""Root-node centrality measures: out-degree, k-shell, eigenvector, PageRank.

k-shell and eigenvector centrality are computed on the undirected
projection; out-degree and PageRank follow arc direction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import SocialGraph

MEASURES = ("out_degree", "k_shell", "eigenvector", "pagerank")


class ConvergenceError(RuntimeError):
    """Iterative solver failed to converge; carries the final residual."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


@dataclass
class CentralityTable:
    measure: str
    values: np.ndarray          # indexed by internal node index
    graph: SocialGraph = field(repr=False)
    iterations: int = 0
    residual: float = 0.0

    def value(self, node_id: str) -> float:
        return float(self.values[self.graph.node_index(node_id)])


def _und_matrix(g: SocialGraph) -> sp.csr_matrix:
    indptr, indices = g._und_csr()
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=(g.node_count, g.node_count))


def out_degree_table(g: SocialGraph) -> CentralityTable:
    return CentralityTable("out_degree", g.out_degrees.astype(np.float64), g)


def k_shell(g: SocialGraph) -> CentralityTable:
    """Core number per node via iterative minimum-degree pruning.

    Linear-time bin-sort peeling on the undirected projection.
    """
    if g.node_count == 0:
        raise ValueError("k_shell requires a nonempty graph")
    indptr, indices = g._und_csr()
    degree = np.diff(indptr).astype(np.int64)
    n = g.node_count
    order = np.argsort(degree, kind="stable")
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(n)
    max_deg = int(degree.max()) if n else 0
    # bin_start[d] = first position in `order` holding a node of degree d
    counts = np.bincount(degree, minlength=max_deg + 2)
    bin_start = np.zeros(max_deg + 2, dtype=np.int64)
    np.cumsum(counts[:-1], out=bin_start[1:])
    core = degree.copy()
    for pos in range(n):
        v = order[pos]
        for u in indices[indptr[v]:indptr[v + 1]]:
            if core[u] > core[v]:
                # swap u toward the front of its degree bin, then shrink it
                du = core[u]
                pu, pw = position[u], bin_start[du]
                w = order[pw]
                if u != w:
                    order[pu], order[pw] = w, u
                    position[u], position[w] = pw, pu
                bin_start[du] += 1
                core[u] -= 1
    return CentralityTable("k_shell", core.astype(np.float64), g)


def eigenvector_centrality(g: SocialGraph, tol: float = 1e-8,
                           max_iter: int = 1000) -> CentralityTable:
    """Dominant-eigenvector centrality of the undirected projection.

    Power iteration on A + I (the shift guarantees convergence on
    bipartite graphs without changing eigenvectors), L2-normalized,
    stopping when successive iterates differ by less than tol in L2.
    """
    if g.und_edge_count == 0:
        raise ValueError("eigenvector centrality requires at least one edge")
    a = _und_matrix(g)
    n = g.node_count
    x = np.full(n, 1.0 / np.sqrt(n))
    delta = np.inf
    for it in range(1, max_iter + 1):
        y = a @ x + x
        y /= np.linalg.norm(y)
        delta = float(np.linalg.norm(y - x))
        x = y
        if delta < tol:
            lam = float(x @ (a @ x))
            resid = float(np.linalg.norm(a @ x - lam * x))
            return CentralityTable("eigenvector", x, g, iterations=it, residual=resid)
    raise ConvergenceError("eigenvector centrality did not converge", delta, max_iter)


def pagerank(g: SocialGraph, damping: float = 0.85, tol: float = 1e-10,
             max_iter: int = 1000) -> CentralityTable:
    """PageRank along arc direction with dangling-mass redistribution."""
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must be in (0, 1), got {damping}")
    n = g.node_count
    if n == 0:
        raise ValueError("pagerank requires a nonempty graph")
    out_deg = g.out_degrees.astype(np.float64)
    dangling = out_deg == 0
    inv_deg = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, out_deg))
    # transpose of the row-stochastic transition matrix, for x_new = P^T x
    data = np.repeat(inv_deg, np.diff(g.out_indptr))
    pt = sp.csr_matrix((data, g.out_indices, g.out_indptr), shape=(n, n)).T.tocsr()
    x = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    delta = np.inf
    for it in range(1, max_iter + 1):
        x_new = damping * (pt @ x) + damping * x[dangling].sum() / n + teleport
        delta = float(np.abs(x_new - x).sum())
        x = x_new
        if delta < tol:
            return CentralityTable("pagerank", x, g, iterations=it, residual=delta)
    raise ConvergenceError("pagerank did not converge", delta, max_iter)


def compute(g: SocialGraph, measure: str, **kwargs) -> CentralityTable:
    if measure == "out_degree":
        return out_degree_table(g)
    if measure == "k_shell":
        return k_shell(g)
    if measure == "eigenvector":
        return eigenvector_centrality(g, **kwargs)
    if measure == "pagerank":
        return pagerank(g, **kwargs)
    raise ValueError(f"unknown centrality measure {measure!r}")


def root_centrality_feature(cascade, table: CentralityTable) -> float:
    """Centrality value of a cascade's first adopter.

    Raises KeyError when the root never appears in the graph; callers
    drop such cascades from the corpus and log the count.
    """
    if cascade.final_size == 0:
        raise ValueError(f"cascade {cascade.id} has no events")
    return table.value(cascade.root)
