"""PageRank and CheiRank by power iteration.

The damped transition operator alpha*S + (1-alpha)/N acts without ever
materializing an N x N matrix: real links live in a sparse matrix and
dangling columns are folded into a per-application scalar.  CheiRank is,
by definition, the PageRank of the link-reversed graph and is computed
exactly that way.  A dense direct solver is provided as a test oracle
for small instances.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import DirectedGraph

__all__ = [
    "DEFAULT_ALPHA",
    "DEFAULT_TOL",
    "DEFAULT_MAX_ITER",
    "RankVector",
    "TwoDRanking",
    "StochasticOperator",
    "rank_order",
    "pagerank",
    "cheirank",
    "dense_google_matrix",
    "dense_solve_oracle",
]

DEFAULT_ALPHA = 0.85
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1000

# Below this many links the threaded matvec is pure dispatch overhead.
_PARALLEL_MIN_LINKS = 200_000


def rank_order(probabilities) -> np.ndarray:
    """1-based rank of every node: descending probability, ties broken by
    ascending node id.  Entry ``i-1`` is the rank position of node ``i``."""
    p = np.asarray(probabilities, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probabilities must be a non-empty vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError("probabilities must be finite and nonnegative")
    by_rank = np.argsort(-p, kind="stable")
    index = np.empty(p.size, dtype=np.int64)
    index[by_rank] = np.arange(1, p.size + 1)
    return index


@dataclass(frozen=True, eq=False)
class RankVector:
    """A probability per node plus the rank permutation derived from it.

    ``order[r-1]`` is the node id holding rank ``r``; ``index[i-1]`` is
    the rank of node ``i``.  Probabilities are non-increasing along
    ``order``.  ``converged`` is False when the iteration stopped at
    ``max_iter`` with the residual still above tolerance.
    """

    probabilities: np.ndarray
    order: np.ndarray
    index: np.ndarray
    iterations_used: int = 0
    residual: float = 0.0
    converged: bool = True

    def __post_init__(self):
        p = np.ascontiguousarray(self.probabilities, dtype=np.float64)
        order = np.ascontiguousarray(self.order, dtype=np.int64)
        index = np.ascontiguousarray(self.index, dtype=np.int64)
        if not (p.size == order.size == index.size) or p.size == 0:
            raise ValueError("rank vector arrays must be non-empty and equal length")
        for arr in (p, order, index):
            arr.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "index", index)

    @property
    def node_count(self) -> int:
        return int(self.probabilities.size)

    @classmethod
    def from_probabilities(
        cls,
        probabilities,
        *,
        normalize: bool = False,
        iterations_used: int = 0,
        residual: float = 0.0,
        converged: bool = True,
    ) -> "RankVector":
        p = np.asarray(probabilities, dtype=np.float64)
        if normalize:
            total = p.sum()
            if total <= 0:
                raise ValueError("cannot normalize a zero probability vector")
            p = p / total
        index = rank_order(p)
        order = np.empty(p.size, dtype=np.int64)
        order[index - 1] = np.arange(1, p.size + 1)
        return cls(
            p,
            order,
            index,
            iterations_used=iterations_used,
            residual=residual,
            converged=converged,
        )

    def probability_by_rank(self) -> np.ndarray:
        """Probabilities reordered by rank position (non-increasing)."""
        return self.probabilities[self.order - 1]


@dataclass(frozen=True, eq=False)
class TwoDRanking:
    """Paired PageRank/CheiRank view of one node set."""

    pagerank: RankVector
    cheirank: RankVector

    def __post_init__(self):
        if self.pagerank.node_count != self.cheirank.node_count:
            raise ValueError("paired rank vectors must cover the same node set")

    @property
    def node_count(self) -> int:
        return self.pagerank.node_count

    @property
    def K(self) -> np.ndarray:
        """PageRank index per node."""
        return self.pagerank.index

    @property
    def Kstar(self) -> np.ndarray:
        """CheiRank index per node."""
        return self.cheirank.index

    @classmethod
    def compute(
        cls,
        g: DirectedGraph,
        alpha: float = DEFAULT_ALPHA,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
        threads: int = 1,
    ) -> "TwoDRanking":
        return cls(
            pagerank(g, alpha=alpha, tol=tol, max_iter=max_iter, threads=threads),
            cheirank(g, alpha=alpha, tol=tol, max_iter=max_iter, threads=threads),
        )

    @classmethod
    def from_probabilities(cls, p, pstar) -> "TwoDRanking":
        return cls(
            RankVector.from_probabilities(p, normalize=True),
            RankVector.from_probabilities(pstar, normalize=True),
        )


def _block_dot(matrix, v, out, lo, hi):
    out[lo:hi] = matrix.dot(v)


class StochasticOperator:
    """Sparse action of the damped operator alpha*S + (1-alpha)/N.

    Columns of real links are normalized by out-degree (out-strength in
    weighted mode); dangling columns stay implicit and contribute their
    probability mass uniformly at application time, keeping memory at
    O(links + N).  The row-blocked threaded path computes each row with
    the same per-row summation order as the serial path, so results are
    bit-identical for every thread count.
    """

    def __init__(self, graph: DirectedGraph, alpha: float = DEFAULT_ALPHA, threads: int = 1):
        if not 0.0 < alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if threads < 1:
            raise ValueError("threads must be >= 1")
        self.graph = graph
        self.alpha = float(alpha)
        self.threads = int(threads)
        n = graph.node_count
        strength = (
            graph.out_strength if graph.weighted else graph.out_degree.astype(np.float64)
        )
        self.dangling = np.flatnonzero(strength == 0.0)
        if graph.link_count:
            data = self.alpha * graph.weight / strength[graph.src - 1]
            self.matrix = sp.csr_matrix(
                (data, (graph.dst - 1, graph.src - 1)), shape=(n, n)
            )
        else:
            self.matrix = sp.csr_matrix((n, n), dtype=np.float64)
        self._blocks = None
        if self.threads > 1 and self.matrix.nnz >= _PARALLEL_MIN_LINKS:
            cuts = np.searchsorted(
                self.matrix.indptr, np.linspace(0, self.matrix.nnz, self.threads + 1)
            )
            cuts = np.unique(np.clip(cuts, 0, n))
            if cuts[0] != 0:
                cuts = np.concatenate(([0], cuts))
            if cuts[-1] != n:
                cuts = np.concatenate((cuts, [n]))
            if len(cuts) > 2:
                self._blocks = [
                    (int(lo), int(hi), self.matrix[int(lo):int(hi)])
                    for lo, hi in zip(cuts[:-1], cuts[1:])
                ]

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def apply(self, v, pool: ThreadPoolExecutor | None = None) -> np.ndarray:
        """One application of the operator to a probability vector.

        Output = alpha*S_link v + [alpha * (mass on dangling nodes)
        + (1 - alpha)] / N, which preserves the total probability."""
        v = np.asarray(v, dtype=np.float64)
        n = self.node_count
        if v.shape != (n,):
            raise ValueError("vector length does not match node count")
        if pool is not None and self._blocks is not None:
            out = np.empty(n, dtype=np.float64)
            futures = [
                pool.submit(_block_dot, blk, v, out, lo, hi)
                for lo, hi, blk in self._blocks
            ]
            for f in futures:
                f.result()
        else:
            out = self.matrix.dot(v)
        dangling_mass = float(v[self.dangling].sum()) if self.dangling.size else 0.0
        out += (self.alpha * dangling_mass + (1.0 - self.alpha)) / n
        return out


def pagerank(
    g: DirectedGraph,
    alpha: float = DEFAULT_ALPHA,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    threads: int = 1,
) -> RankVector:
    """Stationary probability of the damped operator by power iteration.

    Starts from the uniform vector and iterates until the L1 change per
    step drops below ``tol`` or ``max_iter`` is reached; in the latter
    case the result carries ``converged=False`` rather than raising.
    Deterministic for any ``threads`` value.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    op = StochasticOperator(g, alpha=alpha, threads=threads)
    n = g.node_count
    v = np.full(n, 1.0 / n)
    residual = float("inf")
    iterations = 0
    pool = ThreadPoolExecutor(threads) if op._blocks is not None else None
    try:
        for iterations in range(1, max_iter + 1):
            nxt = op.apply(v, pool)
            residual = float(np.abs(nxt - v).sum())
            v = nxt
            if residual < tol:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return RankVector.from_probabilities(
        v,
        iterations_used=iterations,
        residual=residual,
        converged=residual < tol,
    )


def cheirank(
    g: DirectedGraph,
    alpha: float = DEFAULT_ALPHA,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    threads: int = 1,
) -> RankVector:
    """PageRank of the link-reversed graph (identical by definition)."""
    return pagerank(g.reverse(), alpha=alpha, tol=tol, max_iter=max_iter, threads=threads)


_DENSE_LIMIT = 2000


def _dense_stochastic(g: DirectedGraph) -> np.ndarray:
    n = g.node_count
    if n > _DENSE_LIMIT:
        raise ValueError(f"dense path refuses graphs larger than {_DENSE_LIMIT} nodes")
    S = np.zeros((n, n))
    if g.link_count:
        np.add.at(S, (g.dst - 1, g.src - 1), g.weight)
    strength = g.out_strength if g.weighted else g.out_degree.astype(np.float64)
    filled = strength > 0
    S[:, filled] /= strength[filled]
    S[:, ~filled] = 1.0 / n
    return S

def dense_google_matrix(g: DirectedGraph, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Full damped matrix for small graphs; element (i-1, j-1) is the
    transition weight from node j to node i.  Test and rendering oracle."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    n = g.node_count
    return alpha * _dense_stochastic(g) + (1.0 - alpha) / n


def dense_solve_oracle(g: DirectedGraph, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Exact stationary probabilities by a dense direct solve.

    Solves (I - alpha*S) p = (1-alpha)/N and renormalizes; S carries the
    dangling columns explicitly as uniform.  Only intended for tests on
    instances up to a few thousand nodes.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    n = g.node_count
    S = _dense_stochastic(g)
    p = np.linalg.solve(np.eye(n) - alpha * S, np.full(n, (1.0 - alpha) / n))
    return p / p.sum()
