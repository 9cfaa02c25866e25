"""Selective link inversion for manipulation-resistant CheiRank.

A link pointing at a much more popular node than its source is cheap to
plant and inflates the source's standing under plain reversal.  The
filters here invert only links that pass a popularity threshold, either
on PageRank probabilities (eta * P(src) > P(dst)) or directly on rank
indexes (K(src) < eta_k * K(dst)); the PageRank of the selectively
inverted graph is then the filtered CheiRank.  An analytic model of the
inverted-link fraction under a homogeneous link-density assumption is
included, together with a matching synthetic link ensemble.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import DirectedGraph
from .ranking import (
    DEFAULT_ALPHA,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    RankVector,
    pagerank,
)

__all__ = [
    "FilterConfig",
    "FilterResult",
    "analytic_fraction",
    "filter_links_by_prob",
    "filter_links_by_rank",
    "filtered_cheirank",
    "measure_fraction_curve",
    "synth_rank_ensemble",
]

MODES = ("probability", "rank")


@dataclass(frozen=True)
class FilterConfig:
    """Inversion-filter settings plus the iteration parameters used for
    the two PageRank computations around it.

    ``eta_inf`` realizes the all-links-inverted limit explicitly, since
    with teleportation every probability is positive and no finite eta
    reaches it in probability mode.
    """

    mode: str = "probability"
    eta: float = 0.0
    eta_inf: bool = False
    alpha: float = DEFAULT_ALPHA
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.eta_inf and (not math.isfinite(self.eta) or self.eta < 0):
            raise ValueError("eta must be finite and >= 0 (or use eta_inf)")


@dataclass(frozen=True, eq=False)
class FilterResult:
    """Outcome of one filtering pass.

    The filtered graph has the same node count and exactly the same link
    count as the input: every link is either kept or reversed, never
    dropped or duplicated.  ``fraction`` is inverted_count / link_count
    (0 for an empty graph).  ``cheirank`` is populated only by
    :func:`filtered_cheirank`.
    """

    graph: DirectedGraph
    inverted_count: int
    fraction: float
    cheirank: RankVector | None = None


def _inversion_mask(
    g: DirectedGraph, values: np.ndarray, eta: float, eta_inf: bool, mode: str
) -> np.ndarray:
    """Boolean per-link mask of inversions.  Strict inequalities: ties
    keep the original direction, so eta=0 inverts nothing."""
    if mode == "probability":
        if eta_inf:
            return values[g.src - 1] > 0.0
        return eta * values[g.src - 1] > values[g.dst - 1]
    if eta_inf:
        return np.ones(g.link_count, dtype=bool)
    return values[g.src - 1] < eta * values[g.dst - 1]


def _apply_mask(g: DirectedGraph, mask: np.ndarray) -> FilterResult:
    inverted = int(np.count_nonzero(mask))
    src = np.where(mask, g.dst, g.src)
    dst = np.where(mask, g.src, g.dst)
    filtered = DirectedGraph.from_links(
        g.node_count, src, dst, g.weight, weighted=g.weighted, collapse=False
    )
    fraction = inverted / g.link_count if g.link_count else 0.0
    return FilterResult(filtered, inverted, fraction)


def filter_links_by_prob(
    g: DirectedGraph, p: RankVector, eta: float, eta_inf: bool = False
) -> FilterResult:
    """Reverse each link src->dst with eta * P(src) > P(dst), keep the rest.

    ``p`` must be the PageRank of ``g``.  eta=0 inverts nothing;
    ``eta_inf`` inverts every link whose source has positive probability
    (all of them under teleportation).  A numeric infinite eta is treated
    as ``eta_inf``.
    """
    if p.node_count != g.node_count:
        raise ValueError("rank vector does not match the graph")
    if not eta_inf and math.isinf(eta):
        eta, eta_inf = 0.0, True
    if not eta_inf and eta < 0:
        raise ValueError("eta must be >= 0")
    mask = _inversion_mask(g, p.probabilities, eta, eta_inf, "probability")
    return _apply_mask(g, mask)


def filter_links_by_rank(
    g: DirectedGraph, k_index, eta_k: float, eta_inf: bool = False
) -> FilterResult:
    """Reverse each link src->dst with K(src) < eta_k * K(dst).

    ``k_index`` is the 1-based rank per node.  eta_k=0 inverts nothing
    (no rank is below zero); eta_k large enough that eta_k * K exceeds N
    everywhere inverts all links.
    """
    k = np.asarray(k_index, dtype=np.float64)
    if k.shape != (g.node_count,):
        raise ValueError("rank index does not match the graph")
    if not eta_inf and math.isinf(eta_k):
        eta_k, eta_inf = 0.0, True
    if not eta_inf and eta_k < 0:
        raise ValueError("eta_k must be >= 0")
    mask = _inversion_mask(g, k, eta_k, eta_inf, "rank")
    return _apply_mask(g, mask)


def filtered_cheirank(
    g: DirectedGraph, config: FilterConfig, threads: int = 1
) -> FilterResult:
    """Filtered CheiRank of ``g``: rank, invert selectively, rank again.

    Computes the PageRank of the unfiltered graph, applies the configured
    filter to it once, then computes the PageRank of the filtered graph.
    The filter already performed the reversal of the selected links, so
    no further global reversal happens: at eta=0 the result is the plain
    PageRank and at eta=inf the ordinary CheiRank.
    """
    p = pagerank(
        g, alpha=config.alpha, tol=config.tol, max_iter=config.max_iter, threads=threads
    )
    if config.mode == "probability":
        result = filter_links_by_prob(g, p, config.eta, config.eta_inf)
    else:
        result = filter_links_by_rank(g, p.index, config.eta, config.eta_inf)
    chei = pagerank(
        result.graph,
        alpha=config.alpha,
        tol=config.tol,
        max_iter=config.max_iter,
        threads=threads,
    )
    return FilterResult(result.graph, result.inverted_count, result.fraction, chei)


def analytic_fraction(eta_k: float, a: float, nu: float) -> float:
    """Model fraction of inverted links under the rank filter.

    Assumes links spread homogeneously along the source-rank axis while
    the destination rank K' is restricted to K' <= a*N with density
    decaying as 1/K'^nu.  Valid for 0 < a <= 1 and 0 <= nu < 1:

        f = (1-nu)/(2-nu) * a*eta_k                     for eta_k <= 1/a
        f = 1 + ((1-nu)/(2-nu) - 1) * (a*eta_k)^(nu-1)  for eta_k >  1/a

    Continuous at the knee eta_k = 1/a; at a=1, nu=0 the first branch is
    the triangle area eta_k/2.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError("a must be in (0, 1]")
    if not 0.0 <= nu < 1.0:
        raise ValueError("nu must be in [0, 1)")
    if eta_k < 0:
        raise ValueError("eta_k must be >= 0")
    c = (1.0 - nu) / (2.0 - nu)
    x = a * eta_k
    if x <= 1.0:
        return c * x
    return 1.0 + (c - 1.0) * x ** (nu - 1.0)


def measure_fraction_curve(
    g: DirectedGraph,
    etas,
    mode: str = "probability",
    ranking: RankVector | None = None,
    alpha: float = DEFAULT_ALPHA,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    threads: int = 1,
) -> np.ndarray:
    """Measured inverted-link fraction at each filter value.

    ``etas`` must be ascending (np.inf allowed as the last entries); the
    returned fractions are then non-decreasing because the inversion set
    only grows with the threshold.  ``ranking`` skips the internal
    PageRank computation when supplied.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    etas = np.asarray(etas, dtype=np.float64)
    if etas.ndim != 1 or etas.size == 0:
        raise ValueError("etas must be a non-empty vector")
    if np.any(np.diff(etas) < 0):
        raise ValueError("etas must be sorted ascending")
    if ranking is None:
        ranking = pagerank(g, alpha=alpha, tol=tol, max_iter=max_iter, threads=threads)
    values = ranking.probabilities if mode == "probability" else ranking.index.astype(np.float64)
    out = np.empty(etas.size)
    for i, eta in enumerate(etas):
        inf = math.isinf(eta)
        mask = _inversion_mask(g, values, 0.0 if inf else float(eta), inf, mode)
        out[i] = mask.mean() if g.link_count else 0.0
    return out


def synth_rank_ensemble(
    node_count: int, links: int, a: float, nu: float, seed: int
) -> DirectedGraph:
    """Random link ensemble matching the :func:`analytic_fraction` model.

    Node ids double as rank positions (feed the identity permutation to
    the rank filter).  Sources are uniform over 1..N; destinations are
    restricted to 1..round(a*N) with density proportional to 1/K'^nu via
    inverse-CDF sampling.  Parallel links are kept so each sampled pair
    counts once in the measured fraction.
    """
    if node_count < 2:
        raise ValueError("node_count must be at least 2")
    if links < 1:
        raise ValueError("links must be positive")
    if not 0.0 < a <= 1.0:
        raise ValueError("a must be in (0, 1]")
    if not 0.0 <= nu < 1.0:
        raise ValueError("nu must be in [0, 1)")
    rng = np.random.default_rng(seed)
    k_max = max(1, int(round(a * node_count)))
    src = rng.integers(1, node_count + 1, size=links)
    u = rng.random(links)
    dst = np.ceil(k_max * u ** (1.0 / (1.0 - nu))).astype(np.int64)
    dst = np.clip(dst, 1, k_max)
    return DirectedGraph.from_links(node_count, src, dst, weighted=False, collapse=False)
