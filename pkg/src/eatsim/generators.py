"""
Synthetic multiplex generators.

* Barabasi-Albert graphs and rewiring ladders built from them, where each
  rewired copy keeps roughly a fraction ``1 - p`` of the original edges.
* A geometric multiplex model: every layer is a popularity-similarity
  (S1) graph, and the hidden angles / hidden degrees of extra layers are
  correlated with those of layer 1 through the angular strength ``g`` and
  the radial strength ``v`` (0 = independent, 1 = identical).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import networkx as nx
import numpy as np
from scipy.stats import norm

from ._rng import derive_seed, rng
from .multiplex import LayerGraph, MultiplexNetwork, ValidationError

DEFAULT_LADDER = tuple(round(0.05 * k, 2) for k in range(1, 20))


@dataclass(frozen=True)
class RewireParams:
    probability: float
    seed: int = 0
    max_retries: int = 100

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise ValidationError("rewiring probability must lie in [0, 1]")


@dataclass(frozen=True)
class GmmParams:
    n_nodes: int
    mean_degree: float = 6.0
    gamma: float = 2.5
    temperature: float = 0.4
    angular_corr: float = 0.0
    radial_corr: float = 0.0
    seed: int = 0
    n_layers: int = 2

    def __post_init__(self):
        if self.n_nodes < 3:
            raise ValidationError("n_nodes must be at least 3")
        if not self.mean_degree > 0:
            raise ValidationError("mean_degree must be positive")
        if not self.gamma > 2:
            raise ValidationError("gamma must exceed 2")
        if not 0 < self.temperature < 1:
            raise ValidationError("temperature must lie in (0, 1)")
        if not 0 <= self.angular_corr <= 1:
            raise ValidationError("angular_corr must lie in [0, 1]")
        if not 0 <= self.radial_corr <= 1:
            raise ValidationError("radial_corr must lie in [0, 1]")
        if self.n_layers < 1:
            raise ValidationError("n_layers must be at least 1")

    def as_dict(self):
        return asdict(self)


# ---------------------------------------------------------------------------
# BA and rewiring


def generate_ba(n: int, m_attach: int = 2, seed: int = 0) -> LayerGraph:
    """Preferential-attachment graph with ``m_attach`` edges per new node."""
    if m_attach < 1 or n <= m_attach:
        raise ValidationError("need n > m_attach >= 1")
    g = nx.barabasi_albert_graph(n, m_attach, seed=derive_seed(seed, "ba"))
    return LayerGraph.from_networkx(g, n_nodes=n)


def rewire(graph: LayerGraph, params: RewireParams) -> LayerGraph:
    """Endpoint-replacement rewiring.

    Each edge, independently with probability ``p``, has one uniformly
    chosen endpoint swapped for a uniformly random node.  Self-loops and
    duplicates are re-drawn up to ``max_retries`` times; on exhaustion the
    edge is left as it was.  The edge count is preserved.
    """
    n = graph.n_nodes
    p = params.probability
    gen = rng(params.seed, "rewire")
    edges = graph.edges.tolist()
    present = {u * n + v for u, v in edges}
    flips = gen.random(len(edges)) < p
    for k in np.flatnonzero(flips).tolist():
        u, v = edges[k]
        keep = u if gen.random() < 0.5 else v
        for _ in range(params.max_retries):
            w = int(gen.integers(n))
            if w == keep:
                continue
            a, b = (keep, w) if keep < w else (w, keep)
            if a * n + b in present:
                continue
            present.discard(u * n + v)
            present.add(a * n + b)
            edges[k] = [a, b]
            break
    return LayerGraph(n, np.array(edges, dtype=np.int64).reshape(-1, 2), graph.weights)


def edge_overlap(a: LayerGraph, b: LayerGraph) -> float:
    """Shared edges over the mean edge count (Dice coefficient)."""
    total = a.n_edges + b.n_edges
    if total == 0:
        return 1.0
    n = max(a.n_nodes, b.n_nodes)
    ka = a.edges[:, 0] * n + a.edges[:, 1]
    kb = b.edges[:, 0] * n + b.edges[:, 1]
    return 2.0 * np.intersect1d(ka, kb).size / total


def rewiring_ladder(n: int = 1000, m_attach: int = 2,
                    probabilities: Sequence[float] = DEFAULT_LADDER,
                    seed: int = 0) -> MultiplexNetwork:
    """Original BA layer followed by one independent rewiring per ``p``."""
    base = generate_ba(n, m_attach, seed)
    layers = [base]
    names = ["p=0.00"]
    for p in probabilities:
        layers.append(rewire(base, RewireParams(p, derive_seed(seed, "ladder", f"{p:.6f}"))))
        names.append(f"p={p:.2f}")
    return MultiplexNetwork(n, tuple(layers), tuple(names))


# ---------------------------------------------------------------------------
# Geometric multiplex model


def _pareto_mean(lo, hi, gamma):
    a, b = 1.0 - gamma, 2.0 - gamma
    return (a / b) * (hi ** b - lo ** b) / (hi ** a - lo ** a)


def kappa_min_for_mean(mean_degree: float, gamma: float, kappa_max: float,
                       rtol: float = 1e-6) -> float:
    """Lower bound of a Pareto(gamma) on ``[kmin, kappa_max]`` with the given mean."""
    if mean_degree >= kappa_max:
        raise ValidationError("mean degree too large for the network size")
    lo, hi = 1e-9, mean_degree
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _pareto_mean(mid, kappa_max, gamma) < mean_degree:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sample_hidden_degrees(n, mean_degree, gamma, gen) -> np.ndarray:
    kmax = float(n - 1)
    kmin = kappa_min_for_mean(mean_degree, gamma, kmax)
    a = 1.0 - gamma
    u = gen.random(n)
    return (kmin ** a - u * (kmin ** a - kmax ** a)) ** (1.0 / a)


def _ranks(x):
    r = np.empty(x.size, dtype=np.int64)
    r[np.argsort(x, kind="stable")] = np.arange(x.size)
    return r


def mix_ranks(ranks: np.ndarray, radial_corr: float, gen) -> np.ndarray:
    """New rank permutation correlated with ``ranks``.

    Gaussian copula: ranks are mapped to normal scores ``z``, mixed as
    ``v z + sqrt(1 - v^2) eps`` with fresh noise and re-ranked.  ``v = 1``
    gives the identity and ``v = 0`` an independent uniform permutation.
    """
    n = ranks.size
    eps = gen.standard_normal(n)
    if radial_corr >= 1.0:
        return ranks.copy()
    z = norm.ppf((ranks + 0.5) / n)
    return _ranks(radial_corr * z + math.sqrt(1.0 - radial_corr ** 2) * eps)


def _s1_edges(theta, kappa, mean_degree, temperature, gen, block=256):
    n = theta.size
    mu = math.sin(temperature * math.pi) / (2.0 * mean_degree * temperature * math.pi)
    radius = n / (2.0 * math.pi)
    inv_t = 1.0 / temperature
    out = []
    for start in range(0, n - 1, block):
        rows = np.arange(start, min(start + block, n - 1))
        cols = np.arange(n)
        dtheta = np.abs(theta[rows, None] - theta[None, :])
        dtheta = np.pi - np.abs(np.pi - dtheta)
        chi = radius * dtheta / (mu * kappa[rows, None] * kappa[None, :])
        prob = 1.0 / (1.0 + chi ** inv_t)
        draw = gen.random(prob.shape)
        hit = (draw < prob) & (cols[None, :] > rows[:, None])
        i, j = np.nonzero(hit)
        out.append(np.column_stack([rows[i], j]))
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


def hidden_coordinates(params: GmmParams):
    """Hidden ``(theta, kappa)`` arrays for every layer."""
    n = params.n_nodes
    gen = rng(params.seed, "gmm", "layer1-hidden")
    kappa1 = sample_hidden_degrees(n, params.mean_degree, params.gamma, gen)
    theta1 = gen.random(n) * 2.0 * np.pi
    coords = [(theta1, kappa1)]
    sorted_kappa = np.sort(kappa1)
    ranks1 = _ranks(kappa1)
    sigma = np.pi * (1.0 - params.angular_corr)
    for layer in range(2, params.n_layers + 1):
        g2 = rng(params.seed, "gmm", f"layer{layer}-hidden")
        theta = np.mod(theta1 + sigma * g2.standard_normal(n), 2.0 * np.pi)
        kappa = sorted_kappa[mix_ranks(ranks1, params.radial_corr, g2)]
        coords.append((theta, kappa))
    return coords


def generate_gmm(params: GmmParams) -> MultiplexNetwork:
    """Geometric multiplex with correlated hidden coordinates.

    Layer ``l`` links ``i, j`` with probability
    ``1 / (1 + (d_ij / (mu k_i k_j)) ** (1/T))`` where ``d_ij`` is the arc
    distance scaled to ``N / 2pi`` and ``mu`` fixes the mean degree.
    """
    layers = []
    for layer, (theta, kappa) in enumerate(hidden_coordinates(params), start=1):
        gen = rng(params.seed, "gmm", f"layer{layer}-edges")
        edges = _s1_edges(theta, kappa, params.mean_degree, params.temperature, gen)
        layers.append(LayerGraph(params.n_nodes, edges))
    names = tuple(f"layer{i}" for i in range(1, params.n_layers + 1))
    return MultiplexNetwork(params.n_nodes, tuple(layers), names)


# ---------------------------------------------------------------------------
# diagnostics


def powerlaw_exponent_mle(degrees, k_min: int = 5) -> float:
    """Discrete power-law exponent, continuous approximation of the MLE."""
    k = np.asarray(degrees, dtype=float)
    k = k[k >= k_min]
    if k.size < 2:
        raise ValidationError("too few samples above k_min")
    return 1.0 + k.size / np.sum(np.log(k / (k_min - 0.5)))


def format_metadata(items: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in items.items())


def parse_metadata(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out
