"""
Layer reduction by greedy aggregation.

The Von Neumann entropy of a layer is the Shannon entropy (bits) of the
spectrum of ``rho = Lap / trace(Lap)``.  For a grouping ``C`` of the
original layers into ``m`` aggregated layers the distinguishability is

    q(C) = 1 - mean_alpha h(C_alpha) / h(A)

where ``A`` sums all original layers.  ``greedy_reduce`` repeatedly merges
the most similar pair of current layers and records ``q`` after every
merge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .embedding import EmbedConfig, embed_layer
from .multiplex import LayerGraph, MultiplexNetwork, ValidationError
from .similarity import embedding_similarity, jsd_distance

MAX_DENSE_NODES = 5000


def density_matrix(layer: LayerGraph) -> np.ndarray:
    """Dense ``Lap / trace(Lap)`` with weights summed into the Laplacian."""
    if layer.n_edges == 0:
        raise ValidationError("entropy undefined for empty graph")
    if layer.n_nodes > MAX_DENSE_NODES:
        raise ValidationError(
            f"dense spectrum needs N <= {MAX_DENSE_NODES}; got N={layer.n_nodes}. "
            "Split the network or raise eatsim.reducibility.MAX_DENSE_NODES.")
    adj = layer.adjacency().toarray()
    lap = np.diag(adj.sum(axis=1)) - adj
    return lap / np.trace(lap)


def spectral_entropy(eigenvalues, base: float = 2.0) -> float:
    lam = np.clip(np.asarray(eigenvalues, dtype=np.float64), 0.0, None)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)) / math.log(base))


def von_neumann_entropy(layer: LayerGraph) -> float:
    """Entropy in bits of the trace-normalised Laplacian spectrum."""
    return spectral_entropy(np.linalg.eigvalsh(density_matrix(layer)))


def aggregate_layers(layers: Sequence[LayerGraph]) -> LayerGraph:
    """Weighted layer whose adjacency is the sum of the inputs'."""
    if not layers:
        raise ValidationError("nothing to aggregate")
    n = layers[0].n_nodes
    if any(layer.n_nodes != n for layer in layers):
        raise ValidationError("layers must share the node set")
    edges = np.concatenate([layer.edges for layer in layers])
    weights = np.concatenate([layer.edge_weights() for layer in layers])
    return LayerGraph(n, edges, weights)


def aggregate(layers: Sequence[LayerGraph], i: int, j: int) -> LayerGraph:
    if i == j:
        raise ValidationError("cannot aggregate a layer with itself")
    return aggregate_layers([layers[i], layers[j]])


@dataclass
class ReductionState:
    current_layers: list
    membership: dict
    entropies: list
    aggregated_entropy: float

    @property
    def m(self) -> int:
        return len(self.current_layers)

    @property
    def q(self) -> float:
        return distinguishability_q(self)

    @classmethod
    def initial(cls, layers: Sequence[LayerGraph],
                aggregated_entropy: Optional[float] = None) -> "ReductionState":
        layers = list(layers)
        if aggregated_entropy is None:
            aggregated_entropy = von_neumann_entropy(aggregate_layers(layers))
        return cls(layers, {k: k for k in range(len(layers))},
                   [von_neumann_entropy(x) for x in layers], aggregated_entropy)


def distinguishability_q(state: ReductionState) -> float:
    """``1 - mean(h_C) / h_A``."""
    if state.aggregated_entropy <= 0:
        raise ValidationError("aggregate entropy is zero; q undefined")
    mean = math.fsum(state.entropies) / len(state.entropies)
    return 1.0 - mean / state.aggregated_entropy


@dataclass
class ReductionReport:
    layer_names: tuple
    metric: str
    merge_sequence: list
    q_trajectory: list
    aggregated_entropy: float
    optimal_m: int = 0
    optimal_grouping: list = field(default_factory=list)
    groupings: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.q_trajectory and not self.optimal_m:
            n = len(self.layer_names)
            best = max(self.q_trajectory)
            # ties go to the larger layer count, i.e. the earliest index
            k = self.q_trajectory.index(best)
            self.optimal_m = n - k
            if self.groupings:
                self.optimal_grouping = [list(g) for g in self.groupings[k]]

    @property
    def layer_counts(self) -> list:
        n = len(self.layer_names)
        return [n - k for k in range(len(self.q_trajectory))]

    def named_grouping(self, grouping=None) -> list:
        grouping = self.optimal_grouping if grouping is None else grouping
        return [[self.layer_names[i] for i in g] for g in grouping]

    def dendrogram(self) -> str:
        """Parenthesised merge tree; ``:x`` after a subtree is its merge score."""
        nodes = {(i,): name for i, name in enumerate(self.layer_names)}
        for a, b, score in self.merge_sequence:
            merged = tuple(sorted(a + b))
            nodes[merged] = f"({nodes.pop(tuple(a))},{nodes.pop(tuple(b))}):{score:.6f}"
        return ",".join(nodes.values()) + ";"


def _score_pair(metric, emb_a, emb_b, layer_a, layer_b, omega, normalize):
    if metric == "eatsim":
        return embedding_similarity(emb_a, emb_b, omega, normalize).eatsim
    return jsd_distance(layer_a, layer_b)


def greedy_reduce(net: MultiplexNetwork, metric: str = "eatsim",
                  cfg: EmbedConfig = EmbedConfig(), omega: float = 0.5,
                  linkage: str = "recompute", normalize: bool = True) -> ReductionReport:
    """Merge the most similar pair of current layers until one is left.

    ``metric="eatsim"`` merges the pair with the highest similarity,
    ``metric="jsd"`` the pair with the smallest distance.  With
    ``linkage="recompute"`` merged (weighted) layers are re-embedded and
    re-scored; ``linkage="average"`` instead scores groups by the mean of
    the original pairwise scores.  Ties go to the lexicographically first
    pair of current positions.
    """
    if metric not in ("eatsim", "jsd"):
        raise ValidationError(f"unknown metric {metric!r}")
    if linkage not in ("recompute", "average"):
        raise ValidationError(f"unknown linkage {linkage!r}")
    if net.n_layers < 2:
        raise ValidationError("need at least two layers to reduce")
    higher_is_better = metric == "eatsim"

    groups = [(i,) for i in range(net.n_layers)]
    layers = {g: net.layers[g[0]] for g in groups}
    entropies = {g: von_neumann_entropy(layers[g]) for g in groups}
    h_a = von_neumann_entropy(aggregate_layers(net.layers))
    embeddings: dict = {}
    scores: dict = {}

    def embedding(g):
        if metric != "eatsim":
            return None
        if g not in embeddings:
            embeddings[g] = embed_layer(layers[g], cfg, g[0])
        return embeddings[g]

    def score(ga, gb):
        key = (ga, gb) if ga < gb else (gb, ga)
        if key not in scores:
            if linkage == "average" and (len(ga) > 1 or len(gb) > 1):
                vals = [score((a,), (b,)) for a in ga for b in gb]
                scores[key] = math.fsum(vals) / len(vals)
            else:
                scores[key] = _score_pair(metric, embedding(ga), embedding(gb),
                                          layers[ga], layers[gb], omega, normalize)
        return scores[key]

    def q_of(gs):
        return 1.0 - math.fsum(entropies[g] for g in gs) / len(gs) / h_a

    q_traj = [q_of(groups)]
    history = [list(groups)]
    merges = []
    while len(groups) > 1:
        best = None
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                s = score(groups[i], groups[j])
                better = best is None or (s > best[0] if higher_is_better else s < best[0])
                if better:
                    best = (s, i, j)
        s, i, j = best
        ga, gb = groups[i], groups[j]
        merged = tuple(sorted(ga + gb))
        layers[merged] = aggregate_layers([layers[ga], layers[gb]])
        entropies[merged] = von_neumann_entropy(layers[merged])
        groups[i] = merged
        del groups[j]
        merges.append((ga, gb, float(s)))
        q_traj.append(q_of(groups))
        history.append(list(groups))
    return ReductionReport(net.layer_names, metric, merges, q_traj, h_a, groupings=history)


def replay_merges(net: MultiplexNetwork, merge_sequence) -> list:
    """Recompute the q trajectory from a recorded merge order."""
    groups = [(i,) for i in range(net.n_layers)]
    h_a = von_neumann_entropy(aggregate_layers(net.layers))
    layers = {g: net.layers[g[0]] for g in groups}

    def q_of(gs):
        return 1.0 - math.fsum(von_neumann_entropy(layers[g]) for g in gs) / len(gs) / h_a

    out = [q_of(groups)]
    for ga, gb, _ in merge_sequence:
        ga, gb = tuple(ga), tuple(gb)
        merged = tuple(sorted(ga + gb))
        layers[merged] = aggregate_layers([layers[ga], layers[gb]])
        pos = groups.index(ga)
        groups[pos] = merged
        groups.remove(gb)
        out.append(q_of(groups))
    return out


def format_trajectory_csv(report: ReductionReport) -> str:
    rows = ["m,q,merged_pair,similarity"]
    for k, (m, q) in enumerate(zip(report.layer_counts, report.q_trajectory)):
        if k == 0:
            rows.append(f"{m},{q!r},,")
        else:
            a, b, s = report.merge_sequence[k - 1]
            pair = "+".join(report.layer_names[i] for i in a) + "|" + \
                "+".join(report.layer_names[i] for i in b)
            rows.append(f"{m},{q!r},{pair},{s!r}")
    return "\n".join(rows) + "\n"


def format_grouping(report: ReductionReport) -> str:
    lines = [f"# optimal m={report.optimal_m} q={max(report.q_trajectory)!r}"]
    lines += [" ".join(g) for g in report.named_grouping()]
    return "\n".join(lines) + "\n"
