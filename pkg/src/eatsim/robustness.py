"""
Targeted attacks on two-layer multiplexes.

Nodes are removed one at a time in order of ``K_i = max(k_i^(1), k_i^(2))``
with degrees taken on the subgraphs induced by the surviving nodes and
re-evaluated after every removal.  The attack stops once the GMCC drops
below ``M ** beta``.  ``delta_n`` counts the removals needed to take the
GMCC from above ``alpha * M`` to below ``M ** beta``; ``omega_score``
compares it with the same quantity on interlayer-reshuffled copies.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._rng import derive_seed, rng
from .multiplex import (MultiplexNetwork, MutualComponentTracker, ValidationError,
                        as_node_mask)


@dataclass(frozen=True)
class AttackParams:
    alpha: float = 0.4
    beta: float = 0.5
    reshuffle_count: int = 10
    seed: int = 0
    gmcc_only: bool = False

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValidationError("alpha must lie in (0, 1)")
        if not 0 < self.beta <= 1:
            raise ValidationError("beta must lie in (0, 1]")
        if self.reshuffle_count < 1:
            raise ValidationError("reshuffle_count must be at least 1")


@dataclass
class AttackTrace:
    removals: list
    gmcc_sizes: list
    initial_gmcc: int

    def sizes_from_start(self) -> list:
        """GMCC size per step, step 0 being the intact network."""
        return [self.initial_gmcc] + list(self.gmcc_sizes)


@dataclass
class RobustnessResult:
    delta_n: int
    delta_n_rs: float
    omega: float
    trace: AttackTrace
    reshuffled_traces: list = field(default_factory=list)
    reshuffled_delta_n: list = field(default_factory=list)


def _require_two_layers(net):
    if net.n_layers != 2:
        raise ValidationError("robustness analysis needs exactly two layers")


def _induced_degrees(net, alive):
    out = []
    for layer in net.layers:
        u, v = layer.edges[:, 0], layer.edges[:, 1]
        keep = alive[u] & alive[v]
        out.append(np.bincount(np.concatenate([u[keep], v[keep]]), minlength=net.n_nodes))
    return out


def attack_priority(net: MultiplexNetwork, surviving) -> int:
    """Surviving node with the largest ``max`` degree over both layers.

    Degrees are counted inside the surviving set; ties go to the smallest id.
    """
    alive = as_node_mask(net.n_nodes, surviving)
    if not alive.any():
        raise ValidationError("no surviving nodes")
    k = np.maximum.reduce(_induced_degrees(net, alive))
    k = np.where(alive, k, -1)
    return int(np.argmax(k))


def targeted_attack(net: MultiplexNetwork, params: AttackParams = AttackParams()) -> AttackTrace:
    """Remove max-K nodes until the GMCC is smaller than ``M ** beta``.

    With ``params.gmcc_only`` the candidates are restricted to current GMCC
    members; by default any surviving node can be hit.
    """
    _require_two_layers(net)
    n = net.n_nodes
    tracker = MutualComponentTracker(net)
    m0 = tracker.largest_size
    if m0 < 4:
        raise ValidationError(f"initial GMCC of size {m0} is too small (need >= 4)")
    threshold = m0 ** params.beta
    alive = tracker.alive
    deg = _induced_degrees(net, alive)
    csrs = [layer.csr for layer in net.layers]
    removals, sizes = [], []
    size = m0
    while size >= threshold and alive.any():
        k = np.maximum(deg[0], deg[1])
        if params.gmcc_only:
            cand = np.zeros(n, dtype=bool)
            cand[tracker.largest()] = True
        else:
            cand = alive
        target = int(np.argmax(np.where(cand, k, -1)))
        for d, (indptr, indices, _) in zip(deg, csrs):
            nb = indices[indptr[target]:indptr[target + 1]]
            d[nb[alive[nb]]] -= 1
            d[target] = 0
        tracker.remove(target)
        size = tracker.largest_size
        removals.append(target)
        sizes.append(size)
    return AttackTrace(removals, sizes, m0)


def delta_n(trace: AttackTrace, alpha: float = 0.4, beta: float = 0.5) -> int:
    """Removals between the last step above ``alpha M`` and the first below ``M ** beta``."""
    sizes = trace.sizes_from_start()
    m0 = trace.initial_gmcc
    low = m0 ** beta
    below = [t for t, s in enumerate(sizes) if s < low]
    if not below:
        raise ValidationError("trace never fell below M**beta; attack not terminated")
    t2 = below[0]
    above = [t for t, s in enumerate(sizes[:t2]) if s > alpha * m0]
    t1 = above[-1] if above else 0
    return t2 - t1


def reshuffle_mapping(net: MultiplexNetwork, seed: int = 0) -> MultiplexNetwork:
    """Relabel layer 2 with a uniform random permutation; layer 1 is untouched."""
    _require_two_layers(net)
    perm = rng(seed, "reshuffle").permutation(net.n_nodes)
    layers = (net.layers[0], net.layers[1].relabel(perm))
    return MultiplexNetwork(net.n_nodes, layers, net.layer_names, net.node_labels)


def omega_value(dn: float, dn_rs: float) -> float:
    total = dn + dn_rs
    if total <= 0:
        raise ValidationError("degenerate trace: delta_n + delta_n_rs == 0")
    return (dn - dn_rs) / total


def omega_score(net: MultiplexNetwork, params: AttackParams = AttackParams(),
                n_jobs: int = 1) -> RobustnessResult:
    """Relative robustness against ``reshuffle_count`` reshuffled copies."""
    _require_two_layers(net)
    trace = targeted_attack(net, params)
    dn = delta_n(trace, params.alpha, params.beta)

    def replica(r):
        shuffled = reshuffle_mapping(net, derive_seed(params.seed, "replica", r))
        t = targeted_attack(shuffled, params)
        return t, delta_n(t, params.alpha, params.beta)

    reps = range(params.reshuffle_count)
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            results = list(pool.map(replica, reps))
    else:
        results = [replica(r) for r in reps]
    rs_dn = [d for _, d in results]
    dn_rs = math.fsum(rs_dn) / len(rs_dn)
    return RobustnessResult(dn, dn_rs, omega_value(dn, dn_rs), trace,
                            [t for t, _ in results], rs_dn)


def format_report_csv(result: RobustnessResult) -> str:
    rows = ["kind,replica,delta_n,omega"]
    rows.append(f"original,,{result.delta_n},{result.omega!r}")
    for r, d in enumerate(result.reshuffled_delta_n):
        rows.append(f"reshuffled,{r},{d},")
    rows.append(f"reshuffled_mean,,{result.delta_n_rs!r},")
    return "\n".join(rows) + "\n"


def format_trace_csv(trace: AttackTrace) -> str:
    rows = ["step,removed,gmcc_size", f"0,,{trace.initial_gmcc}"]
    rows += [f"{k},{node},{size}"
             for k, (node, size) in enumerate(zip(trace.removals, trace.gmcc_sizes), 1)]
    return "\n".join(rows) + "\n"
