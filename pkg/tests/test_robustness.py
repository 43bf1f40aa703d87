import networkx as nx
import numpy as np
import pytest

from conftest import random_layer
from eatsim.generators import GmmParams, generate_gmm
from eatsim.multiplex import LayerGraph, MultiplexNetwork, ValidationError
from eatsim.robustness import (AttackParams, AttackTrace, attack_priority, delta_n,
                               format_report_csv, format_trace_csv, omega_score,
                               omega_value, reshuffle_mapping, targeted_attack)
from oracles import brute_force_attack


def duplex(layer):
    return MultiplexNetwork(layer.n_nodes, (layer, layer))


def star(n):
    return LayerGraph.from_edges(n, [(0, i) for i in range(1, n)])


def cycle(n):
    return LayerGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_priority_picks_max_degree():
    l1 = LayerGraph.from_edges(8, [(3, i) for i in (0, 1, 2, 4, 5)] + [(6, 7)])
    l2 = LayerGraph.from_edges(8, [(3, 0), (3, 1), (4, 5), (4, 6), (4, 7), (0, 1)])
    assert attack_priority(MultiplexNetwork(8, (l1, l2)), np.arange(8)) == 3


def test_priority_tie_goes_to_smallest_id():
    c = cycle(6)
    assert attack_priority(duplex(c), np.arange(6)) == 0
    assert attack_priority(duplex(c), [2, 3, 4, 5]) == 3


def test_priority_uses_induced_degrees():
    g = LayerGraph.from_edges(6, [(0, 1), (0, 2), (0, 3), (4, 5), (4, 1)])
    net = duplex(g)
    assert attack_priority(net, np.arange(6)) == 0
    # with 0 gone, 4 keeps degree 2 while 1 drops to 1
    assert attack_priority(net, [1, 2, 3, 4, 5]) == 4


def test_identical_stars_collapse_in_one_step():
    trace = targeted_attack(duplex(star(10)))
    assert trace.removals == [0]
    assert trace.gmcc_sizes == [1]
    assert delta_n(trace) == 1


def test_cycles_match_brute_force():
    c = cycle(100)
    trace = targeted_attack(duplex(c))
    m0, removals, sizes = brute_force_attack(100, [c.edge_set(), c.edge_set()])
    assert trace.initial_gmcc == m0
    assert trace.removals == removals
    assert trace.gmcc_sizes == sizes


@pytest.mark.parametrize("seed", range(6))
def test_random_duplex_matches_brute_force(seed):
    gen = np.random.default_rng(seed)
    net = MultiplexNetwork(40, (random_layer(40, 0.12, gen), random_layer(40, 0.12, gen)))
    e = [l.edge_set() for l in net.layers]
    if max(len(c) for c in nx.connected_components(nx.Graph(list(e[0])))) < 4:
        pytest.skip("degenerate draw")
    try:
        trace = targeted_attack(net)
    except ValidationError:
        pytest.skip("initial GMCC below 4")
    m0, removals, sizes = brute_force_attack(40, e)
    assert (trace.initial_gmcc, trace.removals, trace.gmcc_sizes) == (m0, removals, sizes)


def single_layer_attack(g, beta=0.5):
    # degree attack on one graph, LCC recomputed with networkx
    h = nx.Graph()
    h.add_nodes_from(range(g.n_nodes))
    h.add_edges_from(map(tuple, g.edges.tolist()))

    def lcc():
        comps = sorted(nx.connected_components(h), key=lambda c: (-len(c), min(c)))
        return len(comps[0]) if comps else 0

    m0 = lcc()
    removals, sizes = [], []
    while (size := (sizes[-1] if sizes else m0)) >= m0 ** beta:
        node = min(h.nodes, key=lambda i: (-h.degree(i), i))
        h.remove_node(node)
        removals.append(node)
        sizes.append(lcc())
    return removals, sizes


def test_identical_layers_reduce_to_single_layer_attack():
    g = generate_gmm(GmmParams(300, seed=4))[0]
    trace = targeted_attack(duplex(g))
    assert (trace.removals, trace.gmcc_sizes) == single_layer_attack(g)


def test_trace_invariants():
    net = generate_gmm(GmmParams(500, angular_corr=0.5, radial_corr=0.5, seed=1))
    t = targeted_attack(net)
    assert len(t.removals) == len(t.gmcc_sizes) == len(set(t.removals))
    assert all(a >= b for a, b in zip(t.sizes_from_start(), t.sizes_from_start()[1:]))
    low = t.initial_gmcc ** 0.5
    assert t.gmcc_sizes[-1] < low
    assert all(s >= low for s in t.gmcc_sizes[:-1])


def test_gmcc_only_attack_hits_members():
    net = generate_gmm(GmmParams(400, seed=2))
    t = targeted_attack(net, AttackParams(gmcc_only=True))
    assert t.gmcc_sizes[-1] < t.initial_gmcc ** 0.5


def test_small_gmcc_rejected():
    with pytest.raises(ValidationError):
        targeted_attack(duplex(LayerGraph.from_edges(5, [(0, 1), (1, 2)])))
    with pytest.raises(ValidationError):
        targeted_attack(MultiplexNetwork(10, (star(10),)))


def test_delta_n_examples():
    assert delta_n(AttackTrace([1, 2, 3, 4, 5], [90, 70, 45, 38, 9], 100)) == 2
    assert delta_n(AttackTrace([1], [5], 100)) == 1
    # never above alpha*M after the start: t1 = 0
    assert delta_n(AttackTrace([1, 2, 3], [30, 20, 5], 100)) == 3
    with pytest.raises(ValidationError):
        delta_n(AttackTrace([1, 2], [90, 50], 100))


def test_omega_arithmetic():
    assert omega_value(30, 10) == 0.5
    assert omega_value(10, 10) == 0
    assert omega_value(0, 5) == -1
    with pytest.raises(ValidationError, match="degenerate trace"):
        omega_value(0, 0)


def test_reshuffle_preserves_layers():
    net = generate_gmm(GmmParams(300, angular_corr=1, radial_corr=1, seed=0))
    rs = reshuffle_mapping(net, 3)
    assert rs[0] == net[0]
    assert sorted(rs[1].degrees().tolist()) == sorted(net[1].degrees().tolist())
    assert rs[1].n_edges == net[1].n_edges
    assert rs[1] != net[1]
    assert reshuffle_mapping(net, 3)[1] == rs[1]
    assert reshuffle_mapping(net, 4)[1] != rs[1]


@pytest.mark.slow
def test_reshuffle_kills_degree_correlation():
    r = []
    for s in range(10):
        net = generate_gmm(GmmParams(2000, angular_corr=1, radial_corr=1, seed=s))
        rs = reshuffle_mapping(net, s)
        r.append(np.corrcoef(rs[0].degrees(), rs[1].degrees())[0, 1])
    assert abs(np.mean(r)) < 0.1


@pytest.mark.slow
def test_omega_near_zero_for_uncorrelated_layers():
    om = [omega_score(generate_gmm(GmmParams(2000, seed=s)), AttackParams(seed=s)).omega
          for s in range(10)]
    assert abs(np.mean(om)) < 0.15


def test_omega_range_and_determinism():
    net = generate_gmm(GmmParams(500, angular_corr=1, radial_corr=1, seed=3))
    a = omega_score(net, AttackParams(reshuffle_count=4, seed=1))
    b = omega_score(net, AttackParams(reshuffle_count=4, seed=1), n_jobs=2)
    assert -1 <= a.omega <= 1
    assert a.omega == b.omega and a.reshuffled_delta_n == b.reshuffled_delta_n
    assert a.delta_n_rs == np.mean(a.reshuffled_delta_n)
    csv = format_report_csv(a).splitlines()
    assert csv[0] == "kind,replica,delta_n,omega" and len(csv) == 2 + 4 + 1
    assert format_trace_csv(a.trace).splitlines()[1] == f"0,,{a.trace.initial_gmcc}"


def _has_ties(net, trace):
    alive = np.ones(net.n_nodes, dtype=bool)
    for node in trace.removals:
        k = np.maximum(*[np.bincount(l.edges[alive[l.edges].all(1)].ravel(), minlength=net.n_nodes)
                         for l in net.layers])
        k = np.where(alive, k, -1)
        if np.sum(k == k.max()) > 1:
            return True
        alive[node] = False
    return False


def test_relabel_invariance():
    net = generate_gmm(GmmParams(400, angular_corr=1, radial_corr=1, seed=5))
    ref = targeted_attack(net)
    base = delta_n(ref)
    exact = not _has_ties(net, ref)
    moved_dn = []
    for s in range(10):
        perm = np.random.default_rng(s).permutation(400)
        moved = MultiplexNetwork(400, tuple(l.relabel(perm) for l in net.layers))
        t = targeted_attack(moved)
        if exact:
            assert t.removals == [int(perm[i]) for i in ref.removals]
        moved_dn.append(delta_n(t))
    assert abs(np.mean(moved_dn) - base) < 0.05 * base


@pytest.mark.slow
def test_delta_n_grows_with_size():
    means = []
    for n in (1000, 2000, 4000):
        means.append(np.mean([delta_n(targeted_attack(generate_gmm(
            GmmParams(n, angular_corr=1, radial_corr=1, seed=s)))) for s in range(3)]))
    assert means[0] < means[2] and means[0] <= means[1] <= means[2]
