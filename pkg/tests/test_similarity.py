import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_layer
from eatsim.embedding import EmbedConfig
from eatsim.generators import generate_ba
from eatsim.multiplex import LayerGraph, MultiplexNetwork, ValidationError
from eatsim.similarity import (NumericError, aed_loss, eatsim, eatsim_values, euclidean_distance,
                               jsd_distance, ped_loss, procrustes_align, rms_normalize,
                               similarity_matrix)
from oracles import dense_entropy_bits, random_orthogonal

SMALL = EmbedConfig(dim=8, walks_per_node=4, walk_length=8, window=3, epochs=2, seed=1)


def ped_oracle(a, b):
    n = len(a)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            da = math.sqrt(sum((x - y) ** 2 for x, y in zip(a[i], a[j])))
            db = math.sqrt(sum((x - y) ** 2 for x, y in zip(b[i], b[j])))
            total += abs(da - db)
    return 2 * total / (n * (n - 1))


def test_euclidean_examples(gen):
    assert euclidean_distance([1, 2], [1, 2]) == 0
    assert euclidean_distance([0, 0], [3, 4]) == 5
    x, y = gen.standard_normal(7), gen.standard_normal(7)
    assert abs(euclidean_distance(x, y) - math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))) < 1e-12
    with pytest.raises(ValidationError):
        euclidean_distance([0, 0], [0, 0, 0])


def test_ped_examples(gen):
    x = gen.standard_normal((10, 3))
    assert ped_loss(x, x) == 0
    assert ped_loss([[0], [1]], [[0], [3]]) == 2
    perm = np.array([1, 0] + list(range(2, 10)))
    assert ped_loss(x, x[perm]) > 0
    with pytest.raises(ValidationError):
        ped_loss(x, x[:, :2])


@pytest.mark.parametrize("n,block", [(7, 3), (23, 5), (40, 512)])
def test_ped_matches_double_loop(gen, n, block):
    a, b = gen.standard_normal((n, 4)), gen.standard_normal((n, 4))
    assert abs(ped_loss(a, b, block=block) - ped_oracle(a.tolist(), b.tolist())) < 1e-12


def test_ped_independent_of_block_size(gen):
    a, b = gen.standard_normal((300, 6)), gen.standard_normal((300, 6))
    vals = {ped_loss(a, b, block=k) for k in (1, 7, 64, 299, 1000)}
    assert max(vals) - min(vals) < 1e-12


def test_ped_sampling_estimator(gen):
    a, b = gen.standard_normal((400, 5)), gen.standard_normal((400, 5))
    exact = ped_loss(a, b)
    assert abs(ped_loss(a, b, n_samples=200_000, seed=3) - exact) < 0.01


def test_procrustes_recovers_rotation(gen):
    x = gen.standard_normal((30, 5))
    q = random_orthogonal(5, gen)
    res = procrustes_align(x, x @ q)
    assert res.residual <= 1e-8 * np.linalg.norm(x @ q)
    assert np.allclose(res.rotation, q, atol=1e-6)
    assert np.allclose(res.rotation.T @ res.rotation, np.eye(5), atol=1e-8)


def test_procrustes_identity(gen):
    x = gen.standard_normal((30, 4)) * np.array([4.0, 3.0, 2.0, 1.0])
    assert np.allclose(procrustes_align(x, x).rotation, np.eye(4), atol=1e-6)


def test_procrustes_beats_random_search(gen):
    xa, xb = gen.standard_normal((20, 4)), gen.standard_normal((20, 4))
    res = procrustes_align(xa, xb)
    for _ in range(100):
        w = random_orthogonal(4, gen)
        assert res.residual <= np.linalg.norm(xa @ w - xb) + 1e-12


def test_procrustes_rejects_nonfinite():
    x = np.ones((3, 2))
    y = x.copy()
    y[0, 0] = np.nan
    with pytest.raises(NumericError):
        procrustes_align(x, y)


def test_aed_examples(gen):
    x = gen.standard_normal((25, 4))
    assert aed_loss(x, x) < 1e-9
    assert aed_loss(x @ random_orthogonal(4, gen), x) <= 1e-8
    assert abs(aed_loss(np.eye(2), 2 * np.eye(2)) - 1.0) < 1e-12


def test_aed_2d_grid_oracle():
    # enumerate every 2x2 orthogonal map on a fine grid: rotations and reflections
    a = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, -0.3]])
    b = np.array([[0.2, 1.1], [-0.9, 0.1], [0.4, 0.6]])
    best = np.inf
    for t in np.linspace(0, 2 * np.pi, 20001):
        c, s = math.cos(t), math.sin(t)
        for w in (np.array([[c, -s], [s, c]]), np.array([[c, s], [s, -c]])):
            best = min(best, np.linalg.norm(a @ w - b))
    assert procrustes_align(a, b).residual <= best + 1e-12
    assert procrustes_align(a, b).residual >= best - 1e-6


def test_aed_partial_anchors(gen):
    x = gen.standard_normal((20, 3))
    y = x.copy()
    y[10:] = gen.standard_normal((10, 3))
    assert aed_loss(x, y, anchors=np.arange(10)) < 1e-9
    assert aed_loss(x, y) > 0.1


matrices = arrays(np.float64, (12, 3), elements=st.floats(-5, 5, allow_nan=False))


@given(matrices, matrices, st.integers(0, 2**31 - 1))
@settings(max_examples=60, deadline=None)
def test_loss_invariances(a, b, seed):
    gen = np.random.default_rng(seed)
    q = random_orthogonal(3, gen)
    shift = gen.standard_normal(3)
    base_ped, base_aed = ped_loss(a, b), aed_loss(a, b)
    assert abs(ped_loss(a @ q + shift, b) - base_ped) < 1e-8
    assert abs(ped_loss(a, b @ q - shift) - base_ped) < 1e-8
    assert abs(aed_loss(a @ q, b) - base_aed) < 1e-8
    assert abs(ped_loss(b, a) - base_ped) < 1e-8
    assert abs(aed_loss(b, a) - base_aed) < 1e-8


def test_rms_normalize(gen):
    x = gen.standard_normal((50, 4)) * 7
    y = rms_normalize(x)
    assert abs(np.sqrt(np.mean(np.sum(y ** 2, axis=1))) - 1) < 1e-12


def test_eatsim_identity_and_omega(gen):
    g = random_layer(60, 0.08, gen)
    h = random_layer(60, 0.08, gen)
    assert abs(eatsim(g, g, SMALL).eatsim - 1) < 1e-9
    r0, r1, rh = eatsim(g, h, SMALL, 0.0), eatsim(g, h, SMALL, 1.0), eatsim(g, h, SMALL, 0.5)
    assert r0.dissimilarity == r0.aed
    assert r1.dissimilarity == r1.ped
    assert rh.eatsim == 1 - rh.dissimilarity
    assert min(rh.ped, rh.aed) <= rh.dissimilarity <= max(rh.ped, rh.aed)
    with pytest.raises(ValidationError):
        eatsim(g, h, SMALL, 1.5)


def test_eatsim_symmetric(gen):
    g, h = random_layer(50, 0.1, gen), random_layer(50, 0.1, gen)
    a, b = eatsim(g, h, SMALL), eatsim(h, g, SMALL)
    assert abs(a.ped - b.ped) < 1e-12 and abs(a.aed - b.aed) < 1e-8


def test_similarity_matrix_identical_layers():
    g = generate_ba(80, 2, 0)
    vals = eatsim_values(similarity_matrix(MultiplexNetwork(80, (g, g)), SMALL))
    assert np.allclose(vals, 1.0, atol=1e-9)


def test_similarity_matrix_symmetric(gen):
    net = MultiplexNetwork(40, tuple(random_layer(40, 0.12, gen) for _ in range(4)))
    m = similarity_matrix(net, SMALL)
    vals = eatsim_values(m)
    assert np.allclose(vals, vals.T, atol=1e-9)
    assert np.allclose(np.diag(vals), 1.0)
    assert m[1, 2].layer_pair == (1, 2) and m[2, 1].layer_pair == (2, 1)


# --- JSD ------------------------------------------------------------------


def k3():
    return LayerGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def p3():
    return LayerGraph.from_edges(3, [(0, 1), (1, 2)])


def test_jsd_identity_and_symmetry(gen):
    g, h = random_layer(20, 0.3, gen), random_layer(20, 0.3, gen)
    assert jsd_distance(g, g) == 0
    assert abs(jsd_distance(g, h) - jsd_distance(h, g)) < 1e-12
    assert 0 < jsd_distance(g, h) <= 1


def test_jsd_k3_vs_path_matches_oracle():
    # mixture of the two density operators: adjacency weights 1/6 * K3 + 1/4 * P3
    h_k3 = dense_entropy_bits(3, [(0, 1), (1, 2), (0, 2)])
    h_p3 = dense_entropy_bits(3, [(0, 1), (1, 2)])
    lap_k3 = np.array([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]) / 6
    lap_p3 = np.array([[1, -1, 0], [-1, 2, -1], [0, -1, 1]]) / 4
    lam = np.linalg.eigvalsh((lap_k3 + lap_p3) / 2)
    h_mix = -sum(x * math.log2(x) for x in lam if x > 1e-15)
    want = math.sqrt((h_mix - (h_k3 + h_p3) / 2) / math.log2(3))
    got = jsd_distance(k3(), p3())
    assert got > 0
    assert abs(got - want) < 1e-12


def test_jsd_rejects_empty():
    with pytest.raises(ValidationError):
        jsd_distance(k3(), LayerGraph.from_edges(3, []))
