import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_layer
from eatsim.embedding import (EmbedConfig, WalkCorpus, embed_layer, generate_walks,
                              initial_vectors, load_embedding, save_embedding,
                              skipgram_loss, train_skipgram)
from eatsim.generators import generate_ba
from eatsim.multiplex import LayerGraph, ValidationError

SMALL = EmbedConfig(dim=8, walks_per_node=4, walk_length=8, window=3, epochs=2, seed=5)


def star(n_leaves=4):
    return LayerGraph.from_edges(n_leaves + 1, [(0, i) for i in range(1, n_leaves + 1)])


def test_star_walk_alternates():
    corpus = generate_walks(star(), SMALL)
    walks = [w.tolist() for w in corpus if w[0] == 1]
    assert walks
    for w in walks:
        assert w[0] == 1
        assert all(x == 0 for x in w[1::2])
        assert all(x in (1, 2, 3, 4) for x in w[2::2])
        assert len(w) == SMALL.walk_length


def test_isolated_node_walk():
    g = LayerGraph.from_edges(3, [(0, 1)])
    walks = [w.tolist() for w in generate_walks(g, SMALL)]
    assert [2] in walks
    assert all(w == [2] for w in walks if w[0] == 2)


def test_walk_order_and_count():
    g = generate_ba(30, 2, 0)
    corpus = generate_walks(g, SMALL)
    assert len(corpus) == SMALL.walks_per_node * 30
    assert [w[0] for w in corpus][:30] == list(range(30))


def test_walks_deterministic():
    g = generate_ba(200, 2, 1)
    a, b = generate_walks(g, SMALL), generate_walks(g, SMALL)
    assert a.nodes.tobytes() == b.nodes.tobytes()
    assert a.offsets.tobytes() == b.offsets.tobytes()


@given(st.integers(2, 25), st.floats(0.05, 0.6), st.floats(0.25, 4), st.floats(0.25, 4),
       st.integers(0, 2**31 - 1))
@settings(max_examples=40, deadline=None)
def test_walk_steps_follow_edges(n, p_edge, p, q, seed):
    g = random_layer(n, p_edge, np.random.default_rng(seed))
    cfg = EmbedConfig(dim=2, walks_per_node=2, walk_length=6, return_p=p, inout_q=q, seed=seed)
    edges = g.edge_set()
    for w in generate_walks(g, cfg):
        w = w.tolist()
        assert len(w) <= cfg.walk_length
        for a, b in zip(w, w[1:]):
            assert (min(a, b), max(a, b)) in edges


def _return_rate(g, p, q):
    cfg = EmbedConfig(dim=2, walks_per_node=20, walk_length=20, return_p=p, inout_q=q, seed=1)
    back = total = 0
    for w in generate_walks(g, cfg):
        for a, c in zip(w, w[2:]):
            back += a == c
            total += 1
    return back / total


def test_return_parameter_biases_backtracking():
    g = generate_ba(200, 3, 0)
    assert _return_rate(g, 0.25, 1.0) > _return_rate(g, 1.0, 1.0) > _return_rate(g, 4.0, 1.0)


def test_weighted_walks_follow_weights():
    g = LayerGraph.from_edges(3, [(0, 1), (0, 2)], weights=[1.0, 3.0])
    cfg = EmbedConfig(dim=2, walks_per_node=4000, walk_length=2, seed=3)
    firsts = [w[1] for w in generate_walks(g, cfg) if w[0] == 0]
    frac = np.mean(np.array(firsts) == 2)
    # binomial sd at n=4000 is ~0.007
    assert abs(frac - 0.75) < 0.03


def test_skipgram_pulls_context_together():
    corpus = WalkCorpus.from_lists([[0, 1]] * 200)
    cfg = EmbedConfig(dim=16, window=1, epochs=5, negative_samples=0, seed=2)
    x = train_skipgram(corpus, 10, cfg).vectors

    def cos(a, b):
        return a @ b / np.linalg.norm(a) / np.linalg.norm(b)

    baseline = np.mean([cos(x[0], x[k]) for k in range(2, 10)])
    # 0 and 1 share the only context signal available
    assert cos(x[0], x[1]) > baseline
    # untouched rows keep their initialisation
    assert np.array_equal(x[2:], initial_vectors(10, cfg)[2:])


def test_zero_epochs_returns_initialisation():
    cfg = EmbedConfig(dim=2, epochs=0, seed=4)
    corpus = WalkCorpus.from_lists([[0, 1, 2]])
    x = train_skipgram(corpus, 3, cfg).vectors
    assert np.array_equal(x, initial_vectors(3, cfg))
    assert np.all(np.abs(x) <= 0.5 / 2)


def test_corpus_ids_validated():
    with pytest.raises(ValidationError):
        train_skipgram(WalkCorpus.from_lists([[0, 5]]), 3, SMALL)


def test_embed_layer_bit_identical():
    g = generate_ba(300, 2, 0)
    a, b = embed_layer(g, SMALL), embed_layer(g, SMALL)
    assert a.vectors.tobytes() == b.vectors.tobytes()
    assert a.config_hash == b.config_hash


def test_equal_graphs_equal_embeddings():
    g = generate_ba(300, 2, 0)
    copy = LayerGraph(g.n_nodes, g.edges[::-1].copy())
    assert embed_layer(g, SMALL).vectors.tobytes() == embed_layer(copy, SMALL).vectors.tobytes()


def test_extra_edge_changes_embedding():
    g = generate_ba(300, 2, 0)
    present = g.edge_set()
    extra = next((0, j) for j in range(1, 300) if (0, j) not in present)
    h = LayerGraph(g.n_nodes, np.vstack([g.edges, extra]))
    assert not np.array_equal(embed_layer(g, SMALL).vectors, embed_layer(h, SMALL).vectors)


def test_empty_layer_stays_initialised():
    g = LayerGraph.from_edges(7, [])
    assert np.array_equal(embed_layer(g, SMALL).vectors, initial_vectors(7, SMALL))


def test_training_lowers_loss():
    g = generate_ba(150, 2, 3)
    cfg = EmbedConfig(dim=16, walks_per_node=5, epochs=3, seed=0)
    corpus = generate_walks(g, cfg)
    emb = train_skipgram(corpus, g.n_nodes, cfg)
    before = skipgram_loss(corpus, initial_vectors(g.n_nodes, cfg), np.zeros_like(emb.vectors), cfg)
    after = skipgram_loss(corpus, emb.vectors, emb.context, cfg)
    assert after <= before


def test_outputs_finite_on_weighted_graph(gen):
    g = random_layer(60, 0.1, gen)
    g = LayerGraph(g.n_nodes, g.edges, gen.random(g.n_edges) * 5 + 0.1)
    assert np.all(np.isfinite(embed_layer(g, SMALL).vectors))


def test_relabelling_changes_embedding(gen):
    # documented behaviour: the metric relies on aligned ids
    g = generate_ba(100, 2, 0)
    h = g.relabel(gen.permutation(100))
    assert not np.array_equal(embed_layer(g, SMALL).vectors, embed_layer(h, SMALL).vectors)


def test_save_load_roundtrip(tmp_path):
    emb = embed_layer(generate_ba(50, 2, 0), SMALL)
    f = tmp_path / "x.emb"
    save_embedding(emb, f)
    back = load_embedding(f)
    assert np.array_equal(back.vectors, emb.vectors)
    assert back.config_hash == emb.config_hash and back.seed == SMALL.seed
    assert f.read_text().splitlines()[0] == f"50 8 5 {emb.config_hash}"


@pytest.mark.parametrize("kw", [dict(dim=1), dict(walk_length=1), dict(window=0),
                                dict(return_p=0), dict(inout_q=-1)])
def test_config_validation(kw):
    with pytest.raises(ValidationError):
        EmbedConfig(**kw)
