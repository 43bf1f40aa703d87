"""
Deterministic node2vec-style embeddings.

Walks are second-order (``p``, ``q``) random walks; every walk owns a
counter-based random stream keyed by ``(seed, start_node, walk_index)``, so
the corpus is a pure function of the edge set and the config.  Training is
skip-gram with negative sampling, run sequentially so repeated runs are
bit-identical.  Equal graphs therefore give equal embeddings, which is what
makes the similarity losses vanish on identical layers.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numba
import numpy as np

from ._rng import derive_seed
from .multiplex import LayerGraph, ValidationError, atomic_write_text

_U = numba.uint64
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@dataclass(frozen=True)
class EmbedConfig:
    dim: int = 32
    walks_per_node: int = 10
    walk_length: int = 10
    window: int = 10
    return_p: float = 1.0
    inout_q: float = 1.0
    negative_samples: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise ValidationError("dim must be >= 2")
        if self.walk_length < 2:
            raise ValidationError("walk_length must be >= 2")
        if self.window < 1:
            raise ValidationError("window must be >= 1")
        if not (self.return_p > 0 and self.inout_q > 0):
            raise ValidationError("p and q must be positive")
        if self.walks_per_node < 1 or self.negative_samples < 0 or self.epochs < 0:
            raise ValidationError("walks_per_node >= 1, negative_samples >= 0, epochs >= 0")
        if not self.initial_lr > 0:
            raise ValidationError("initial_lr must be positive")

    def with_seed(self, seed: int) -> "EmbedConfig":
        return replace(self, seed=int(seed))

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class WalkCorpus:
    """Walks stored flat: walk ``k`` is ``nodes[offsets[k]:offsets[k + 1]]``."""

    nodes: np.ndarray
    offsets: np.ndarray

    @classmethod
    def from_lists(cls, walks) -> "WalkCorpus":
        walks = [list(w) for w in walks]
        offsets = np.zeros(len(walks) + 1, dtype=np.int64)
        np.cumsum([len(w) for w in walks], out=offsets[1:])
        flat = np.fromiter((x for w in walks for x in w), dtype=np.int64, count=int(offsets[-1]))
        return cls(flat, offsets)

    def __len__(self):
        return self.offsets.size - 1

    def __getitem__(self, k) -> np.ndarray:
        return self.nodes[self.offsets[k]:self.offsets[k + 1]]

    def __iter__(self):
        for k in range(len(self)):
            yield self[k]

    def as_lists(self) -> list:
        return [w.tolist() for w in self]


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    vectors: np.ndarray
    layer_id: int = 0
    config_hash: str = ""
    seed: int = 0
    context: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        if v.ndim != 2:
            raise ValidationError("embedding must be a 2-D matrix")
        if not np.all(np.isfinite(v)):
            raise ValidationError("embedding contains NaN or Inf")
        object.__setattr__(self, "vectors", v)

    @property
    def shape(self):
        return self.vectors.shape

    def __array__(self, dtype=None, copy=None):
        return self.vectors if dtype is None else self.vectors.astype(dtype)


def config_hash(layer: LayerGraph, cfg: EmbedConfig) -> str:
    h = hashlib.sha256(repr(sorted(cfg.as_dict().items())).encode())
    h.update(np.int64(layer.n_nodes).tobytes())
    h.update(np.ascontiguousarray(layer.edges, dtype=np.int64).tobytes())
    if layer.weights is not None:
        h.update(np.ascontiguousarray(layer.weights, dtype=np.float64).tobytes())
    return h.hexdigest()[:16]


# ---------------------------------------------------------------------------
# numba kernels


@numba.njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@numba.njit(cache=True, inline="always")
def _next(state):
    state = state + _GOLDEN
    return state, (_mix(state) >> _S11) * _INV53


@numba.njit(cache=True)
def _stream(seed, a, b):
    s = _mix(_U(seed) + _GOLDEN)
    s = _mix(s ^ (_U(a) * _M1 + _GOLDEN))
    return _mix(s ^ (_U(b) * _M2 + _GOLDEN))


@numba.njit(cache=True)
def _pick(state, v, indptr, indices, cumw, weighted):
    lo, hi = indptr[v], indptr[v + 1]
    state, u = _next(state)
    if not weighted:
        k = lo + int(u * (hi - lo))
        if k >= hi:
            k = hi - 1
        return state, indices[k]
    base = cumw[lo - 1] if lo > 0 else 0.0
    target = base + u * (cumw[hi - 1] - base)
    a, b = lo, hi - 1
    while a < b:
        m = (a + b) // 2
        if cumw[m] <= target:
            a = m + 1
        else:
            b = m
    return state, indices[a]


@numba.njit(cache=True)
def _adjacent(indptr, indices, a, b):
    lo, hi = indptr[a], indptr[a + 1] - 1
    while lo <= hi:
        m = (lo + hi) // 2
        x = indices[m]
        if x == b:
            return True
        if x < b:
            lo = m + 1
        else:
            hi = m - 1
    return False


@numba.njit(cache=True)
def _walks_kernel(indptr, indices, cumw, weighted, n, walks_per_node, walk_length,
                  p, q, seed):
    n_walks = walks_per_node * n
    out = np.empty(n_walks * walk_length, dtype=np.int64)
    offsets = np.zeros(n_walks + 1, dtype=np.int64)
    biased = p != 1.0 or q != 1.0
    upper = max(1.0 / p, 1.0, 1.0 / q)
    pos = 0
    k = 0
    for r in range(walks_per_node):
        for start in range(n):
            state = _stream(seed, start, r)
            out[pos] = start
            pos += 1
            if indptr[start + 1] > indptr[start]:
                prev = -1
                cur = start
                for _ in range(walk_length - 1):
                    if indptr[cur + 1] == indptr[cur]:
                        break
                    if prev < 0 or not biased:
                        state, nxt = _pick(state, cur, indptr, indices, cumw, weighted)
                    else:
                        while True:
                            state, nxt = _pick(state, cur, indptr, indices, cumw, weighted)
                            if nxt == prev:
                                alpha = 1.0 / p
                            elif _adjacent(indptr, indices, prev, nxt):
                                alpha = 1.0
                            else:
                                alpha = 1.0 / q
                            state, u = _next(state)
                            if u * upper < alpha:
                                break
                    out[pos] = nxt
                    pos += 1
                    prev = cur
                    cur = nxt
            k += 1
            offsets[k] = pos
    return out[:pos], offsets


@numba.njit(cache=True)
def _alias_table(probs):
    n = probs.size
    scaled = probs * n
    prob = np.zeros(n)
    alias = np.zeros(n, dtype=np.int64)
    small = np.empty(n, dtype=np.int64)
    large = np.empty(n, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(n):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        nl -= 1
        g = large[nl]
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = scaled[g] + scaled[s] - 1.0
        if scaled[g] < 1.0:
            small[ns] = g
            ns += 1
        else:
            large[nl] = g
            nl += 1
    while nl > 0:
        nl -= 1
        prob[large[nl]] = 1.0
    while ns > 0:
        ns -= 1
        prob[small[ns]] = 1.0
    return prob, alias


@numba.njit(cache=True, inline="always")
def _draw_alias(state, prob, alias):
    state, u = _next(state)
    n = prob.size
    i = int(u * n)
    if i >= n:
        i = n - 1
    state, v = _next(state)
    if v < prob[i]:
        return state, i
    return state, alias[i]


@numba.njit(cache=True, inline="always")
def _sigmoid(x):
    if x > 30.0:
        x = 30.0
    elif x < -30.0:
        x = -30.0
    return 1.0 / (1.0 + np.exp(-x))


@numba.njit(cache=True, fastmath=True)
def _train_kernel(nodes, offsets, syn0, syn1, prob, alias, window, negatives, epochs,
                  lr0, seed):
    dim = syn0.shape[1]
    n_walks = offsets.size - 1
    total = float(epochs) * nodes.size
    done = 0.0
    state = _stream(seed, 0, 0)
    grad = np.zeros(dim)
    sample = prob.size > 0
    for _ in range(epochs):
        for w in range(n_walks):
            lo, hi = offsets[w], offsets[w + 1]
            for i in range(lo, hi):
                lr = lr0 * (1.0 - 0.99 * done / total)
                done += 1.0
                center = nodes[i]
                a = max(lo, i - window)
                b = min(hi, i + window + 1)
                for j in range(a, b):
                    if j == i:
                        continue
                    for t in range(dim):
                        grad[t] = 0.0
                    for d in range(negatives + 1):
                        if d == 0:
                            target = nodes[j]
                            label = 1.0
                        else:
                            if not sample:
                                break
                            state, target = _draw_alias(state, prob, alias)
                            if target == nodes[j]:
                                continue
                            label = 0.0
                        f = 0.0
                        for t in range(dim):
                            f += syn0[center, t] * syn1[target, t]
                        g = (label - _sigmoid(f)) * lr
                        for t in range(dim):
                            grad[t] += g * syn1[target, t]
                            syn1[target, t] += g * syn0[center, t]
                    for t in range(dim):
                        syn0[center, t] += grad[t]


@numba.njit(cache=True)
def _loss_kernel(nodes, offsets, syn0, syn1, prob, alias, window, negatives, seed):
    n_walks = offsets.size - 1
    state = _stream(seed, 1, 0)
    total = 0.0
    count = 0
    dim = syn0.shape[1]
    for w in range(n_walks):
        lo, hi = offsets[w], offsets[w + 1]
        for i in range(lo, hi):
            center = nodes[i]
            for j in range(max(lo, i - window), min(hi, i + window + 1)):
                if j == i:
                    continue
                f = 0.0
                for t in range(dim):
                    f += syn0[center, t] * syn1[nodes[j], t]
                total -= np.log(_sigmoid(f))
                for _ in range(negatives):
                    state, target = _draw_alias(state, prob, alias)
                    f = 0.0
                    for t in range(dim):
                        f += syn0[center, t] * syn1[target, t]
                    total -= np.log(_sigmoid(-f))
                count += 1
    return total / max(count, 1)


# ---------------------------------------------------------------------------
# public API


def _cumulative_weights(layer: LayerGraph):
    if not layer.is_weighted:
        return np.zeros(1), False
    return np.cumsum(layer.csr[2]), True


def generate_walks(layer: LayerGraph, cfg: EmbedConfig) -> WalkCorpus:
    """``walks_per_node`` walks from every node, walk index outermost.

    Isolated nodes produce single-node walks.  Weighted layers move to a
    neighbor with probability proportional to the edge weight.
    """
    indptr, indices, _ = layer.csr
    cumw, weighted = _cumulative_weights(layer)
    nodes, offsets = _walks_kernel(indptr, indices, cumw, weighted, layer.n_nodes,
                                   cfg.walks_per_node, cfg.walk_length,
                                   float(cfg.return_p), float(cfg.inout_q),
                                   derive_seed(cfg.seed, "walks"))
    return WalkCorpus(nodes, offsets)


def initial_vectors(n_nodes: int, cfg: EmbedConfig) -> np.ndarray:
    gen = np.random.default_rng(derive_seed(cfg.seed, "init"))
    return (gen.random((n_nodes, cfg.dim)) - 0.5) / cfg.dim


def noise_distribution(corpus: WalkCorpus, n_nodes: int, power: float = 0.75):
    counts = np.bincount(corpus.nodes, minlength=n_nodes).astype(float)
    weights = counts ** power
    if weights.sum() == 0:
        return np.zeros(0), np.zeros(0, dtype=np.int64)
    return _alias_table(weights / weights.sum())


def _check_corpus(corpus, n_nodes):
    if len(corpus) == 0:
        raise ValidationError("empty corpus")
    if corpus.nodes.size and (corpus.nodes.min() < 0 or corpus.nodes.max() >= n_nodes):
        raise ValidationError("corpus contains node ids outside 0..n_nodes-1")


def train_skipgram(corpus: WalkCorpus, n_nodes: int, cfg: EmbedConfig,
                   layer_id: int = 0, digest: str = "") -> EmbeddingMatrix:
    """Skip-gram with negative sampling over ``corpus``.

    Every ordered pair within ``window`` positions is a training pair.
    Negatives follow the unigram distribution to the 3/4 power; the learning
    rate decays linearly to 1% of ``initial_lr``.  Input vectors start
    uniform in ``[-0.5/d, 0.5/d]`` and context vectors at zero.
    """
    _check_corpus(corpus, n_nodes)
    syn0 = initial_vectors(n_nodes, cfg)
    syn1 = np.zeros_like(syn0)
    prob, alias = noise_distribution(corpus, n_nodes)
    if cfg.epochs > 0:
        _train_kernel(corpus.nodes, corpus.offsets, syn0, syn1, prob, alias, cfg.window,
                      cfg.negative_samples, cfg.epochs, float(cfg.initial_lr),
                      derive_seed(cfg.seed, "skipgram"))
    return EmbeddingMatrix(syn0, layer_id, digest, cfg.seed, context=syn1)


def skipgram_loss(corpus: WalkCorpus, vectors, context, cfg: EmbedConfig,
                  seed: int = 0) -> float:
    """Mean negative-sampling loss per pair, with negatives fixed by ``seed``."""
    n = np.asarray(vectors).shape[0]
    _check_corpus(corpus, n)
    prob, alias = noise_distribution(corpus, n)
    negatives = cfg.negative_samples if prob.size else 0
    return float(_loss_kernel(corpus.nodes, corpus.offsets, np.asarray(vectors, dtype=float),
                              np.asarray(context, dtype=float), prob, alias, cfg.window,
                              negatives, derive_seed(seed, "loss")))


def embed_layer(layer: LayerGraph, cfg: EmbedConfig = EmbedConfig(),
                layer_id: int = 0) -> EmbeddingMatrix:
    corpus = generate_walks(layer, cfg)
    return train_skipgram(corpus, layer.n_nodes, cfg, layer_id, config_hash(layer, cfg))


# ---------------------------------------------------------------------------
# file format: header line "N d seed config_hash", then one row per node


def format_embedding(emb: EmbeddingMatrix) -> str:
    n, d = emb.shape
    lines = [f"{n} {d} {emb.seed} {emb.config_hash or '-'}"]
    lines += [" ".join(repr(float(x)) for x in row) for row in emb.vectors]
    return "\n".join(lines) + "\n"


def save_embedding(emb: EmbeddingMatrix, path) -> None:
    atomic_write_text(path, format_embedding(emb))


def load_embedding(path, layer_id: int = 0) -> EmbeddingMatrix:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise ValidationError(f"{path}: bad embedding header")
        n, d, seed = int(header[0]), int(header[1]), int(header[2])
        digest = "" if header[3] == "-" else header[3]
        data = np.loadtxt(fh, ndmin=2) if n else np.zeros((0, d))
    if data.shape != (n, d):
        raise ValidationError(f"{path}: expected {n}x{d} matrix, found {data.shape}")
    return EmbeddingMatrix(data, layer_id, digest, seed)
