"""
Interlayer similarity from node embeddings.

``ped_loss``
    mean absolute gap between the two layers' pairwise node distances.
``aed_loss``
    mean distance between anchor nodes after rotating one embedding onto
    the other with the orthogonal Procrustes solution.
``eatsim``
    ``1 - (omega * ped + (1 - omega) * aed)``.

Also provides the spectral Jensen-Shannon distance between layers used as
a baseline for layer reduction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .embedding import EmbedConfig, EmbeddingMatrix, embed_layer
from .multiplex import LayerGraph, MultiplexNetwork, ValidationError


class NumericError(ArithmeticError):
    """Raised when a linear-algebra routine cannot produce a finite result."""


@dataclass(frozen=True)
class SimilarityResult:
    ped: float
    aed: float
    omega: float
    dissimilarity: float
    eatsim: float
    layer_pair: tuple = (0, 1)


@dataclass(frozen=True)
class AlignmentResult:
    rotation: np.ndarray
    aligned_source: np.ndarray
    residual: float


def _matrix(x) -> np.ndarray:
    return x.vectors if isinstance(x, EmbeddingMatrix) else np.asarray(x, dtype=np.float64)


def _pair(xa, xb):
    a, b = _matrix(xa), _matrix(xb)
    if a.ndim != 2 or a.shape != b.shape:
        raise ValidationError(f"embedding shapes differ: {a.shape} vs {b.shape}")
    return a, b


def euclidean_distance(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValidationError("vectors have different dimensions")
    return float(np.sqrt(np.sum((x - y) ** 2)))


def rms_normalize(x) -> np.ndarray:
    """Scale so the root-mean-square row norm is 1."""
    x = _matrix(x)
    scale = np.linalg.norm(x) / math.sqrt(max(x.shape[0], 1))
    return x / scale if scale > 0 else x.copy()


def ped_loss(xa, xb, block: int = 512, n_samples: Optional[int] = None,
             seed: int = 0) -> float:
    """Pairwise Euclidean distance loss.

    Exact over all ``i < j`` pairs, accumulated block by block with
    pairwise summation inside a block and ``math.fsum`` across blocks, so
    the value does not depend on how the work is split.  With
    ``n_samples`` set, estimates the mean from random pairs instead.
    """
    a, b = _pair(xa, xb)
    n = a.shape[0]
    if n < 2:
        return 0.0
    if n_samples is not None:
        gen = np.random.default_rng(seed)
        i = gen.integers(n, size=n_samples)
        j = gen.integers(n - 1, size=n_samples)
        j += j >= i
        da = np.linalg.norm(a[i] - a[j], axis=1)
        db = np.linalg.norm(b[i] - b[j], axis=1)
        return float(np.mean(np.abs(da - db)))
    parts = []
    for start in range(0, n - 1, block):
        stop = min(start + block, n - 1)
        rows = slice(start, stop)
        da = cdist(a[rows], a[start:])
        db = cdist(b[rows], b[start:])
        # keep strictly-upper entries only
        gap = np.triu(np.abs(da - db), k=1)
        parts.append(float(np.sum(gap)))
    return 2.0 * math.fsum(parts) / (n * (n - 1))


def procrustes_align(xa, xb) -> AlignmentResult:
    """Orthogonal ``W`` minimising ``||xa W - xb||_F``.

    With ``xa^T xb = U S V^T`` (singular values descending) the optimum is
    ``W = U V^T``.
    """
    a, b = _pair(xa, xb)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise NumericError("non-finite embedding entries")
    try:
        u, _, vt = np.linalg.svd(a.T @ b)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed: {exc}") from exc
    w = u @ vt
    aligned = a @ w
    return AlignmentResult(w, aligned, float(np.linalg.norm(aligned - b)))


def aed_loss(xa, xb, anchors=None) -> float:
    """Mean anchor distance after Procrustes alignment of ``xa`` onto ``xb``.

    ``anchors`` restricts both the alignment and the average to a node
    subset (default: every node).
    """
    a, b = _pair(xa, xb)
    if anchors is not None:
        anchors = np.asarray(anchors)
        a, b = a[anchors], b[anchors]
    if a.shape[0] == 0:
        raise ValidationError("no anchor nodes")
    aligned = procrustes_align(a, b).aligned_source
    return float(np.mean(np.linalg.norm(aligned - b, axis=1)))


def combine(ped: float, aed: float, omega: float = 0.5, pair=(0, 1)) -> SimilarityResult:
    if not 0.0 <= omega <= 1.0:
        raise ValidationError("omega must lie in [0, 1]")
    if omega == 1.0:
        d = ped
    elif omega == 0.0:
        d = aed
    else:
        d = omega * ped + (1.0 - omega) * aed
    return SimilarityResult(ped, aed, omega, d, 1.0 - d, tuple(pair))


def embedding_similarity(xa, xb, omega: float = 0.5, normalize: bool = True,
                         anchors=None, pair=(0, 1)) -> SimilarityResult:
    """Similarity of two embeddings; ``normalize`` applies ``rms_normalize``."""
    a, b = _pair(xa, xb)
    if normalize:
        a, b = rms_normalize(a), rms_normalize(b)
    if anchors is not None:
        ped = ped_loss(a[anchors], b[anchors])
    else:
        ped = ped_loss(a, b)
    return combine(ped, aed_loss(a, b, anchors), omega, pair)


def eatsim(ga: LayerGraph, gb: LayerGraph, cfg: EmbedConfig = EmbedConfig(),
           omega: float = 0.5, normalize: bool = True, anchors=None) -> SimilarityResult:
    """Embed both layers with the same config and seed, then compare."""
    if ga.n_nodes != gb.n_nodes:
        raise ValidationError("layers must share the node set")
    if not 0.0 <= omega <= 1.0:
        raise ValidationError("omega must lie in [0, 1]")
    xa = embed_layer(ga, cfg, 0)
    xb = embed_layer(gb, cfg, 1)
    return embedding_similarity(xa, xb, omega, normalize, anchors)


def embed_all(layers: Sequence[LayerGraph], cfg: EmbedConfig, n_jobs: int = 1) -> list:
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            return list(pool.map(lambda t: embed_layer(t[1], cfg, t[0]), enumerate(layers)))
    return [embed_layer(layer, cfg, i) for i, layer in enumerate(layers)]


def similarity_matrix(net: MultiplexNetwork, cfg: EmbedConfig = EmbedConfig(),
                      omega: float = 0.5, normalize: bool = True,
                      embeddings=None, n_jobs: int = 1) -> np.ndarray:
    """``L x L`` object array of ``SimilarityResult``; each layer embedded once."""
    if embeddings is None:
        embeddings = embed_all(net.layers, cfg, n_jobs)
    mats = [rms_normalize(e) if normalize else _matrix(e) for e in embeddings]
    n_layers = len(mats)
    out = np.empty((n_layers, n_layers), dtype=object)
    for i in range(n_layers):
        out[i, i] = combine(0.0, 0.0, omega, (i, i))
        for j in range(i + 1, n_layers):
            r = combine(ped_loss(mats[i], mats[j]), aed_loss(mats[i], mats[j]), omega, (i, j))
            out[i, j] = r
            out[j, i] = SimilarityResult(r.ped, r.aed, r.omega, r.dissimilarity, r.eatsim, (j, i))
    return out


def eatsim_values(matrix: np.ndarray) -> np.ndarray:
    return np.vectorize(lambda r: r.eatsim, otypes=[float])(matrix)


# ---------------------------------------------------------------------------
# spectral JSD baseline


def density_spectrum(layer: LayerGraph) -> np.ndarray:
    """Eigenvalues of ``Lap / trace(Lap)`` for the combinatorial Laplacian."""
    from .reducibility import density_matrix

    return np.linalg.eigvalsh(density_matrix(layer))


def _entropy_nats(eigenvalues) -> float:
    lam = np.clip(np.asarray(eigenvalues), 0.0, None)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))


def jsd_distance(ga: LayerGraph, gb: LayerGraph) -> float:
    """Square root of the spectral Jensen-Shannon divergence, in ``[0, 1]``.

    Entropies of the Laplacian density operators are taken in nats and
    divided by ``ln N``.
    """
    from .reducibility import density_matrix

    if ga.n_nodes != gb.n_nodes:
        raise ValidationError("layers must share the node set")
    ra, rb = density_matrix(ga), density_matrix(gb)
    n = ga.n_nodes
    ha = _entropy_nats(np.linalg.eigvalsh(ra))
    hb = _entropy_nats(np.linalg.eigvalsh(rb))
    hm = _entropy_nats(np.linalg.eigvalsh(0.5 * (ra + rb)))
    div = (hm - 0.5 * (ha + hb)) / math.log(n)
    return float(math.sqrt(min(max(div, 0.0), 1.0)))
