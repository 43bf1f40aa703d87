"""
Scripted recipes behind ``eatsim reproduce``.

Each recipe returns plain rows; the ``*_csv`` helpers turn them into the
files written by the command line.  Sizes default to the desk-scale
settings (BA N=1000, GMM N=2000) and can be shrunk for smoke runs.
"""

from __future__ import annotations

import os
from dataclasses import replace
from typing import Sequence

import numpy as np

from ._rng import derive_seed
from .embedding import EmbedConfig
from .generators import DEFAULT_LADDER, GmmParams, generate_gmm, rewiring_ladder
from .multiplex import ValidationError, atomic_write_text
from .reducibility import format_trajectory_csv, greedy_reduce
from .robustness import AttackParams, omega_score
from .similarity import eatsim, embed_all, embedding_similarity, similarity_matrix

EXPERIMENTS = ("fig2a", "fig2b", "fig3", "fig5")
GMM_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)
TREND_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


def rewiring_curve(n: int = 1000, m_attach: int = 2,
                   probabilities: Sequence[float] = DEFAULT_LADDER, seed: int = 0,
                   cfg: EmbedConfig = EmbedConfig(), omega: float = 0.5):
    """Similarity between the original BA layer and each rewired copy."""
    net = rewiring_ladder(n, m_attach, probabilities, seed)
    emb = embed_all(net.layers, cfg)
    return [(p, embedding_similarity(emb[0].vectors, emb[k].vectors, omega, pair=(0, k)))
            for k, p in enumerate(probabilities, 1)]


def ladder_matrix(n: int = 1000, m_attach: int = 2,
                  probabilities: Sequence[float] = DEFAULT_LADDER, seed: int = 0,
                  cfg: EmbedConfig = EmbedConfig(), omega: float = 0.5, n_jobs: int = 1):
    net = rewiring_ladder(n, m_attach, probabilities, seed)
    return net, similarity_matrix(net, cfg, omega, n_jobs=n_jobs)


def gmm_point(n: int, g: float, v: float, seed: int, cfg: EmbedConfig = EmbedConfig(),
              attack: AttackParams | None = None, omega: float = 0.5, n_jobs: int = 1) -> dict:
    """EATSim (and optionally Omega) for one GMM realisation."""
    net = generate_gmm(GmmParams(n, angular_corr=g, radial_corr=v, seed=seed))
    emb_cfg = cfg.with_seed(derive_seed(cfg.seed, "replicate", seed))
    row = {"g": g, "v": v, "seed": seed, "eatsim": eatsim(net[0], net[1], emb_cfg, omega).eatsim}
    if attack is not None:
        res = omega_score(net, replace(attack, seed=seed), n_jobs)
        row.update(delta_n=res.delta_n, delta_n_rs=res.delta_n_rs, omega=res.omega)
    return row


def gmm_sweep(axis: str = "g", grid: Sequence[float] = GMM_GRID, seeds: Sequence[int] = range(5),
              n: int = 2000, cfg: EmbedConfig = EmbedConfig(),
              attack: AttackParams | None = None, n_jobs: int = 1) -> list:
    """Vary ``g`` at ``v=1`` (``axis="g"``) or ``v`` at ``g=1`` (``axis="v"``)."""
    if axis not in ("g", "v"):
        raise ValidationError("axis must be 'g' or 'v'")
    rows = []
    for x in grid:
        g, v = (x, 1.0) if axis == "g" else (1.0, x)
        g, v = float(g), float(v)
        rows += [gmm_point(n, g, v, s, cfg, attack, n_jobs=n_jobs) for s in seeds]
    return rows


def reduction_comparison(n: int = 1000, m_attach: int = 2,
                         probabilities: Sequence[float] = DEFAULT_LADDER, seed: int = 0,
                         cfg: EmbedConfig = EmbedConfig(), omega: float = 0.5) -> dict:
    net = rewiring_ladder(n, m_attach, probabilities, seed)
    return {metric: greedy_reduce(net, metric, cfg, omega) for metric in ("eatsim", "jsd")}


# --- output ---------------------------------------------------------------


def curve_csv(curve) -> str:
    rows = ["p,ped,aed,D,eatsim"]
    rows += [f"{p!r},{r.ped!r},{r.aed!r},{r.dissimilarity!r},{r.eatsim!r}" for p, r in curve]
    return "\n".join(rows) + "\n"


def pairs_csv(names, matrix) -> str:
    rows = ["layer_i,layer_j,ped,aed,D,eatsim"]
    n = len(names)
    for i in range(n):
        for j in range(i + 1, n):
            r = matrix[i, j]
            rows.append(f"{names[i]},{names[j]},{r.ped!r},{r.aed!r},"
                        f"{r.dissimilarity!r},{r.eatsim!r}")
    return "\n".join(rows) + "\n"


def grid_csv(names, matrix) -> str:
    rows = ["," + ",".join(names)]
    for i, name in enumerate(names):
        rows.append(name + "," + ",".join(repr(matrix[i, j].eatsim) for j in range(len(names))))
    return "\n".join(rows) + "\n"


def sweep_csv(rows: list) -> str:
    keys = ["g", "v", "seed", "eatsim", "delta_n", "delta_n_rs", "omega"]
    keys = [k for k in keys if any(k in r for r in rows)]
    out = [",".join(keys)]
    out += [",".join(repr(r[k]) if isinstance(r[k], float) else str(r[k]) for k in keys)
            for r in rows]
    return "\n".join(out) + "\n"


def reproduce(name: str, out_dir, seed: int = 0, cfg: EmbedConfig = EmbedConfig(),
              n_nodes: int | None = None, seeds: int = 5, n_jobs: int = 1) -> list:
    """Run one recipe and write its files into ``out_dir``; returns the paths."""
    if name not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    cfg = cfg.with_seed(seed)
    written = []

    def put(fname, text):
        path = os.path.join(out_dir, fname)
        atomic_write_text(path, text)
        written.append(path)

    if name == "fig2a":
        curve = rewiring_curve(n_nodes or 1000, seed=seed, cfg=cfg)
        texts = {"fig2a_rewiring.csv": curve_csv(curve)}
    elif name == "fig2b":
        net, mat = ladder_matrix(n_nodes or 1000, seed=seed, cfg=cfg, n_jobs=n_jobs)
        names = list(net.layer_names)
        texts = {"fig2b_pairs.csv": pairs_csv(names, mat), "fig2b_grid.csv": grid_csv(names, mat)}
    elif name == "fig3":
        n = n_nodes or 2000
        seed_list = [seed + k for k in range(seeds)]
        texts = {
            "fig3_robustness.csv": sweep_csv(gmm_sweep("g", GMM_GRID, seed_list, n, cfg,
                                                       AttackParams(), n_jobs)),
            "fig3_angular.csv": sweep_csv(gmm_sweep("g", TREND_GRID, seed_list, n, cfg)),
            "fig3_radial.csv": sweep_csv(gmm_sweep("v", TREND_GRID, seed_list, n, cfg)),
        }
    else:
        reports = reduction_comparison(n_nodes or 1000, seed=seed, cfg=cfg)
        texts = {}
        for metric, rep in reports.items():
            texts[f"fig5_{metric}_trajectory.csv"] = format_trajectory_csv(rep)
            texts[f"fig5_{metric}_dendrogram.txt"] = rep.dendrogram() + "\n"
    # everything is computed before the first file lands on disk
    os.makedirs(out_dir, exist_ok=True)
    for fname, text in texts.items():
        put(fname, text)
    return written


def spearman_per_seed(rows: list, axis: str) -> list:
    """Per-seed Spearman correlation between the swept parameter and EATSim."""
    from scipy.stats import spearmanr
    out = []
    for s in sorted({r["seed"] for r in rows}):
        sub = [r for r in rows if r["seed"] == s]
        out.append(float(spearmanr([r[axis] for r in sub], [r["eatsim"] for r in sub])[0]))
    return out


def point_means(rows: list, axis: str, key: str) -> tuple:
    xs = sorted({r[axis] for r in rows})
    return xs, [float(np.mean([r[key] for r in rows if r[axis] == x])) for x in xs]
