"""
Command-line front end.

    eatsim generate {ba,ladder,gmm} --out NET.edges [model flags]
    eatsim embed NET.edges --out-dir DIR
    eatsim sim NET.edges --out pairs.csv [--grid grid.csv]
    eatsim robustness NET.edges --out report.csv [--trace-dir DIR]
    eatsim reduce NET.edges --out traj.csv [--metric eatsim|jsd]
    eatsim reproduce {fig2a,fig2b,fig3,fig5} --out-dir DIR

Option values are resolved as command-line flag, then ``--config`` file
(``key=value`` lines, keys spelled like the flags with ``_`` for ``-``),
then the built-in default.  ``EATSIM_THREADS`` sets the default worker
count.  Exit status: 0 ok, 1 usage, 2 invalid data, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

from . import experiments
from .embedding import EmbedConfig, embed_layer, save_embedding
from .generators import (DEFAULT_LADDER, GmmParams, format_metadata, generate_ba,
                         generate_gmm, parse_metadata, rewiring_ladder)
from .multiplex import (MultiplexNetwork, ValidationError, atomic_write_text, format_multiplex,
                        load_multiplex)
from .reducibility import format_grouping, format_trajectory_csv, greedy_reduce
from .robustness import AttackParams, format_report_csv, format_trace_csv, omega_score
from .similarity import NumericError, similarity_matrix

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _bool(text):
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _threads():
    raw = os.environ.get("EATSIM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"EATSIM_THREADS must be an integer, got {raw!r}")


# name -> (type, default, help); shared by flags and the config file
OPTIONS = {
    "seed": (int, 0, "global seed"),
    "threads": (int, None, "worker threads (default: $EATSIM_THREADS or 1)"),
    # embedding
    "dim": (int, 32, "embedding dimension"),
    "walks_per_node": (int, 10, "walks started per node"),
    "walk_length": (int, 10, "nodes per walk"),
    "window": (int, 10, "skip-gram context window"),
    "return_p": (float, 1.0, "node2vec return parameter p"),
    "inout_q": (float, 1.0, "node2vec in-out parameter q"),
    "negative_samples": (int, 5, "negative samples per positive pair"),
    "epochs": (int, 5, "passes over the walk corpus"),
    "initial_lr": (float, 0.025, "initial learning rate"),
    # similarity
    "omega": (float, 0.5, "weight of the PED loss in D"),
    "normalize": (_bool, True, "rescale embeddings to unit RMS row norm"),
    # robustness
    "alpha": (float, 0.4, "upper GMCC threshold as a fraction of M"),
    "beta": (float, 0.5, "lower GMCC threshold exponent"),
    "reshuffles": (int, 10, "number of reshuffled replicas"),
    "gmcc_only": (_bool, False, "only attack current GMCC members"),
    # reduction
    "metric": (str, "eatsim", "eatsim or jsd"),
    "linkage": (str, "recompute", "recompute or average"),
    # generators
    "nodes": (int, 1000, "number of nodes"),
    "m_attach": (int, 2, "BA edges per new node"),
    "probabilities": (_floats, DEFAULT_LADDER, "comma-separated rewiring probabilities"),
    "mean_degree": (float, 6.0, "GMM mean degree"),
    "gamma": (float, 2.5, "GMM degree exponent"),
    "temperature": (float, 0.4, "GMM temperature"),
    "angular_corr": (float, 0.0, "GMM angular correlation g"),
    "radial_corr": (float, 0.0, "GMM radial correlation v"),
    "layers": (int, 2, "GMM layer count"),
    # reproduce
    "replicates": (int, 5, "network seeds per grid point"),
}

EMBED = ("dim", "walks_per_node", "walk_length", "window", "return_p", "inout_q",
         "negative_samples", "epochs", "initial_lr")
COMMON = ("seed", "threads")
COMMAND_OPTIONS = {
    "generate": COMMON + ("nodes", "m_attach", "probabilities", "mean_degree", "gamma",
                          "temperature", "angular_corr", "radial_corr", "layers"),
    "embed": COMMON + EMBED,
    "sim": COMMON + EMBED + ("omega", "normalize"),
    "robustness": COMMON + ("alpha", "beta", "reshuffles", "gmcc_only"),
    "reduce": COMMON + EMBED + ("omega", "normalize", "metric", "linkage"),
    "reproduce": COMMON + EMBED + ("nodes", "replicates"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eatsim", description="Interlayer similarity for multiplex networks.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="key=value configuration file")
        for opt in COMMAND_OPTIONS[name]:
            kind, default, text = OPTIONS[opt]
            p.add_argument("--" + opt.replace("_", "-"), dest=opt, type=kind,
                           help=f"{text} (default: {_show(default)})")
        return p

    p = add("generate", "write a synthetic multiplex as an edge list")
    p.add_argument("model", choices=("ba", "ladder", "gmm"))
    p.add_argument("--out", required=True)

    p = add("embed", "embed every layer of a multiplex")
    p.add_argument("input")
    p.add_argument("--out-dir", dest="out_dir", required=True)

    p = add("sim", "pairwise layer similarity report")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--grid", help="also write an L x L EATSim grid")

    p = add("robustness", "targeted-attack robustness of a two-layer multiplex")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--trace-dir", dest="trace_dir", help="write per-step attack traces here")

    p = add("reduce", "greedy layer aggregation")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="q-trajectory CSV")
    p.add_argument("--dendrogram", help="merge tree output")
    p.add_argument("--grouping", help="optimal grouping output")

    p = add("reproduce", "run a scripted experiment recipe")
    p.add_argument("experiment", choices=experiments.EXPERIMENTS)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    return parser


def _show(value):
    if isinstance(value, tuple):
        return ",".join(repr(v) for v in value)
    return value


def read_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_metadata(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}")


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags, config file and defaults for the chosen command."""
    allowed = COMMAND_OPTIONS[args.command]
    given = vars(args)
    from_file = read_config(given["config"]) if "config" in given else {}
    unknown = sorted(set(from_file) - set(allowed))
    if unknown:
        raise UsageError(f"unknown key(s) in config file for {args.command!r}: {', '.join(unknown)}")
    out = {"explicit": {k for k in allowed if k in given or k in from_file}}
    for name in allowed:
        kind, default, _ = OPTIONS[name]
        if name in given:
            out[name] = given[name]
        elif name in from_file:
            try:
                out[name] = kind(from_file[name])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {name}: {exc}")
        else:
            out[name] = default
    if "threads" in out and out["threads"] is None:
        out["threads"] = _threads()
    if "metric" in out and out["metric"] not in ("eatsim", "jsd"):
        raise UsageError("--metric must be eatsim or jsd")
    if "linkage" in out and out["linkage"] not in ("recompute", "average"):
        raise UsageError("--linkage must be recompute or average")
    if "omega" in out and not 0.0 <= out["omega"] <= 1.0:
        raise UsageError("--omega must lie in [0, 1]")
    return out


def embed_config(opts) -> EmbedConfig:
    return EmbedConfig(**{k: opts[k] for k in EMBED}, seed=opts["seed"])


def _load(path) -> MultiplexNetwork:
    if not os.path.isfile(path):
        raise ValidationError(f"input file not found: {path}")
    return load_multiplex(path)


def _check_dir(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise ValidationError(f"output directory does not exist: {parent}")


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.=-]+", "_", name)


def _write_all(files: dict):
    for path in files:
        _check_dir(path)
    for path, text in files.items():
        atomic_write_text(path, text)


# --- commands -------------------------------------------------------------


def cmd_generate(args, opts):
    seed = opts["seed"]
    if args.model == "ba":
        layer = generate_ba(opts["nodes"], opts["m_attach"], seed)
        net = MultiplexNetwork(layer.n_nodes, (layer,), ("ba",))
        meta = {"model": "ba", "nodes": opts["nodes"], "m_attach": opts["m_attach"]}
    elif args.model == "ladder":
        net = rewiring_ladder(opts["nodes"], opts["m_attach"], opts["probabilities"], seed)
        meta = {"model": "ladder", "nodes": opts["nodes"], "m_attach": opts["m_attach"],
                "probabilities": _show(opts["probabilities"])}
    else:
        params = GmmParams(opts["nodes"], opts["mean_degree"], opts["gamma"], opts["temperature"],
                           opts["angular_corr"], opts["radial_corr"], seed, opts["layers"])
        net = generate_gmm(params)
        meta = {"model": "gmm", **{k: v for k, v in params.as_dict().items() if k != "seed"}}
    meta["seed"] = seed
    _write_all({args.out: format_multiplex(net), args.out + ".meta": format_metadata(meta)})
    return f"generate: {net.n_layers} layer(s), N={net.n_nodes} -> {args.out}, {args.out}.meta"


def cmd_embed(args, opts):
    net = _load(args.input)
    cfg = embed_config(opts)
    embs = [embed_layer(layer, cfg, k) for k, layer in enumerate(net.layers)]
    os.makedirs(args.out_dir, exist_ok=True)
    paths = []
    for k, (name, emb) in enumerate(zip(net.layer_names, embs)):
        path = os.path.join(args.out_dir, f"{k:03d}_{_safe(name)}.emb")
        save_embedding(emb, path)
        paths.append(path)
    return f"embed: {len(paths)} layer(s) -> {args.out_dir}"


def cmd_sim(args, opts):
    net = _load(args.input)
    if net.n_layers < 2:
        raise ValidationError("sim needs at least two layers")
    mat = similarity_matrix(net, embed_config(opts), opts["omega"], opts["normalize"],
                            n_jobs=opts["threads"])
    names = list(net.layer_names)
    files = {args.out: experiments.pairs_csv(names, mat)}
    if "grid" in args:
        files[args.grid] = experiments.grid_csv(names, mat)
    _write_all(files)
    n_pairs = len(names) * (len(names) - 1) // 2
    return f"sim: {n_pairs} pair(s) -> {', '.join(files)}"


def cmd_robustness(args, opts):
    net = _load(args.input)
    params = AttackParams(opts["alpha"], opts["beta"], opts["reshuffles"], opts["seed"],
                          opts["gmcc_only"])
    res = omega_score(net, params, opts["threads"])
    files = {args.out: format_report_csv(res)}
    if "trace_dir" in args:
        os.makedirs(args.trace_dir, exist_ok=True)
        files[os.path.join(args.trace_dir, "original.csv")] = format_trace_csv(res.trace)
        for r, t in enumerate(res.reshuffled_traces):
            files[os.path.join(args.trace_dir, f"reshuffled_{r:03d}.csv")] = format_trace_csv(t)
    _write_all(files)
    return (f"robustness: delta_n={res.delta_n} delta_n_rs={res.delta_n_rs!r} "
            f"omega={res.omega!r} -> {args.out}")


def cmd_reduce(args, opts):
    net = _load(args.input)
    rep = greedy_reduce(net, opts["metric"], embed_config(opts), opts["omega"], opts["linkage"],
                        opts["normalize"])
    files = {args.out: format_trajectory_csv(rep)}
    if "dendrogram" in args:
        files[args.dendrogram] = rep.dendrogram() + "\n"
    if "grouping" in args:
        files[args.grouping] = format_grouping(rep)
    _write_all(files)
    return (f"reduce: max q={max(rep.q_trajectory)!r} at m={rep.optimal_m} "
            f"-> {', '.join(files)}")


def cmd_reproduce(args, opts):
    # without an explicit size each recipe uses its own (1000 for BA, 2000 for GMM)
    nodes = opts["nodes"] if "nodes" in opts["explicit"] else None
    paths = experiments.reproduce(args.experiment, args.out_dir, opts["seed"], embed_config(opts),
                                  nodes, opts["replicates"], opts["threads"])
    return f"reproduce {args.experiment}: {len(paths)} file(s) -> {args.out_dir}"


COMMANDS = {"generate": cmd_generate, "embed": cmd_embed, "sim": cmd_sim,
            "robustness": cmd_robustness, "reduce": cmd_reduce, "reproduce": cmd_reproduce}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        opts = resolve(args)
        summary = COMMANDS[args.command](args, opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FloatingPointError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
