"""
Multiplex network data model, edge-list I/O, connected components and the
giant mutually connected component (GMCC).

Layers are node-aligned: every layer lives on the same dense id range
``0..N-1`` and the interlayer links are the identity map on ids.  External
node labels from files are kept in a side table.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


class ValidationError(ValueError):
    """Raised for inputs that violate a data-model invariant."""


class ParseError(ValidationError):
    """Raised for malformed edge-list lines."""

    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {reason}: {line.strip()!r}")


def _canonical_edges(n_nodes, edges, weights=None):
    """Sort, orient (u < v) and deduplicate an edge array; weights of
    duplicates are summed."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if weights.shape[0] != edges.shape[0]:
            raise ValidationError("weights length does not match edge count")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise ValidationError("edge weights must be strictly positive")
    if edges.size == 0:
        return np.empty((0, 2), dtype=np.int64), (None if weights is None else np.empty(0))
    if edges.min() < 0 or edges.max() >= n_nodes:
        raise ValidationError(f"edge endpoint outside 0..{n_nodes - 1}")
    if np.any(edges[:, 0] == edges[:, 1]):
        raise ValidationError("self-loops are not allowed")
    u = np.minimum(edges[:, 0], edges[:, 1])
    v = np.maximum(edges[:, 0], edges[:, 1])
    key = u * n_nodes + v
    uniq, inverse = np.unique(key, return_inverse=True)
    out = np.column_stack([uniq // n_nodes, uniq % n_nodes])
    if weights is None:
        return out, None
    w = np.zeros(uniq.shape[0])
    np.add.at(w, inverse, weights)
    return out, w


@dataclass(frozen=True, eq=False)
class LayerGraph:
    """A simple undirected (optionally weighted) graph on nodes ``0..N-1``.

    ``edges`` is an ``(E, 2)`` array with ``u < v`` in lexicographic order;
    ``weights`` is ``None`` for unweighted layers.
    """

    n_nodes: int
    edges: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n_nodes < 0:
            raise ValidationError("node count must be non-negative")
        edges, weights = _canonical_edges(self.n_nodes, self.edges, self.weights)
        edges.setflags(write=False)
        if weights is not None:
            weights.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Iterable, weights=None) -> "LayerGraph":
        edges = np.array(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        return cls(n_nodes, edges, weights)

    @classmethod
    def from_networkx(cls, graph, n_nodes: Optional[int] = None, weight: Optional[str] = None):
        n = graph.number_of_nodes() if n_nodes is None else n_nodes
        edges = np.array([(u, v) for u, v in graph.edges()], dtype=np.int64).reshape(-1, 2)
        w = None
        if weight is not None:
            w = np.array([d.get(weight, 1.0) for _, _, d in graph.edges(data=True)])
        return cls(n, edges, w)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    def edge_weights(self) -> np.ndarray:
        """Weights with unit weight for unweighted layers."""
        if self.weights is None:
            return np.ones(self.n_edges)
        return np.asarray(self.weights)

    @cached_property
    def csr(self):
        """Symmetric CSR triple ``(indptr, indices, data)``; neighbors sorted."""
        n = self.n_nodes
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        w = self.edge_weights()
        data = np.concatenate([w, w])
        order = np.lexsort((cols, rows))
        rows, cols, data = rows[order], cols[order], data[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return indptr, cols.astype(np.int64), data

    def neighbors(self, node: int) -> np.ndarray:
        indptr, indices, _ = self.csr
        return indices[indptr[node]:indptr[node + 1]]

    def degrees(self) -> np.ndarray:
        indptr = self.csr[0]
        return np.diff(indptr)

    def adjacency(self, weighted: bool = True) -> sparse.csr_matrix:
        indptr, indices, data = self.csr
        if not weighted:
            data = np.ones_like(data)
        return sparse.csr_matrix((data, indices, indptr), shape=(self.n_nodes, self.n_nodes))

    def edge_set(self) -> set:
        return set(map(tuple, self.edges.tolist()))

    def relabel(self, perm: np.ndarray) -> "LayerGraph":
        """Return the layer with node ``i`` renamed to ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        return LayerGraph(self.n_nodes, perm[self.edges], self.weights)

    def __eq__(self, other):
        if not isinstance(other, LayerGraph):
            return NotImplemented
        if self.n_nodes != other.n_nodes or not np.array_equal(self.edges, other.edges):
            return False
        if self.weights is None or other.weights is None:
            return self.weights is None and other.weights is None
        return np.array_equal(self.weights, other.weights)

    __hash__ = None

    def __repr__(self):
        kind = "weighted" if self.is_weighted else "unweighted"
        return f"LayerGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges}, {kind})"


@dataclass(frozen=True, eq=False)
class MultiplexNetwork:
    """``L`` node-aligned layers over a shared node set of size ``n_nodes``."""

    n_nodes: int
    layers: tuple
    layer_names: tuple = ()
    node_labels: Optional[dict] = field(default=None, repr=False)

    def __post_init__(self):
        layers = tuple(self.layers)
        if len(layers) == 0:
            raise ValidationError("zero layers")
        for layer in layers:
            if layer.n_nodes != self.n_nodes:
                raise ValidationError("all layers must share the same node count")
        names = tuple(self.layer_names) or tuple(str(i + 1) for i in range(len(layers)))
        if len(names) != len(layers):
            raise ValidationError("layer_names length does not match layer count")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "layer_names", tuple(str(n) for n in names))

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def __len__(self):
        return len(self.layers)

    def __getitem__(self, i) -> LayerGraph:
        return self.layers[i]

    def __iter__(self):
        return iter(self.layers)

    def subnetwork(self, indices: Sequence[int]) -> "MultiplexNetwork":
        return MultiplexNetwork(self.n_nodes, tuple(self.layers[i] for i in indices),
                                tuple(self.layer_names[i] for i in indices), self.node_labels)

    def __repr__(self):
        return f"MultiplexNetwork(n_nodes={self.n_nodes}, n_layers={self.n_layers})"


# ---------------------------------------------------------------------------
# Extended edge list I/O


def parse_multiplex(lines: Iterable[str]) -> MultiplexNetwork:
    """Parse ``layer_id node_a node_b [weight]`` lines.

    Layer and node tokens are arbitrary strings mapped to dense indices in
    first-seen order.  Duplicate edges collapse to one (weights summed when
    the layer is weighted).
    """
    layer_index: dict = {}
    node_index: dict = {}
    per_layer: list = []
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tok = s.split()
        if len(tok) not in (3, 4):
            raise ParseError(lineno, line, "expected 'layer node_a node_b [weight]'")
        w = None
        if len(tok) == 4:
            try:
                w = float(tok[3])
            except ValueError:
                raise ParseError(lineno, line, "weight is not a number") from None
            if not np.isfinite(w):
                raise ParseError(lineno, line, "weight is not finite")
            if w < 0:
                raise ValidationError(f"line {lineno}: negative weight {w}")
        if tok[1] == tok[2]:
            raise ParseError(lineno, line, "self-loop")
        li = layer_index.setdefault(tok[0], len(layer_index))
        if li == len(per_layer):
            per_layer.append(([], []))
        a = node_index.setdefault(tok[1], len(node_index))
        b = node_index.setdefault(tok[2], len(node_index))
        per_layer[li][0].append((a, b))
        per_layer[li][1].append(w)
    if not per_layer:
        raise ValidationError("zero layers")
    n = len(node_index)
    layers = []
    for pairs, ws in per_layer:
        # zero-weight lines are kept as explicit absences
        keep = [i for i, w in enumerate(ws) if w is None or w > 0]
        pairs = [pairs[i] for i in keep]
        ws = [ws[i] for i in keep]
        weighted = any(w is not None for w in ws)
        weights = [1.0 if w is None else w for w in ws] if weighted else None
        layers.append(LayerGraph(n, np.array(pairs, dtype=np.int64).reshape(-1, 2), weights))
    names = tuple(layer_index)
    return MultiplexNetwork(n, tuple(layers), names, dict(node_index))


def load_multiplex(path, format: str = "extended_edge_list") -> MultiplexNetwork:
    if format != "extended_edge_list":
        raise ValidationError(f"unsupported format {format!r}")
    with open(path) as fh:
        return parse_multiplex(fh)


def format_multiplex(net: MultiplexNetwork) -> str:
    labels = None
    if net.node_labels:
        labels = [None] * net.n_nodes
        for key, idx in net.node_labels.items():
            labels[idx] = key
    out = []
    for name, layer in zip(net.layer_names, net.layers):
        w = layer.weights
        for k, (u, v) in enumerate(layer.edges.tolist()):
            a, b = (labels[u], labels[v]) if labels else (u, v)
            if w is None:
                out.append(f"{name} {a} {b}")
            else:
                out.append(f"{name} {a} {b} {w[k]!r}")
    return "\n".join(out) + ("\n" if out else "")


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_multiplex(net: MultiplexNetwork, path) -> None:
    """Write ``net`` as an extended edge list.

    Isolated nodes that never appear in an edge cannot be represented and
    are dropped on reload.
    """
    atomic_write_text(path, format_multiplex(net))


# ---------------------------------------------------------------------------
# Components and GMCC


def as_node_mask(n_nodes: int, nodes) -> np.ndarray:
    if nodes is None:
        return np.ones(n_nodes, dtype=bool)
    nodes = np.asarray(nodes)
    if nodes.dtype == bool:
        if nodes.shape != (n_nodes,):
            raise ValidationError("boolean node mask has wrong length")
        return nodes.copy()
    mask = np.zeros(n_nodes, dtype=bool)
    if nodes.size:
        if nodes.min() < 0 or nodes.max() >= n_nodes:
            raise ValidationError("node id out of range")
        mask[nodes.astype(np.int64)] = True
    return mask


def _component_labels(n, u, v, keep):
    """Component label per node for the graph restricted to edges ``keep``."""
    uu, vv = u[keep], v[keep]
    adj = sparse.coo_matrix((np.ones(uu.shape[0], dtype=np.int8), (uu, vv)), shape=(n, n))
    return csgraph.connected_components(adj, directed=False)[1]


def connected_components(layer: LayerGraph, restrict=None) -> list:
    """Connected components of the subgraph induced by ``restrict``.

    Returns a list of sorted node arrays, ordered by smallest member.
    """
    mask = as_node_mask(layer.n_nodes, restrict)
    if not mask.any():
        return []
    u, v = layer.edges[:, 0], layer.edges[:, 1]
    labels = _component_labels(layer.n_nodes, u, v, mask[u] & mask[v])
    return _cells(labels, np.flatnonzero(mask))


def _cells(labels, nodes):
    # nodes ascending, so each cell comes out sorted and cells are
    # ordered by their smallest member
    _, first, inverse = np.unique(labels[nodes], return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    groups = rank[inverse]
    idx = np.argsort(groups, kind="stable")
    bounds = np.flatnonzero(np.diff(groups[idx])) + 1
    return np.split(nodes[idx], bounds)


def mutual_partition(net: MultiplexNetwork, surviving=None) -> np.ndarray:
    """Stable partition of ``surviving`` into mutually connected clusters.

    Returns an int array of cell ids per node, ``-1`` for nodes outside
    ``surviving``.  Nodes are repeatedly split by the tuple of their
    per-layer component ids, with components computed only over edges
    whose endpoints share a cell, until no cell splits further.
    """
    n = net.n_nodes
    mask = as_node_mask(n, surviving)
    cell = np.where(mask, 0, -1).astype(np.int64)
    return _refine(net, mask, cell)


def _edge_arrays(net):
    return [(layer.edges[:, 0], layer.edges[:, 1]) for layer in net.layers]


def _refine(net, mask, cell, edge_arrays=None):
    n = net.n_nodes
    if edge_arrays is None:
        edge_arrays = _edge_arrays(net)
    n_cells = len(np.unique(cell[mask])) if mask.any() else 0
    while True:
        keys = [cell[mask]]
        for u, v in edge_arrays:
            keep = mask[u] & mask[v] & (cell[u] == cell[v])
            keys.append(_component_labels(n, u, v, keep)[mask])
        _, new = np.unique(np.column_stack(keys), axis=0, return_inverse=True)
        new = new.reshape(-1)
        cell = np.full(n, -1, dtype=np.int64)
        cell[mask] = new
        count = int(new.max()) + 1 if new.size else 0
        if count == n_cells:
            return cell
        n_cells = count


def _largest_cell(cell, mask):
    nodes = np.flatnonzero(mask)
    if nodes.size == 0:
        return nodes
    labels = cell[nodes]
    ids, first, counts = np.unique(labels, return_index=True, return_counts=True)
    # tie-break: cell holding the smallest node id (nodes ascend)
    winners = counts == counts.max()
    chosen = ids[winners][np.argmin(first[winners])]
    return nodes[labels == chosen]


def gmcc(net: MultiplexNetwork, surviving=None) -> np.ndarray:
    """Giant mutually connected component within ``surviving``.

    Returns the sorted node ids of the largest set whose members are
    pairwise connected by paths inside the set in every layer.  Singletons
    count as size-1 components; ties go to the cell with the smallest id.
    """
    mask = as_node_mask(net.n_nodes, surviving)
    cell = mutual_partition(net, mask)
    return _largest_cell(cell, mask)


class MutualComponentTracker:
    """Incremental GMCC bookkeeping under node removal.

    Removing a node only changes the cell it belonged to, so only that cell
    is re-refined.
    """

    def __init__(self, net: MultiplexNetwork, surviving=None):
        self.net = net
        self._edges = _edge_arrays(net)
        self.alive = as_node_mask(net.n_nodes, surviving)
        self.cell = _refine(net, self.alive, np.where(self.alive, 0, -1).astype(np.int64),
                            self._edges)
        self._next = int(self.cell.max()) + 1 if self.alive.any() else 0
        self.sizes = {}
        for c, s in zip(*np.unique(self.cell[self.alive], return_counts=True)):
            self.sizes[int(c)] = int(s)

    def remove(self, node: int) -> None:
        if not self.alive[node]:
            raise ValidationError(f"node {node} already removed")
        c = int(self.cell[node])
        self.alive[node] = False
        self.cell[node] = -1
        self.sizes[c] -= 1
        if self.sizes[c] <= 1:
            if self.sizes[c] == 0:
                del self.sizes[c]
            return
        del self.sizes[c]
        sub = self.cell == c
        local = _refine(self.net, sub, np.where(sub, 0, -1).astype(np.int64), self._edges)
        ids, counts = np.unique(local[sub], return_counts=True)
        relabel = np.arange(self._next, self._next + ids.size)
        self._next += ids.size
        self.cell[sub] = relabel[local[sub]]
        for new_id, s in zip(relabel.tolist(), counts.tolist()):
            self.sizes[new_id] = s

    @property
    def largest_size(self) -> int:
        return max(self.sizes.values()) if self.sizes else 0

    def largest(self) -> np.ndarray:
        return _largest_cell(np.where(self.alive, self.cell, 0), self.alive)
