"""Directed weighted networks over panel nodes and their stage neighbourhoods."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataFormatError, LookupFailure, ParseError, ValidationError


def _row_normalize(raw: np.ndarray) -> np.ndarray:
    sums = raw.sum(axis=1, keepdims=True)
    out = np.zeros_like(raw)
    np.divide(raw, sums, out=out, where=sums > 0)
    return out


@dataclass(frozen=True, eq=False)
class Network:
    """Directed graph with nonnegative edge weights.

    ``raw[i, q] > 0`` encodes an edge ``i -> q``.  ``weights`` are the
    row-normalised connection weights, so every node with an out-edge has
    weights summing to one.
    """

    nodes: tuple[str, ...]
    raw: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(str(n) for n in self.nodes)
        raw = np.array(self.raw, dtype=float, copy=True)
        n = len(nodes)
        if raw.shape != (n, n):
            raise ValidationError(f"weight matrix shape {raw.shape} does not match {n} nodes")
        if not np.all(np.isfinite(raw)):
            raise ValidationError("non-finite edge weight")
        if np.any(raw < 0):
            i, q = np.argwhere(raw < 0)[0]
            raise ValidationError(f"negative weight on edge {nodes[i]} -> {nodes[q]}")
        if np.any(np.diag(raw) != 0):
            i = int(np.flatnonzero(np.diag(raw))[0])
            raise ValidationError(f"self-loop at node {nodes[i]}")
        if len(set(nodes)) != n:
            raise ValidationError("duplicated node names")
        raw.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "raw", raw)

    @property
    def N(self) -> int:
        return len(self.nodes)

    @cached_property
    def weights(self) -> np.ndarray:
        w = _row_normalize(self.raw)
        w.setflags(write=False)
        return w

    def node_index(self, node) -> int:
        if isinstance(node, (int, np.integer)) and not isinstance(node, bool):
            if 0 <= node < self.N:
                return int(node)
            raise LookupFailure(f"node index {node} out of range")
        try:
            return self.nodes.index(str(node))
        except ValueError:
            raise LookupFailure(f"unknown node {node!r}") from None

    @cached_property
    def stages(self) -> tuple[tuple[frozenset, ...], ...]:
        """Per node, the tuple of stage sets (stage 1 first) as node indices."""
        adj = [np.flatnonzero(self.raw[i] > 0) for i in range(self.N)]
        out = []
        for i in range(self.N):
            seen = {i}
            frontier = {i}
            layers = []
            while True:
                nxt = {int(q) for a in frontier for q in adj[a]} - seen
                if not nxt:
                    break
                layers.append(frozenset(nxt))
                seen |= nxt
                frontier = nxt
            out.append(tuple(layers))
        return tuple(out)

    @property
    def max_stage(self) -> int:
        return max((len(s) for s in self.stages), default=0)

    def neighbourhood(self, node, r: int) -> frozenset:
        """Indices of nodes first reached from ``node`` after exactly ``r`` hops."""
        if r < 1:
            raise ValidationError("stage must be >= 1")
        layers = self.stages[self.node_index(node)]
        return layers[r - 1] if r <= len(layers) else frozenset()

    def neighbourhood_names(self, node, r: int) -> set[str]:
        return {self.nodes[q] for q in self.neighbourhood(node, r)}

    def stage_matrix(self, r: int) -> np.ndarray:
        """Weight matrix for stage ``r``.

        Stage one uses the normalised edge weights.  Higher stages have no
        direct edges to draw weights from, so members of each stage set are
        weighted equally.
        """
        key = ("stage", r)
        if key not in self._cache:
            if r == 1:
                w = np.array(self.weights)
            else:
                w = np.zeros((self.N, self.N))
                for i, layers in enumerate(self.stages):
                    if r <= len(layers):
                        members = sorted(layers[r - 1])
                        w[i, members] = 1.0 / len(members)
            w.setflags(write=False)
            self._cache[key] = w
        return self._cache[key]


def normalize_weights(net: Network) -> Network:
    """Network whose raw weights are already row-normalised."""
    return Network(net.nodes, net.weights)


def renormalize_for_missing(net: Network, observed_now: Iterable) -> Network:
    """Drop edges into unobserved nodes and rescale each surviving row to sum to one."""
    keep = np.zeros(net.N, dtype=bool)
    for node in observed_now:
        keep[net.node_index(node)] = True
    w = np.where(keep[None, :], net.weights, 0.0)
    return Network(net.nodes, _row_normalize(w))


def _check_exports(exports, nodes) -> tuple[np.ndarray, tuple[str, ...]]:
    e = np.asarray(exports, dtype=float)
    if e.ndim != 2 or e.shape[0] != e.shape[1]:
        raise ValidationError("export matrix must be square")
    if nodes is None:
        nodes = tuple(str(k) for k in range(e.shape[0]))
    if len(nodes) != e.shape[0]:
        raise ValidationError("node names do not match export matrix size")
    if np.any(e < 0):
        raise ValidationError("negative export quantity")
    if np.any(np.diag(e) != 0):
        raise ValidationError("export matrix must have a zero diagonal")
    return e, tuple(nodes)


def build_fully_connected(exports, nodes: Sequence[str] | None = None) -> Network:
    """Edge ``i -> j`` for every ``i != j`` weighted by exports from ``i`` to ``j``."""
    e, nodes = _check_exports(exports, nodes)
    return normalize_weights(Network(nodes, e))


def build_nearest_neighbour(exports, nodes: Sequence[str] | None = None, allow_ties: bool = False) -> Network:
    """Single out-edge from each node to its largest export partner."""
    e, nodes = _check_exports(exports, nodes)
    n = len(nodes)
    raw = np.zeros((n, n))
    for i in range(n):
        row = e[i]
        top = row.max() if n > 1 else 0.0
        if not top > 0:
            raise ValidationError(f"node {nodes[i]!r} has no positive export partner")
        winners = np.flatnonzero(row == top)
        if len(winners) > 1 and not allow_ties:
            names = ", ".join(nodes[k] for k in winners)
            raise ValidationError(f"tied maximum export partner for {nodes[i]!r}: {names}")
        raw[i, winners[0]] = 1.0
    return Network(nodes, raw)


def from_edges(nodes: Sequence[str], edges: Iterable[tuple], normalize: bool = True) -> Network:
    nodes = tuple(nodes)
    idx = {n: k for k, n in enumerate(nodes)}
    raw = np.zeros((len(nodes), len(nodes)))
    for edge in edges:
        src, dst = edge[0], edge[1]
        w = float(edge[2]) if len(edge) > 2 else 1.0
        try:
            raw[idx[src], idx[dst]] += w
        except KeyError as exc:
            raise LookupFailure(f"edge references unknown node {exc.args[0]!r}") from None
    net = Network(nodes, raw)
    return normalize_weights(net) if normalize else net


def load_edges_csv(path, nodes: Sequence[str]) -> Network:
    """Read ``source,target,weight`` rows."""
    edges = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        if header[:2] != ["source", "target"]:
            raise DataFormatError(f"{path}: expected header source,target[,weight]")
        for lineno, row in enumerate(reader, start=2):
            if not any(c.strip() for c in row):
                continue
            try:
                w = float(row[2]) if len(row) > 2 and row[2].strip() else 1.0
            except ValueError:
                raise ParseError(f"{path}: row {lineno}: bad weight {row[2]!r}") from None
            edges.append((row[0].strip(), row[1].strip(), w))
    return from_edges(nodes, edges)


def load_exports_csv(path, nodes: Sequence[str] | None = None) -> tuple[np.ndarray, tuple[str, ...]]:
    """Read an N x N export matrix with node names on the first row and column.

    When ``nodes`` is given the matrix is reordered to match it.
    """
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if any(c.strip() for c in r)]
    if not rows:
        raise DataFormatError(f"{path}: empty export file")
    cols = [c.strip() for c in rows[0][1:]]
    names = [r[0].strip() for r in rows[1:]]
    if cols != names:
        raise DataFormatError(f"{path}: row and column node names differ")
    try:
        mat = np.array([[float(c) if c.strip() else 0.0 for c in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if nodes is not None:
        try:
            idx = [names.index(n) for n in nodes]
        except ValueError as exc:
            raise LookupFailure(f"{path}: {exc}") from None
        mat = mat[np.ix_(idx, idx)]
        names = list(nodes)
    return mat, tuple(names)


def save_edges_csv(net: Network, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source", "target", "weight"])
        for i, q in zip(*np.nonzero(net.raw)):
            w.writerow([net.nodes[i], net.nodes[q], format(float(net.raw[i, q]), ".17g")])


def five_net() -> Network:
    """The undirected five-node benchmark network, stored as edges in both directions."""
    adjacency = {1: (4, 5), 2: (3, 4), 3: (2,), 4: (1, 2, 5), 5: (1, 4)}
    nodes = tuple(str(k) for k in range(1, 6))
    edges = [(str(i), str(j)) for i, js in adjacency.items() for j in js]
    return from_edges(nodes, edges)
