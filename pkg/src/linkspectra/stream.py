"""Core data model: relation spaces, graph slices, and link-stream matrices.

A link stream over a bounded integer window [t0, t0+T-1] is stored as a dense
T x M matrix whose row t is the weight function of the graph observed at time
t0+t and whose column k is the time series of relation e_k. The relation space
enumerates every directed vertex pair (self-loops included) in a fixed order;
when the relation count is not a power of two it is padded with inert
relations that carry exact zeros everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    if n <= 1:
        return 1
    return 1 << (n - 1).bit_length()


@dataclass(frozen=True)
class RelationSpace:
    """Ordered space of directed relations (u, v); ``None`` entries are inert pads.

    Invariants: relation indices form a bijection onto 0..M-1, the number of
    columns M is a power of two, and inert pads sit at the tail of the order.
    """

    num_vertices: int
    relations: tuple

    def __post_init__(self):
        if not is_power_of_two(len(self.relations)):
            raise ValueError(f"relation count {len(self.relations)} is not a power of two")
        seen = set()
        for rel in self.relations:
            if rel is None:
                continue
            u, v = rel
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"relation {rel} out of vertex range")
            if rel in seen:
                raise ValueError(f"duplicate relation {rel}")
            seen.add(rel)

    @property
    def num_relations(self) -> int:
        return len(self.relations)

    @cached_property
    def inert(self) -> np.ndarray:
        """Boolean mask of padding columns."""
        mask = np.array([rel is None for rel in self.relations], dtype=bool)
        mask.setflags(write=False)
        return mask

    @cached_property
    def num_active(self) -> int:
        return int((~self.inert).sum())

    @cached_property
    def _index(self) -> dict:
        return {rel: k for k, rel in enumerate(self.relations) if rel is not None}

    def index_of(self, u: int, v: int) -> int:
        try:
            return self._index[(u, v)]
        except KeyError:
            raise KeyError(f"relation ({u}, {v}) not in space") from None

    @cached_property
    def is_full(self) -> bool:
        """True when the relations are exactly V x V, lexicographic, pad-free."""
        n = self.num_vertices
        if self.num_relations != n * n or self.num_active != n * n:
            return False
        expected = [(u, v) for u in range(n) for v in range(n)]
        return list(self.relations) == expected

    def labels(self, names=None) -> list:
        """Relation labels ``u->v`` (pads labelled ``~padK``)."""
        out = []
        pad = 0
        for rel in self.relations:
            if rel is None:
                out.append(f"~pad{pad}")
                pad += 1
            else:
                u, v = rel
                su = names[u] if names is not None else str(u)
                sv = names[v] if names is not None else str(v)
                out.append(f"{su}->{sv}")
        return out


def full_space(num_vertices: int) -> RelationSpace:
    """All directed pairs over ``num_vertices`` vertices, lexicographic order.

    Pads with inert relations when num_vertices is not a power of two.
    """
    rels = [(u, v) for u in range(num_vertices) for v in range(num_vertices)]
    target = next_power_of_two(len(rels))
    rels.extend([None] * (target - len(rels)))
    return RelationSpace(num_vertices, tuple(rels))


def active_space(num_vertices: int, pairs) -> RelationSpace:
    """Restricted relation space (BFS mode), sorted lexicographically and padded."""
    rels = sorted(set((int(u), int(v)) for u, v in pairs))
    if not rels:
        raise ValueError("empty active relation set")
    target = next_power_of_two(len(rels))
    out = list(rels) + [None] * (target - len(rels))
    return RelationSpace(num_vertices, tuple(out))


def _as_weights(space: RelationSpace, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (space.num_relations,):
        raise ValueError(f"weights shape {w.shape} != ({space.num_relations},)")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if np.any(w[space.inert] != 0.0):
        raise ValueError("inert (padding) relations must carry zero weight")
    w = w.copy()
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class GraphSlice:
    """A single graph as a weight function over a relation space."""

    space: RelationSpace
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_weights(self.space, self.weights))

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(int(k) for k in np.nonzero(self.weights)[0])

    @property
    def edge_count(self) -> int:
        return len(self.edge_set)

    @cached_property
    def is_unweighted(self) -> bool:
        return bool(np.all((self.weights == 0.0) | (self.weights == 1.0)))

    def adjacency(self) -> np.ndarray:
        """Dense num_vertices x num_vertices adjacency (full spaces only)."""
        if not self.is_full_space():
            raise ValueError("adjacency requires a full relation space")
        n = self.space.num_vertices
        return self.weights[: n * n].reshape(n, n).copy()

    def is_full_space(self) -> bool:
        return self.space.is_full


def empty_slice(space: RelationSpace) -> GraphSlice:
    return GraphSlice(space, np.zeros(space.num_relations))


def slice_from_edges(space: RelationSpace, edges) -> GraphSlice:
    w = np.zeros(space.num_relations)
    for e in edges:
        k = e if isinstance(e, (int, np.integer)) else space.index_of(*e)
        w[k] = 1.0
    return GraphSlice(space, w)


def _check_pair(g1: GraphSlice, g2: GraphSlice):
    if g1.space is not g2.space and g1.space != g2.space:
        raise ValueError("graphs live in different relation spaces")
    if not (g1.is_unweighted and g2.is_unweighted):
        raise ValueError("distance is defined for unweighted graphs only")


def graph_dist(g1: GraphSlice, g2: GraphSlice) -> int:
    """Number of edges of g1 absent from g2: |E1| - |E1 n E2|."""
    _check_pair(g1, g2)
    a = g1.weights != 0.0
    b = g2.weights != 0.0
    return int(a.sum() - (a & b).sum())


def graph_edit(g1: GraphSlice, g2: GraphSlice) -> int:
    """Symmetric edit distance: number of differing edges."""
    return graph_dist(g1, g2) + graph_dist(g2, g1)


@dataclass(frozen=True)
class LinkStreamMatrix:
    """Dense T x M link-stream matrix over a contiguous integer time window.

    Row t is the graph at time ``t0 + t``; column k the series of relation k.
    ``unweighted`` is a validated flag: when set, all entries are 0/1.
    """

    space: RelationSpace
    t0: int
    values: np.ndarray = field(repr=False)
    unweighted: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[1] != self.space.num_relations:
            raise ValueError(f"values shape {vals.shape} incompatible with M={self.space.num_relations}")
        if vals.shape[0] < 1:
            raise ValueError("empty time window")
        if not np.all(np.isfinite(vals)):
            raise ValueError("stream values must be finite")
        if np.any(vals[:, self.space.inert] != 0.0):
            raise ValueError("inert (padding) columns must be zero")
        if self.unweighted and not np.all((vals == 0.0) | (vals == 1.0)):
            raise ValueError("unweighted stream must have 0/1 entries")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def num_times(self) -> int:
        return self.values.shape[0]

    @property
    def num_relations(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.t0, self.t0 + self.num_times)

    def _row(self, t: int) -> int:
        r = t - self.t0
        if not (0 <= r < self.num_times):
            raise ValueError(f"time {t} outside window [{self.t0}, {self.t0 + self.num_times - 1}]")
        return r

    def slice_at(self, t: int) -> GraphSlice:
        """Graph slice at time label t."""
        return GraphSlice(self.space, self.values[self._row(t)])

    def edge_series(self, k: int) -> np.ndarray:
        """Time series of relation k over the window."""
        if not (0 <= k < self.num_relations):
            raise ValueError(f"relation index {k} out of range")
        return self.values[:, k].copy()

    def slices(self):
        for t in self.times:
            yield self.slice_at(int(t))

    def aggregate_graph(self) -> GraphSlice:
        """Sum of all slices; the all-time aggregate used to fix a basis."""
        return GraphSlice(self.space, self.values.sum(axis=0))

    def with_values(self, values, unweighted: bool = False) -> "LinkStreamMatrix":
        return LinkStreamMatrix(self.space, self.t0, values, unweighted=unweighted)


def stream_from_slices(slices, t0: int = 0, unweighted: bool = False) -> LinkStreamMatrix:
    slices = list(slices)
    if not slices:
        raise ValueError("no slices given")
    space = slices[0].space
    vals = np.stack([s.weights for s in slices])
    return LinkStreamMatrix(space, t0, vals, unweighted=unweighted)


def restrict_stream(stream: LinkStreamMatrix, space: RelationSpace) -> LinkStreamMatrix:
    """Project a stream onto a restricted relation space (BFS mode).

    Every relation with activity must be present in the target space.
    """
    vals = np.zeros((stream.num_times, space.num_relations))
    kept = set()
    for k, rel in enumerate(space.relations):
        if rel is None:
            continue
        vals[:, k] = stream.values[:, stream.space.index_of(*rel)]
        kept.add(rel)
    for k, rel in enumerate(stream.space.relations):
        if rel is not None and rel not in kept and np.any(stream.values[:, k] != 0.0):
            raise ValueError(f"active relation {rel} is outside the restricted space")
    return LinkStreamMatrix(space, stream.t0, vals, unweighted=stream.unweighted)
