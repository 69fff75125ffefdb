"""Finite integer metric spaces."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Iterable, Sequence

import numpy as np

from .report import ValidationReport


class DisconnectedError(ValueError):
    """Raised by metric constructions on a disconnected graph.

    ``components`` lists the vertex partition so the caller can report it.
    """

    def __init__(self, components: list[list], message: str = "graph is disconnected"):
        super().__init__(f"{message}: {len(components)} components")
        self.components = components


class FiniteMetricSpace:
    """Points with a symmetric matrix of nonnegative integer distances."""

    def __init__(self, labels: Sequence[Hashable], dist):
        self.labels = list(labels)
        self.dist = np.asarray(dist, dtype=np.int64)
        n = len(self.labels)
        if self.dist.shape != (n, n):
            raise ValueError(f"distance matrix must be {n}x{n}, got {self.dist.shape}")
        self._index = None

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"FiniteMetricSpace({len(self)} points, diameter={self.diameter()})"

    def index(self, label) -> int:
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.labels)}
        return self._index[label]

    def d(self, i: int, j: int) -> int:
        return int(self.dist[i, j])

    def diameter(self) -> int:
        return int(self.dist.max()) if len(self) else 0

    def ball(self, i: int, r: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.dist[i] <= r)]

    def subspace(self, indices: Iterable[int]) -> "FiniteMetricSpace":
        idx = list(indices)
        return FiniteMetricSpace([self.labels[i] for i in idx], self.dist[np.ix_(idx, idx)])

    def set_diameter(self, points: Sequence[int]) -> int:
        if len(points) < 2:
            return 0
        idx = list(points)
        return int(self.dist[np.ix_(idx, idx)].max())

    def set_distance(self, a: Sequence[int], b: Sequence[int]) -> int:
        return int(self.dist[np.ix_(list(a), list(b))].min())

    def validate(self) -> ValidationReport:
        report = ValidationReport("metric")
        d = self.dist
        n = len(self)
        if (d < 0).any():
            report.add("nonnegative", (), "negative distance")
        if (np.diag(d) != 0).any():
            report.add("zero-diagonal", (), "nonzero self-distance")
        if not (d == d.T).all():
            i, j = np.argwhere(d != d.T)[0]
            report.add("symmetry", (int(i), int(j)), f"d({i},{j}) != d({j},{i})")
        off = d + np.eye(n, dtype=np.int64)
        if n and (off <= 0).any():
            i, j = np.argwhere(off <= 0)[0]
            report.add("separation", (int(i), int(j)), f"distinct points {i},{j} at distance 0")
        for k in range(n):
            via = d[:, k][:, None] + d[k, :][None, :]
            bad = np.argwhere(d > via)
            if len(bad):
                i, j = bad[0]
                report.add("triangle", (int(i), int(j), k), f"d({i},{j}) > d({i},{k}) + d({k},{j})")
                break
        return report

    @classmethod
    def from_graph(cls, labels: Sequence[Hashable], edges: Iterable[tuple[int, int]]) -> "FiniteMetricSpace":
        """Shortest-path metric of an undirected unit-length graph on ``range(len(labels))``."""
        n = len(labels)
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        comps = connected_components(adj)
        if len(comps) > 1:
            raise DisconnectedError([[labels[i] for i in c] for c in comps])
        dist = np.zeros((n, n), dtype=np.int64)
        for s in range(n):
            dist[s] = bfs_distances(adj, s)
        return cls(labels, dist)

    def to_dict(self) -> dict:
        return {"points": [str(x) for x in self.labels], "distances": self.dist.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteMetricSpace":
        points = [str(p) for p in data["points"]]
        if "distances" in data:
            return cls(points, data["distances"])
        index = {p: i for i, p in enumerate(points)}
        edges = [(index[str(u)], index[str(v)]) for u, v in data["edges"]]
        return cls.from_graph(points, edges)


def bfs_distances(adj: Sequence[Iterable[int]], source: int) -> np.ndarray:
    n = len(adj)
    out = np.full(n, -1, dtype=np.int64)
    out[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if out[v] < 0:
                out[v] = out[u] + 1
                queue.append(v)
    return out


def connected_components(adj: Sequence[Iterable[int]]) -> list[list[int]]:
    seen = [False] * len(adj)
    comps = []
    for s in range(len(adj)):
        if seen[s]:
            continue
        comp, queue = [], deque([s])
        seen[s] = True
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def path_space(n_points: int) -> FiniteMetricSpace:
    idx = np.arange(n_points)
    return FiniteMetricSpace(list(range(n_points)), np.abs(idx[:, None] - idx[None, :]))
