"""Bounded pieces of the development: balls around the base vertex, the
action of pi1 by left multiplication, R-stabilizers and word-metric balls."""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .metric import FiniteMetricSpace
from .scwol import Scwol
from .words import OrientedEdge, PathWord, Pi1Presentation, Undecided, enumerate_paths, outgoing


class DevelopmentInconsistent(Exception):
    """A coset identification could not be decided, or contradicts developability."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class DevVertex:
    """The vertex ``(g G_v, v)``; equality is decided by ``key`` alone."""

    key: tuple
    coset: PathWord = field(compare=False)
    vertex: int = field(compare=False)


def _key(p: Pi1Presentation, w: PathWord, budget: int | None) -> tuple:
    try:
        return p.coset_key(w, budget)
    except Undecided as exc:
        raise DevelopmentInconsistent(
            f"coset of {p.format(w)} could not be canonicalised: {exc}",
            {"word": p.format(w), "explored": exc.explored},
        ) from None


def dev_vertex(p: Pi1Presentation, w: PathWord, budget: int | None = None) -> DevVertex:
    if w.start != p.base:
        raise ValueError("development vertices are represented by paths from the base vertex")
    return DevVertex(_key(p, w, budget), w, w.end)


def _check_embeddings(p: Pi1Presentation) -> None:
    if p.dim >= 2:
        fq = p.finite_quotient()
        if fq is not None and not all(fq.local_injective):
            bad = [p.scwol.vertices[v] for v, ok in enumerate(fq.local_injective) if not ok]
            raise DevelopmentInconsistent(
                "local groups do not embed in the fundamental group; the complex is not developable",
                {"vertices": bad},
            )


def neighbours(p: Pi1Presentation, w: PathWord) -> list[tuple[PathWord, int, bool]]:
    """Adjacent development vertices of ``(w G_v, v)`` as ``(word, edge, outgoing)``.

    ``outgoing`` is true when the connecting edge starts at ``w``'s vertex.
    """
    v = w.end
    out = []
    for e in outgoing(p, v):
        if e.sign < 0:
            out.append((p.concat(w, p.edge_word(e)), e.edge, True))
        else:
            for k in sorted(set(p.coset_rep[e.edge])):
                out.append((p.concat(p.times(w, k), p.edge_word(e)), e.edge, False))
    return out


@dataclass
class DevBall:
    presentation: Pi1Presentation
    radius: int
    vertices: list[DevVertex]
    distance: list[int]
    edges: list[tuple[int, int, int]]  # (init index, term index, edge of Y)
    index: dict[tuple, int]

    @property
    def center(self) -> DevVertex:
        return self.vertices[0]

    @property
    def frontier(self) -> list[int]:
        return [i for i, d in enumerate(self.distance) if d == self.radius]

    def __len__(self) -> int:
        return len(self.vertices)

    def lookup(self, v: DevVertex) -> int | None:
        return self.index.get(v.key)

    def counts_by_distance(self) -> list[int]:
        out = [0] * (self.radius + 1)
        for d in self.distance:
            out[d] += 1
        return out

    def metric(self) -> FiniteMetricSpace:
        """Graph metric of the ball's skeleton (the induced subgraph)."""
        return FiniteMetricSpace.from_graph(self.labels(), [(i, t) for i, t, _ in self.edges])

    def labels(self) -> list[str]:
        p = self.presentation
        return [f"{p.format(v.coset)} @ {p.scwol.vertices[v.vertex]}" for v in self.vertices]

    def to_scwol(self) -> Scwol:
        """The enumerated cells as a scwol, compositions included where present."""
        p = self.presentation
        s = p.scwol
        vnames = [f"x{i}:{s.vertices[v.vertex]}" for i, v in enumerate(self.vertices)]
        enames = [f"d{k}:{s.edges[a]}" for k, (_, _, a) in enumerate(self.edges)]
        by_start = {(i, a): k for k, (i, _, a) in enumerate(self.edges)}
        comps = []
        for k_b, (ib, tb, b) in enumerate(self.edges):
            for (a, bb), ab in s.comp.items():
                if bb != b:
                    continue
                k_a, k_ab = by_start.get((tb, a)), by_start.get((ib, ab))
                if k_a is not None and k_ab is not None:
                    comps.append((enames[k_a], enames[k_b], enames[k_ab]))
        edges = [(enames[k], vnames[i], vnames[t]) for k, (i, t, _) in enumerate(self.edges)]
        return Scwol.build(vnames, edges, comps)

    def to_dict(self) -> dict:
        p = self.presentation
        s = p.scwol
        return {
            "radius": self.radius,
            "vertices": [
                {"id": i, "word": p.format(v.coset), "vertex": s.vertices[v.vertex], "distance": self.distance[i]}
                for i, v in enumerate(self.vertices)
            ],
            "edges": [{"init": i, "term": t, "edge": s.edges[a]} for i, t, a in self.edges],
        }

    def to_dot(self) -> str:
        s = self.presentation.scwol
        lines = ["digraph development {"]
        for i, v in enumerate(self.vertices):
            lines.append(f'  x{i} [label="{s.vertices[v.vertex]}\\n{self.distance[i]}"];')
        for i, t, a in self.edges:
            lines.append(f'  x{i} -> x{t} [label="{s.edges[a]}"];')
        lines.append("}")
        return "\n".join(lines)


def develop_ball(p: Pi1Presentation, radius: int, budget: int | None = None) -> DevBall:
    """All development vertices within skeleton distance ``radius`` of ``(G_base, base)``."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    _check_embeddings(p)
    center = dev_vertex(p, p.identity(), budget)
    vertices, distance, index = [center], [0], {center.key: 0}
    edges: dict[tuple[int, int], int] = {}  # (init index, edge) -> term index
    queue = deque([0])
    while queue:
        i = queue.popleft()
        v = vertices[i]
        seen_here: dict[tuple, tuple] = {}
        for w, a, out in neighbours(p, v.coset):
            key = _key(p, w, budget)
            tag = (a, out)
            if key in seen_here and seen_here[key] == tag:
                raise DevelopmentInconsistent(
                    "two transversal choices give the same neighbour; coset identifications contradict",
                    {"vertex": p.format(v.coset), "edge": p.scwol.edges[a]},
                )
            seen_here[key] = tag
            j = index.get(key)
            if j is None:
                if distance[i] == radius:
                    continue
                j = len(vertices)
                index[key] = j
                vertices.append(DevVertex(key, w, w.end))
                distance.append(distance[i] + 1)
                queue.append(j)
            pair = (i, j) if out else (j, i)
            prev = edges.get((pair[0], a))
            if prev is not None and prev != pair[1]:
                raise DevelopmentInconsistent(
                    "an edge of the development received two different terminal vertices",
                    {"edge": p.scwol.edges[a]},
                )
            edges[(pair[0], a)] = pair[1]
    edge_list = sorted((i, t, a) for (i, a), t in edges.items())
    return DevBall(p, radius, vertices, distance, edge_list, index)


def act(p: Pi1Presentation, g: PathWord, v: DevVertex, budget: int | None = None) -> DevVertex:
    """Left multiplication by a loop at the base vertex."""
    if g.start != p.base or g.end != p.base:
        raise ValueError("acting elements are loops at the base vertex")
    return dev_vertex(p, p.concat(g, v.coset), budget)


def edge_terms_well_defined(ball: DevBall, budget: int | None = None) -> list[tuple[int, int, int]]:
    """Edges whose term vertex depends on the coset representative (should be empty)."""
    p = ball.presentation
    s = p.scwol
    bad = []
    for i, t, a in ball.edges:
        w = ball.vertices[i].coset
        e = p.edge_word(OrientedEdge(a, -1))
        ref = _key(p, p.concat(w, e), budget)
        for h in range(p.group_at(s.init[a]).order):
            if _key(p, p.concat(p.times(w, h), e), budget) != ref:
                bad.append((i, a, h))
    return bad


# -- stabilizers and short-word checks ---------------------------------------


def _element(p: Pi1Presentation, w: PathWord, budget: int | None):
    return p.element_key(w, budget)


def r_stabilizer(p: Pi1Presentation, radius: int, budget: int | None = None, ball: DevBall | None = None) -> dict:
    """Elements moving the base vertex at most ``radius``: element key -> word."""
    ball = ball if ball is not None and ball.radius >= radius else develop_ball(p, radius, budget)
    out: dict = {}
    for v, d in zip(ball.vertices, ball.distance):
        if v.vertex != p.base or d > radius:
            continue
        for h in range(p.group_at(p.base).order):
            w = p.times(v.coset, h)
            out.setdefault(_element(p, w, budget), p.reduce(w, budget).word)
    return out


def short_elements(p: Pi1Presentation, radius: int, budget: int | None = None) -> tuple[dict, list[PathWord]]:
    """Elements with a certified reduced loop word of length at most ``radius``.

    Returns ``(element key -> reduced word, undecided words)``.
    """
    found: dict = {}
    undecided: list[PathWord] = []
    for k in range(radius + 1):
        for w in enumerate_paths(p, k, letters="transversal"):
            if w.end != p.base:
                continue
            try:
                r = p.reduce(w, budget)
            except Undecided:
                undecided.append(w)
                continue
            if r.word.path_length <= radius:
                found.setdefault(_element(p, r.word, budget), r.word)
    return found, undecided


@dataclass
class StabilizerReport:
    radius: int
    stabilizer_size: int
    short_size: int
    only_stabilizer: list[str]
    only_short: list[str]
    undecided: list[str]

    @property
    def ok(self) -> bool:
        return not self.only_stabilizer and not self.only_short

    def lines(self) -> list[str]:
        status = "ok" if self.ok else "MISMATCH"
        out = [
            f"R={self.radius}: |W_R|={self.stabilizer_size} |short words|={self.short_size} "
            f"undecided={len(self.undecided)} {status}"
        ]
        out += [f"  only in W_R: {w}" for w in self.only_stabilizer]
        out += [f"  only short: {w}" for w in self.only_short]
        out += [f"  undecided: {w}" for w in self.undecided]
        return out


def check_prop1(p: Pi1Presentation, radius: int, budget: int | None = None, ball: DevBall | None = None) -> StabilizerReport:
    """Compare the metric R-stabilizer with the set of elements of reduced length <= R."""
    stab = r_stabilizer(p, radius, budget, ball)
    short, undecided = short_elements(p, radius, budget)
    only_s = sorted(p.format(stab[k]) for k in stab.keys() - short.keys())
    only_w = sorted(p.format(short[k]) for k in short.keys() - stab.keys())
    return StabilizerReport(radius, len(stab), len(short), only_s, only_w, [p.format(w) for w in undecided])


def layer_decomposition(p: Pi1Presentation, layers: int, budget: int | None = None) -> list[dict]:
    """For j < ``layers``: every path word of length j+1 (all letters) equals
    ``u . e . g`` with u a length-j normal-form word, e an oriented edge at the
    end of u and g in the local group at the end of e."""
    out = []
    prev = {}
    for w in enumerate_paths(p, 0, letters="transversal"):
        prev[_element(p, w, budget)] = w
    for j in range(layers):
        extended = set()
        for u in prev.values():
            for e in outgoing(p, u.end):
                ue = p.concat(u, p.edge_word(e))
                for g in range(p.group_at(ue.end).order):
                    extended.add(_element(p, p.times(ue, g), budget))
        missing = []
        total = 0
        for w in enumerate_paths(p, j + 1, letters="all"):
            total += 1
            if _element(p, w, budget) not in extended:
                missing.append(p.format(w))
        out.append({"layer": j + 1, "words": total, "candidates": len(extended), "missing": missing})
        prev = {}
        for w in enumerate_paths(p, j + 1, letters="transversal"):
            prev.setdefault(_element(p, w, budget), w)
    return out


def word_bfs_vertex_counts(p: Pi1Presentation, radius: int, budget: int | None = None) -> list[int]:
    """Development vertices by distance, from exhaustive enumeration of all path words."""
    first: dict = {}
    for k in range(radius + 1):
        for w in enumerate_paths(p, k, letters="all", final="identity"):
            first.setdefault(p.coset_key(w, budget), k)
    counts = [0] * (radius + 1)
    for d in first.values():
        counts[d] += 1
    return counts


# -- word-metric balls -----------------------------------------------------


@dataclass
class GroupBall:
    presentation: Pi1Presentation
    radius: int
    words: list[PathWord]
    norms: list[int]
    space: FiniteMetricSpace
    generators: list[PathWord]


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SCWOLTOOL_WORKERS", "1")))
    except ValueError:
        return 1


def _layers(p: Pi1Presentation, gens: list[PathWord], radius: int, budget: int | None):
    keys = {_element(p, p.identity(), budget): 0}
    words = [p.identity()]
    norms = [0]
    frontier = [0]
    for r in range(1, radius + 1):
        nxt = []
        for i in frontier:
            for g in gens:
                w = p.reduce(p.concat(words[i], g), budget).word
                k = _element(p, w, budget)
                if k not in keys:
                    keys[k] = len(words)
                    words.append(w)
                    norms.append(r)
                    nxt.append(keys[k])
        frontier = nxt
    return keys, words, norms


def _distance_rows(args) -> list[list[int]]:
    p, words, lo, hi, keys, norms, budget = args
    rows = []
    for i in range(lo, hi):
        inv = p.inverse(words[i])
        row = []
        for w in words:
            k = _element(p, p.concat(inv, w), budget)
            row.append(norms[keys[k]])
        rows.append(row)
    return rows


def generating_set(p: Pi1Presentation, budget: int | None = None) -> list[PathWord]:
    """Nontrivial local elements and non-tree oriented edges, as distinct nontrivial elements."""
    seen = {_element(p, p.identity(), budget)}
    out = []
    for g in p.generators():
        r = p.reduce(g, budget).word
        k = _element(p, r, budget)
        if k not in seen:
            seen.add(k)
            out.append(r)
    return out


def group_ball(p: Pi1Presentation, radius: int, budget: int | None = None, workers: int | None = None) -> GroupBall:
    """Ball of the word metric around the identity, with exact pairwise distances."""
    try:
        gens = generating_set(p, budget)
        keys, words, norms = _layers(p, gens, 2 * radius, budget)
    except Undecided as exc:
        raise DevelopmentInconsistent(f"equality undecided while growing the group ball: {exc}") from None
    n = sum(1 for x in norms if x <= radius)
    inner = words[:n]
    workers = workers or _workers()
    chunks = [(lo, min(n, lo + max(1, n // workers))) for lo in range(0, n, max(1, n // workers))]
    args = [(p, inner, lo, hi, keys, norms, budget) for lo, hi in chunks]
    if workers > 1 and n > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_distance_rows, args))
    else:
        parts = [_distance_rows(a) for a in args]
    dist = np.array([row for part in parts for row in part], dtype=np.int64).reshape(n, n)
    labels = [p.format(w) for w in inner]
    return GroupBall(p, radius, inner, norms[:n], FiniteMetricSpace(labels, dist), gens)


def subspace_of(ball: GroupBall, keys: Iterable) -> FiniteMetricSpace:
    """Restrict a group ball to the given element keys (all must lie in the ball)."""
    p = ball.presentation
    pos = {p.element_key(w): i for i, w in enumerate(ball.words)}
    idx = sorted(pos[k] for k in keys)
    return ball.space.subspace(idx)
