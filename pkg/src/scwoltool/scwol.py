"""Small categories without loops (scwols), group actions on them, and quotients.

A scwol has vertices and edges, each edge ``a`` running from ``init[a]`` to
``term[a]``, and a composition ``comp[(a, b)]`` defined whenever
``init[a] == term[b]``.  Vertices and edges are dense integer indices; names
are kept for display and file round trips.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .groups import FiniteGroup, trivial_group
from .metric import FiniteMetricSpace, connected_components
from .report import ValidationReport


class ScwolError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Scwol:
    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    init: tuple[int, ...]
    term: tuple[int, ...]
    comp: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.init) != len(self.edges) or len(self.term) != len(self.edges):
            raise ScwolError("init/term must have one entry per edge")
        nv = len(self.vertices)
        if any(not 0 <= v < nv for v in self.init + self.term):
            raise ScwolError("edge endpoint outside the vertex set")
        ne = len(self.edges)
        for (a, b), c in self.comp.items():
            if not (0 <= a < ne and 0 <= b < ne and 0 <= c < ne):
                raise ScwolError("composition refers to an unknown edge")
        if len(set(self.vertices)) != nv or len(set(self.edges)) != ne:
            raise ScwolError("vertex and edge names must be unique")

    @classmethod
    def build(
        cls,
        vertices: Sequence[str],
        edges: Iterable[tuple[str, str, str]] = (),
        compositions: Iterable[tuple[str, str, str]] = (),
    ) -> "Scwol":
        """Build from names: ``edges`` are ``(id, init, term)``, compositions ``(a, b, ab)``."""
        vertices = [str(v) for v in vertices]
        vidx = {v: i for i, v in enumerate(vertices)}
        names, init, term = [], [], []
        for e, i, t in edges:
            try:
                init.append(vidx[str(i)])
                term.append(vidx[str(t)])
            except KeyError as exc:
                raise ScwolError(f"edge {e} refers to unknown vertex {exc.args[0]}") from None
            names.append(str(e))
        eidx = {e: i for i, e in enumerate(names)}
        comp = {}
        for a, b, ab in compositions:
            try:
                comp[(eidx[str(a)], eidx[str(b)])] = eidx[str(ab)]
            except KeyError as exc:
                raise ScwolError(f"composition refers to unknown edge {exc.args[0]}") from None
        return cls(tuple(vertices), tuple(names), tuple(init), tuple(term), comp)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex_index(self, name: str) -> int:
        try:
            return self.vertices.index(str(name))
        except ValueError:
            raise ScwolError(f"unknown vertex {name!r}") from None

    def edge_index(self, name: str) -> int:
        try:
            return self.edges.index(str(name))
        except ValueError:
            raise ScwolError(f"unknown edge {name!r}") from None

    def composable_pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n_edges) for b in range(self.n_edges) if self.init[a] == self.term[b]]

    def edges_from(self, v: int) -> list[int]:
        return [a for a in range(self.n_edges) if self.init[a] == v]

    def edges_into(self, v: int) -> list[int]:
        return [a for a in range(self.n_edges) if self.term[a] == v]

    def skeleton_adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in self.vertices]
        for a in range(self.n_edges):
            i, t = self.init[a], self.term[a]
            if i != t:
                adj[i].add(t)
                adj[t].add(i)
        return adj

    def components(self) -> list[list[int]]:
        return connected_components(self.skeleton_adjacency())

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[e, self.vertices[self.init[a]], self.vertices[self.term[a]]] for a, e in enumerate(self.edges)],
            "compositions": [
                [self.edges[a], self.edges[b], self.edges[c]] for (a, b), c in sorted(self.comp.items())
            ],
        }


def graph_scwol(nodes: Sequence[str], graph_edges: Sequence[tuple[str, str]], midpoint: str = "m{}") -> Scwol:
    """The one-dimensional scwol of a graph: graph vertices become sinks and a
    source is placed at the midpoint of every graph edge."""
    vertices = [str(v) for v in nodes]
    edges = []
    for k, (u, v) in enumerate(graph_edges):
        m = midpoint.format(k)
        vertices.append(m)
        edges.append((f"{m}>{u}", m, str(u)))
        edges.append((f"{m}>{v}", m, str(v)))
    return Scwol.build(vertices, edges)


# -- validation -----------------------------------------------------------


def validate_scwol(s: Scwol) -> ValidationReport:
    report = ValidationReport("scwol")
    E = s.edges
    for a in range(s.n_edges):
        if s.init[a] == s.term[a]:
            report.add("no-loops", (E[a],), f"edge {E[a]} has init = term = {s.vertices[s.init[a]]}")
    composable = set(s.composable_pairs())
    for (a, b), c in sorted(s.comp.items()):
        if (a, b) not in composable:
            report.add("comp-domain", (E[a], E[b]), f"comp({E[a]},{E[b]}) defined but i({E[a]}) != t({E[b]})")
            continue
        if s.init[c] != s.init[b] or s.term[c] != s.term[a]:
            report.add(
                "comp-endpoints",
                (E[a], E[b], E[c]),
                f"{E[c]} = {E[a]}{E[b]} must run from i({E[b]}) to t({E[a]})",
            )
    for a, b in sorted(composable):
        if (a, b) not in s.comp:
            report.add("comp-total", (E[a], E[b]), f"composable pair ({E[a]},{E[b]}) has no composition")
    for a, b in sorted(composable):
        for c in range(s.n_edges):
            if s.init[b] != s.term[c]:
                continue
            bc, ab = s.comp.get((b, c)), s.comp.get((a, b))
            if bc is None or ab is None:
                continue
            left, right = s.comp.get((a, bc)), s.comp.get((ab, c))
            if left is not None and right is not None and left != right:
                report.add(
                    "associativity",
                    (E[a], E[b], E[c]),
                    f"{E[a]}({E[b]}{E[c]}) = {E[left]} but ({E[a]}{E[b]}){E[c]} = {E[right]}",
                )
    return report


def composable_sequences(s: Scwol, k: int) -> list[tuple[int, ...]]:
    """E^(k): tuples ``(a1..ak)`` with ``init[a_j] == term[a_{j+1}]``.

    For ``k == 0`` the result is the vertex set, as one-tuples of vertex indices.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return [(v,) for v in range(s.n_vertices)]
    seqs = [(a,) for a in range(s.n_edges)]
    for _ in range(k - 1):
        seqs = [seq + (b,) for seq in seqs for b in range(s.n_edges) if s.init[seq[-1]] == s.term[b]]
    return seqs


def dimension(s: Scwol) -> int:
    k = 0
    # a valid scwol cannot repeat a vertex along a composable sequence
    while k < s.n_vertices and composable_sequences(s, k + 1):
        k += 1
    return k


def skeleton_edges(s: Scwol) -> list[tuple[int, int]]:
    return sorted({tuple(sorted((s.init[a], s.term[a]))) for a in range(s.n_edges) if s.init[a] != s.term[a]})


def one_skeleton(s: Scwol) -> FiniteMetricSpace:
    """Unit-length graph metric on the vertices, one graph edge per scwol edge.

    Raises :class:`~scwoltool.metric.DisconnectedError` carrying the components.
    """
    return FiniteMetricSpace.from_graph(list(s.vertices), skeleton_edges(s))


# -- actions --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScwolAction:
    """A left action: ``vertex_perm[g][v]`` is ``g.v`` and likewise for edges."""

    group: FiniteGroup
    vertex_perm: tuple[tuple[int, ...], ...]
    edge_perm: tuple[tuple[int, ...], ...]

    @classmethod
    def trivial(cls, s: Scwol, group: FiniteGroup | None = None) -> "ScwolAction":
        group = group or trivial_group()
        return cls(
            group,
            tuple(tuple(range(s.n_vertices)) for _ in range(group.order)),
            tuple(tuple(range(s.n_edges)) for _ in range(group.order)),
        )

    @classmethod
    def from_generators(
        cls,
        s: Scwol,
        group: FiniteGroup,
        gen_maps: Mapping[int, tuple[Mapping[int, int], Mapping[int, int]]],
    ) -> "ScwolAction":
        """Close partial generator permutations (unlisted points fixed) over the group.

        Inconsistent data (not a homomorphism) raises ScwolError.
        """
        def full(mapping: Mapping[int, int], n: int) -> tuple[int, ...]:
            return tuple(mapping.get(x, x) for x in range(n))

        gens = {g: (full(vm, s.n_vertices), full(em, s.n_edges)) for g, (vm, em) in gen_maps.items()}
        vp: list[tuple[int, ...] | None] = [None] * group.order
        ep: list[tuple[int, ...] | None] = [None] * group.order
        vp[0], ep[0] = tuple(range(s.n_vertices)), tuple(range(s.n_edges))
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g, (gv, ge) in gens.items():
                    y = group.mul[x][g]
                    # (x*g).v = x.(g.v)
                    cv = tuple(vp[x][gv[v]] for v in range(s.n_vertices))  # type: ignore[index]
                    ce = tuple(ep[x][ge[a]] for a in range(s.n_edges))  # type: ignore[index]
                    if vp[y] is None:
                        vp[y], ep[y] = cv, ce
                        nxt.append(y)
                    elif vp[y] != cv or ep[y] != ce:
                        raise ScwolError("generator permutations do not define a group action")
            frontier = nxt
        if any(p is None for p in vp):
            raise ScwolError("the listed generators do not generate the acting group")
        return cls(group, tuple(vp), tuple(ep))  # type: ignore[arg-type]


def validate_action(s: Scwol, act: ScwolAction) -> ValidationReport:
    report = ValidationReport("action")
    G = act.group
    names = G.names
    nv, ne = s.n_vertices, s.n_edges
    for g in range(G.order):
        if sorted(act.vertex_perm[g]) != list(range(nv)) or sorted(act.edge_perm[g]) != list(range(ne)):
            report.add("permutation", (names[g],), f"{names[g]} does not act by a permutation")
            return report
    if act.vertex_perm[0] != tuple(range(nv)) or act.edge_perm[0] != tuple(range(ne)):
        report.add("identity", (), "identity element acts nontrivially")
    for g, h in itertools.product(range(G.order), repeat=2):
        gh = G.mul[g][h]
        vg, vh, vgh = act.vertex_perm[g], act.vertex_perm[h], act.vertex_perm[gh]
        eg, eh, egh = act.edge_perm[g], act.edge_perm[h], act.edge_perm[gh]
        if any(vgh[v] != vg[vh[v]] for v in range(nv)) or any(egh[a] != eg[eh[a]] for a in range(ne)):
            report.add("homomorphism", (names[g], names[h]), f"({names[g]}{names[h]}). != {names[g]}.({names[h]}.)")
            break
    for g in range(G.order):
        vg, eg = act.vertex_perm[g], act.edge_perm[g]
        for a in range(ne):
            ga = eg[a]
            if vg[s.init[a]] != s.init[ga] or vg[s.term[a]] != s.term[ga]:
                report.add("equivariance", (names[g], s.edges[a]), f"{names[g]} does not commute with i/t on {s.edges[a]}")
            if vg[s.init[a]] == s.term[a]:
                report.add("no-inversion", (names[g], s.edges[a]), f"{names[g]}.i({s.edges[a]}) = t({s.edges[a]})")
            if vg[s.init[a]] == s.init[a] and ga != a:
                report.add(
                    "rigidity",
                    (names[g], s.edges[a]),
                    f"{names[g]} fixes i({s.edges[a]}) but moves {s.edges[a]} to {s.edges[ga]}",
                )
        for (a, b), c in s.comp.items():
            if (eg[a], eg[b]) in s.comp and s.comp[(eg[a], eg[b])] != eg[c]:
                report.add("equivariance", (names[g], s.edges[a], s.edges[b]), f"{names[g]} does not commute with composition")
    return report


@dataclass(frozen=True, eq=False)
class Quotient:
    scwol: Scwol
    vertex_proj: tuple[int, ...]
    edge_proj: tuple[int, ...]
    vertex_reps: tuple[int, ...]
    edge_reps: tuple[int, ...]


def _orbits(perms: Sequence[Sequence[int]], n: int) -> tuple[list[int], list[int]]:
    """Orbit index per point, orbits numbered by their least element; and the reps."""
    proj = [-1] * n
    reps = []
    for x in range(n):
        if proj[x] < 0:
            k = len(reps)
            reps.append(x)
            for p in perms:
                proj[p[x]] = k
    return proj, reps


def quotient(s: Scwol, act: ScwolAction) -> Quotient:
    report = validate_action(s, act)
    if not report.ok:
        raise ScwolError("invalid action: " + "; ".join(str(v) for v in report.violations))
    vproj, vreps = _orbits(act.vertex_perm, s.n_vertices)
    eproj, ereps = _orbits(act.edge_perm, s.n_edges)
    vnames = tuple(_orbit_name(s.vertices, vproj, k) for k in range(len(vreps)))
    enames = tuple(_orbit_name(s.edges, eproj, k) for k in range(len(ereps)))
    init = tuple(vproj[s.init[a]] for a in ereps)
    term = tuple(vproj[s.term[a]] for a in ereps)
    comp: dict[tuple[int, int], int] = {}
    for (a, b), c in s.comp.items():
        key = (eproj[a], eproj[b])
        if comp.setdefault(key, eproj[c]) != eproj[c]:
            raise ScwolError(f"composition not well defined on orbits {key}")
    q = Scwol(vnames, enames, init, term, comp)
    return Quotient(q, tuple(vproj), tuple(eproj), tuple(vreps), tuple(ereps))


def _orbit_name(names: Sequence[str], proj: Sequence[int], k: int) -> str:
    members = [names[x] for x in range(len(names)) if proj[x] == k]
    return members[0] if len(members) == 1 else "[" + "|".join(members) + "]"


# -- isomorphism ----------------------------------------------------------


def find_isomorphism(s1: Scwol, s2: Scwol) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Backtracking search for ``(vertex_map, edge_map)`` preserving i, t and comp."""
    if (s1.n_vertices, s1.n_edges, len(s1.comp)) != (s2.n_vertices, s2.n_edges, len(s2.comp)):
        return None

    def signature(s: Scwol, v: int) -> tuple[int, int]:
        return (len(s.edges_from(v)), len(s.edges_into(v)))

    sig1 = [signature(s1, v) for v in range(s1.n_vertices)]
    sig2 = [signature(s2, v) for v in range(s2.n_vertices)]
    if sorted(sig1) != sorted(sig2):
        return None
    between2: dict[tuple[int, int], list[int]] = {}
    for a in range(s2.n_edges):
        between2.setdefault((s2.init[a], s2.term[a]), []).append(a)
    between1: dict[tuple[int, int], list[int]] = {}
    for a in range(s1.n_edges):
        between1.setdefault((s1.init[a], s1.term[a]), []).append(a)

    vmap: list[int] = [-1] * s1.n_vertices
    used = [False] * s2.n_vertices

    def edges_ok(v: int) -> bool:
        for (i, t), es in between1.items():
            if vmap[i] >= 0 and vmap[t] >= 0 and (i == v or t == v):
                if len(between2.get((vmap[i], vmap[t]), [])) != len(es):
                    return False
        return True

    def match_edges() -> tuple[int, ...] | None:
        emap = [-1] * s1.n_edges
        eused = [False] * s2.n_edges
        order = list(range(s1.n_edges))

        def rec(k: int) -> bool:
            if k == len(order):
                return all(s2.comp.get((emap[a], emap[b])) == emap[c] for (a, b), c in s1.comp.items())
            a = order[k]
            for b in between2.get((vmap[s1.init[a]], vmap[s1.term[a]]), []):
                if not eused[b]:
                    emap[a], eused[b] = b, True
                    if rec(k + 1):
                        return True
                    emap[a], eused[b] = -1, False
            return False

        return tuple(emap) if rec(0) else None

    result: list = []

    def assign(v: int) -> bool:
        if v == s1.n_vertices:
            em = match_edges()
            if em is not None:
                result.append((tuple(vmap), em))
                return True
            return False
        for w in range(s2.n_vertices):
            if not used[w] and sig2[w] == sig1[v]:
                vmap[v], used[w] = w, True
                if edges_ok(v) and assign(v + 1):
                    return True
                vmap[v], used[w] = -1, False
        return False

    return result[0] if assign(0) else None


def to_dot(s: Scwol, name: str = "scwol", labels: Sequence[str] | None = None) -> str:
    labels = labels or s.vertices
    lines = [f"digraph {_dot_id(name)} {{"]
    for v, lab in enumerate(labels):
        lines.append(f'  v{v} [label="{_dot_escape(lab)}"];')
    for a in range(s.n_edges):
        lines.append(f'  v{s.init[a]} -> v{s.term[a]} [label="{_dot_escape(s.edges[a])}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def skeleton_dot(s: Scwol, name: str = "skeleton") -> str:
    lines = [f"graph {_dot_id(name)} {{"]
    for v, lab in enumerate(s.vertices):
        lines.append(f'  v{v} [label="{_dot_escape(lab)}"];')
    for u, v in skeleton_edges(s):
        lines.append(f"  v{u} -- v{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_id(name: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in name) or "g"


def _dot_escape(text: str) -> str:
    return str(text).replace("\\", "\\\\").replace('"', '\\"')
