"""Words in FG(Y): G(Y)-paths, their reduction, and equality in the fundamental group.

A path word ``g0 e1 g1 ... ek gk`` starts at a vertex of Y, each ``e_j`` is an
oriented edge and each ``g_j`` a local-group element at the vertex reached.
Orientation follows the usual convention: ``a+`` runs from t(a) to i(a) and
``a-`` from i(a) to t(a).  The relations used are

* ``psi_a(g) = a+ g a-`` for g in G_{i(a)},
* ``a+ b+ = g_{a,b} (ab)+`` for composable (a, b),

plus ``a+ = 1`` for edges of a maximal tree when passing to pi1(G(Y), T).
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .complex import ComplexOfGroups
from .metric import DisconnectedError
from .scwol import Scwol, dimension

DEFAULT_BUDGET = 50_000


class Undecided(Exception):
    """A rewriting search ran out of budget, or no exact decision procedure applies."""

    def __init__(self, message: str, best: "PathWord | None" = None, explored: int = 0):
        super().__init__(message)
        self.best = best
        self.explored = explored


class WordError(ValueError):
    pass


class OrientedEdge(NamedTuple):
    edge: int
    sign: int  # +1 for a+, -1 for a-

    def inverse(self) -> "OrientedEdge":
        return OrientedEdge(self.edge, -self.sign)


def edge_source(s: Scwol, e: OrientedEdge) -> int:
    return s.term[e.edge] if e.sign > 0 else s.init[e.edge]


def edge_target(s: Scwol, e: OrientedEdge) -> int:
    return s.init[e.edge] if e.sign > 0 else s.term[e.edge]


@dataclass(frozen=True)
class PathWord:
    """``groups`` has one more entry than ``edges``; identity letters are 0."""

    start: int
    end: int
    groups: tuple[int, ...]
    edges: tuple[OrientedEdge, ...]

    @property
    def path_length(self) -> int:
        return len(self.edges)

    @property
    def letters(self) -> tuple:
        out: list = [self.groups[0]]
        for e, g in zip(self.edges, self.groups[1:]):
            out += [e, g]
        return tuple(out)

    def is_identity(self) -> bool:
        return not self.edges and self.groups[0] == 0

    def sort_key(self) -> tuple:
        return (len(self.edges), tuple((e.edge, -e.sign) for e in self.edges), self.groups)


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"
    REDUCED_NONEMPTY = "reduced-nonempty"


@dataclass(frozen=True)
class Reduced:
    word: PathWord
    certified: bool
    explored: int


# -- maximal trees --------------------------------------------------------


def maximal_tree(s: Scwol) -> frozenset[int]:
    """Spanning tree of the 1-skeleton: BFS from vertex 0, edges tried in index order."""
    comps = s.components()
    if len(comps) > 1:
        raise DisconnectedError([[s.vertices[v] for v in c] for c in comps])
    incident: list[list[int]] = [[] for _ in s.vertices]
    for a in range(s.n_edges):
        incident[s.init[a]].append(a)
        incident[s.term[a]].append(a)
    seen = {0} if s.n_vertices else set()
    tree = set()
    queue = deque(sorted(seen))
    while queue:
        u = queue.popleft()
        for a in sorted(incident[u]):
            v = s.term[a] if s.init[a] == u else s.init[a]
            if v not in seen:
                seen.add(v)
                tree.add(a)
                queue.append(v)
    return frozenset(tree)


# -- the presentation -----------------------------------------------------


class Pi1Presentation:
    """pi1 of a complex of groups at a base vertex, with a chosen maximal tree.

    Holds the lookup tables used by reduction (transversals of edge images,
    triangle rules) and caches reductions; instances are otherwise immutable.
    """

    def __init__(
        self,
        complex: ComplexOfGroups,
        base: int = 0,
        tree: Iterable[int] | None = None,
        budget: int = DEFAULT_BUDGET,
        max_cosets: int = 20_000,
    ):
        self.complex = complex
        self.scwol = complex.base
        self.base = base
        self.tree = frozenset(tree) if tree is not None else maximal_tree(self.scwol)
        self.budget = budget
        self.max_cosets = max_cosets
        self.dim = dimension(self.scwol)
        s, c = self.scwol, complex
        if not 0 <= base < s.n_vertices:
            raise WordError("base vertex out of range")
        self._check_tree()
        # coset_rep[a][g], coset_quot[a][g]: g = rep * psi_a(quot)
        self.coset_rep: list[tuple[int, ...]] = []
        self.coset_quot: list[tuple[int, ...]] = []
        for a in range(s.n_edges):
            G = c.local[s.term[a]]
            h = c.edge_hom[a]
            reps, quots = [], []
            for g in range(G.order):
                coset = [G.mul[g][h.map[x]] for x in range(h.dom.order)]
                r = min(coset)
                reps.append(r)
                quots.append(h.preimage(G.mul[G.inv[r]][g]))
            self.coset_rep.append(tuple(reps))
            self.coset_quot.append(tuple(quots))
        self.triangles: dict[tuple[OrientedEdge, OrientedEdge], list[tuple]] = {}
        for (a, b), ab in s.comp.items():
            g = c.twist[(a, b)]
            P, M = 1, -1
            for kind, pair in (
                (1, (OrientedEdge(a, P), OrientedEdge(b, P))),
                (2, (OrientedEdge(b, M), OrientedEdge(a, M))),
                (3, (OrientedEdge(ab, P), OrientedEdge(b, M))),
                (4, (OrientedEdge(b, P), OrientedEdge(ab, M))),
                (5, (OrientedEdge(a, M), OrientedEdge(ab, P))),
                (6, (OrientedEdge(ab, M), OrientedEdge(a, P))),
            ):
                self.triangles.setdefault(pair, []).append((kind, a, b, ab, g))
        self.tree_path = self._tree_paths()
        self._reduce_cache: dict[PathWord, tuple[PathWord, int]] = {}
        self._finite = None
        self._finite_tried = False

    def _check_tree(self) -> None:
        s = self.scwol
        adj: dict[int, set[int]] = {v: set() for v in range(s.n_vertices)}
        for a in self.tree:
            adj[s.init[a]].add(s.term[a])
            adj[s.term[a]].add(s.init[a])
        seen, queue = {self.base}, deque([self.base])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        if len(seen) != s.n_vertices or len(self.tree) != s.n_vertices - 1:
            raise WordError("tree must be a spanning tree of the 1-skeleton")

    def _tree_paths(self) -> list[PathWord]:
        s = self.scwol
        paths: list[PathWord | None] = [None] * s.n_vertices
        paths[self.base] = self.identity(self.base)
        queue = deque([self.base])
        while queue:
            u = queue.popleft()
            for a in sorted(self.tree):
                if s.term[a] == u and paths[s.init[a]] is None:
                    e, v = OrientedEdge(a, 1), s.init[a]
                elif s.init[a] == u and paths[s.term[a]] is None:
                    e, v = OrientedEdge(a, -1), s.term[a]
                else:
                    continue
                paths[v] = self.concat(paths[u], self.edge_word(e))  # type: ignore[arg-type]
                queue.append(v)
        return paths  # type: ignore[return-value]

    # -- elementary words -------------------------------------------------

    def group_at(self, v: int):
        return self.complex.local[v]

    def identity(self, v: int | None = None) -> PathWord:
        v = self.base if v is None else v
        return PathWord(v, v, (0,), ())

    def letter(self, v: int, g: int) -> PathWord:
        return PathWord(v, v, (g,), ())

    def edge_word(self, e: OrientedEdge) -> PathWord:
        return PathWord(edge_source(self.scwol, e), edge_target(self.scwol, e), (0, 0), (e,))

    def vertex_of(self, w: PathWord, j: int) -> int:
        return w.start if j == 0 else edge_target(self.scwol, w.edges[j - 1])

    def make(self, start: int, groups: Sequence[int], edges: Sequence[OrientedEdge]) -> PathWord:
        """Build a path word, checking vertex compatibility and letter ranges."""
        s = self.scwol
        if len(groups) != len(edges) + 1:
            raise WordError("need exactly one group letter between consecutive edges")
        v = start
        for j, g in enumerate(groups):
            if j > 0:
                e = edges[j - 1]
                if edge_source(s, e) != v:
                    raise WordError(f"edge {s.edges[e.edge]}{'+' if e.sign > 0 else '-'} does not start at {s.vertices[v]}")
                v = edge_target(s, e)
            if not 0 <= g < self.group_at(v).order:
                raise WordError(f"letter {g} is not in the local group at {s.vertices[v]}")
        return PathWord(start, v, tuple(groups), tuple(OrientedEdge(*e) for e in edges))

    def concat(self, u: PathWord, v: PathWord) -> PathWord:
        if u.end != v.start:
            raise WordError(f"cannot concatenate: path ends at {self.scwol.vertices[u.end]}, next starts at {self.scwol.vertices[v.start]}")
        G = self.group_at(u.end)
        mid = G.mul[u.groups[-1]][v.groups[0]]
        return PathWord(u.start, v.end, u.groups[:-1] + (mid,) + v.groups[1:], u.edges + v.edges)

    def product(self, *words: PathWord) -> PathWord:
        out = words[0]
        for w in words[1:]:
            out = self.concat(out, w)
        return out

    def inverse(self, w: PathWord) -> PathWord:
        groups = []
        for j in range(len(w.groups) - 1, -1, -1):
            groups.append(self.group_at(self.vertex_of(w, j)).inv[w.groups[j]])
        edges = tuple(e.inverse() for e in reversed(w.edges))
        return PathWord(w.end, w.start, tuple(groups), edges)

    def times(self, w: PathWord, g: int) -> PathWord:
        """Right multiplication by a local element at the endpoint."""
        G = self.group_at(w.end)
        return PathWord(w.start, w.end, w.groups[:-1] + (G.mul[w.groups[-1]][g],), w.edges)

    # -- normal forms -----------------------------------------------------

    def normalize(self, w: PathWord) -> PathWord:
        """Slide local letters rightwards: before ``a-`` nothing remains, before
        ``a+`` only the least element of the coset ``g psi_a(G_{i(a)})``."""
        s, c = self.scwol, self.complex
        gs = list(w.groups)
        for j, e in enumerate(w.edges):
            a = e.edge
            nxt = self.group_at(edge_target(s, e))
            if e.sign < 0:
                gs[j + 1] = nxt.mul[c.edge_hom[a].map[gs[j]]][gs[j + 1]]
                gs[j] = 0
            else:
                g = gs[j]
                gs[j] = self.coset_rep[a][g]
                gs[j + 1] = nxt.mul[self.coset_quot[a][g]][gs[j + 1]]
        return PathWord(w.start, w.end, tuple(gs), w.edges)

    def pinch_reduce(self, w: PathWord) -> PathWord:
        """Cancel every backtrack ``a+ g a-`` and ``a- psi_a(h) a+`` (stack pass)."""
        s, c = self.scwol, self.complex
        gs = [w.groups[0]]
        es: list[OrientedEdge] = []
        for e, g in zip(w.edges, w.groups[1:]):
            if es and es[-1].edge == e.edge and es[-1].sign == -e.sign:
                a, mid = e.edge, gs[-1]
                if es[-1].sign > 0:
                    val, H = c.edge_hom[a].map[mid], c.local[s.term[a]]
                else:
                    val, H = c.edge_hom[a].preimage(mid), c.local[s.init[a]]
                if val is not None:
                    es.pop()
                    gs.pop()
                    gs[-1] = H.mul[H.mul[gs[-1]][val]][g]
                    continue
            es.append(e)
            gs.append(g)
        return PathWord(w.start, w.end, tuple(gs), tuple(es))

    def rewrites(self, w: PathWord) -> Iterator[PathWord]:
        """Every word obtained from ``w`` by one length-decreasing rule."""
        s, c = self.scwol, self.complex
        gs, es = w.groups, w.edges
        for j in range(len(es) - 1):
            x, y, h = es[j], es[j + 1], gs[j + 1]
            left, right = gs[j], gs[j + 2]
            if x.edge == y.edge and x.sign == -y.sign:
                a = x.edge
                if x.sign > 0:
                    val, H = c.edge_hom[a].map[h], c.local[s.term[a]]
                else:
                    val, H = c.edge_hom[a].preimage(h), c.local[s.init[a]]
                if val is not None:
                    merged = H.mul[H.mul[left][val]][right]
                    yield PathWord(w.start, w.end, gs[:j] + (merged,) + gs[j + 3:], es[:j] + es[j + 2:])
            for rule in self.triangles.get((x, y), ()):
                out = self._apply_triangle(rule, h)
                if out is None:
                    continue
                L, new, R = out
                GL = self.group_at(edge_source(s, x))
                GR = self.group_at(edge_target(s, y))
                yield PathWord(
                    w.start,
                    w.end,
                    gs[:j] + (GL.mul[left][L], GR.mul[R][right]) + gs[j + 3:],
                    es[:j] + (new,) + es[j + 2:],
                )

    def _apply_triangle(self, rule: tuple, h: int) -> tuple[int, OrientedEdge, int] | None:
        kind, a, b, ab, g = rule
        s, c = self.scwol, self.complex
        T = c.local[s.term[a]]
        psi_a, psi_c = c.edge_hom[a], c.edge_hom[ab]
        if kind == 1:
            return T.mul[psi_a.map[h]][g], OrientedEdge(ab, 1), 0
        if kind == 2:
            return 0, OrientedEdge(ab, -1), T.mul[T.inv[g]][psi_a.map[h]]
        if kind == 3:
            return T.mul[psi_c.map[h]][T.inv[g]], OrientedEdge(a, 1), 0
        if kind == 4:
            return 0, OrientedEdge(a, -1), T.mul[g][psi_c.map[h]]
        target = h if kind == 5 else T.inv[h]
        for p in range(psi_a.dom.order):
            q = psi_c.preimage(T.prod(T.inv[g], T.inv[psi_a.map[p]], target))
            if q is not None:
                if kind == 5:
                    return p, OrientedEdge(b, 1), q
                Gi, Gc = c.local[s.init[a]], c.local[s.init[ab]]
                return Gc.inv[q], OrientedEdge(b, -1), Gi.inv[p]
        return None

    def rewrite_closure(self, w: PathWord, budget: int | None = None) -> set[PathWord]:
        """All normal-form words reachable from ``w`` by decreasing rules."""
        budget = budget or self.budget
        start = self.normalize(w)
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in self.rewrites(u):
                v = self.normalize(v)
                if v not in seen:
                    if len(seen) >= budget:
                        best = min(seen, key=PathWord.sort_key)
                        raise Undecided(f"rewriting budget {budget} exhausted", best, len(seen))
                    seen.add(v)
                    stack.append(v)
        return seen

    def reduce(self, w: PathWord, budget: int | None = None) -> Reduced:
        if self.dim <= 1:
            return Reduced(self.normalize(self.pinch_reduce(w)), True, 0)
        key = self.normalize(w)
        hit = self._reduce_cache.get(key)
        if hit is not None:
            return Reduced(hit[0], True, hit[1])
        closure = self.rewrite_closure(w, budget)
        best = min(closure, key=PathWord.sort_key)
        self._reduce_cache[key] = (best, len(closure))
        return Reduced(best, True, len(closure))

    # -- exact keys -------------------------------------------------------

    def finite_quotient(self):
        """Regular representation of pi1 by coset enumeration, or None if it did not close."""
        if not self._finite_tried:
            from .cosets import FinitePi1

            self._finite_tried = True
            self._finite = FinitePi1.build(self, self.max_cosets)
        return self._finite

    @property
    def keys_exact(self) -> bool:
        return self.dim <= 1 or self.finite_quotient() is not None

    def element_key(self, w: PathWord, budget: int | None = None):
        """Hashable key, equal for equal elements (exactly so when ``keys_exact``)."""
        if self.dim <= 1:
            r = self.reduce(w).word
            return ("nf", r.start, r.end, r.groups, r.edges)
        fq = self.finite_quotient()
        if fq is not None:
            return ("fq", w.start, w.end, fq.evaluate_in(self, w))
        r = self.reduce(w, budget).word
        return ("rw", r.start, r.end, r.groups, r.edges)

    def coset_key(self, w: PathWord, budget: int | None = None):
        """Key of the coset ``w G_end`` (a development vertex over ``w.end``)."""
        if self.dim <= 1:
            r = self.reduce(w).word
            return ("nf", r.start, r.end, r.groups[:-1], r.edges)
        fq = self.finite_quotient()
        if fq is not None:
            G = self.group_at(w.end)
            return ("fq", w.start, w.end, min(fq.evaluate_in(self, self.times(w, h)) for h in range(G.order)))
        r = self.reduce(w, budget).word
        return ("rw", r.start, r.end, min(self.reduce(self.times(r, h), budget).word.sort_key() for h in range(self.group_at(w.end).order)))

    # -- the tree presentation -------------------------------------------

    def tree_collapse(self, w: PathWord) -> tuple:
        """Image in pi1(G(Y), T): local letters ``(vertex, g)`` and non-tree edges
        ``(edge, sign)`` as tagged tuples; tree edges vanish."""
        out = []
        for j, g in enumerate(w.groups):
            if j > 0:
                e = w.edges[j - 1]
                if e.edge not in self.tree:
                    out.append(("e", e.edge, e.sign))
            if g != 0:
                out.append(("g", self.vertex_of(w, j), g))
        return tuple(out)

    def lift_tree_word(self, tokens: Sequence[tuple]) -> PathWord:
        """Inverse of :meth:`tree_collapse`: a loop at the base vertex."""
        w = self.identity()
        for tok in tokens:
            if tok[0] == "g":
                w = self.concat(w, self.vertex_loop(tok[1], tok[2]))
            else:
                w = self.concat(w, self.edge_loop(tok[1], tok[2]))
        return w

    def vertex_loop(self, v: int, g: int) -> PathWord:
        path = self.tree_path[v]
        return self.product(path, self.letter(v, g), self.inverse(path))

    def edge_loop(self, a: int, sign: int = 1) -> PathWord:
        e = OrientedEdge(a, sign)
        s = self.scwol
        return self.product(
            self.tree_path[edge_source(s, e)], self.edge_word(e), self.inverse(self.tree_path[edge_target(s, e)])
        )

    def generators(self) -> list[PathWord]:
        """Loop words for the generating set: nontrivial local elements and
        non-tree oriented edges (tree edges are trivial in pi1)."""
        gens = []
        for v in range(self.scwol.n_vertices):
            for g in range(1, self.group_at(v).order):
                gens.append(self.vertex_loop(v, g))
        for a in range(self.scwol.n_edges):
            if a not in self.tree:
                gens.append(self.edge_loop(a, 1))
                gens.append(self.edge_loop(a, -1))
        return gens

    # -- text -------------------------------------------------------------

    def format(self, w: PathWord) -> str:
        s = self.scwol
        toks = []
        for j, g in enumerate(w.groups):
            if j > 0:
                e = w.edges[j - 1]
                toks.append(f"{s.edges[e.edge]}{'+' if e.sign > 0 else '-'}")
            if g != 0:
                v = self.vertex_of(w, j)
                toks.append(f"{s.vertices[v]}:{self.group_at(v).names[g]}")
        return " . ".join(toks) if toks else "1"

    def parse(
        self,
        text: str,
        start: int | None = None,
        aliases: Mapping[str, "PathWord | tuple[int, int]"] | None = None,
    ) -> PathWord:
        """Parse ``s . e1+ . w:2 . e2-``.

        Tokens are signed edge names, ``vertex:element`` letters, bare element
        names of the current local group, or aliases (words or letters).
        """
        s = self.scwol
        aliases = aliases or {}
        w = self.identity(self.base if start is None else start)
        tokens = [t for part in text.split(".") for t in part.split()]
        for tok in tokens:
            if tok in ("1", ""):
                continue
            if tok in aliases:
                val = aliases[tok]
                piece = val if isinstance(val, PathWord) else self.letter(*val)
            elif tok[-1] in "+-" and tok[:-1] in s.edges:
                piece = self.edge_word(OrientedEdge(s.edge_index(tok[:-1]), 1 if tok[-1] == "+" else -1))
            elif ":" in tok:
                vname, ename = tok.split(":", 1)
                v = s.vertex_index(vname)
                piece = self.letter(v, self.group_at(v).element(ename))
            else:
                G = self.group_at(w.end)
                try:
                    piece = self.letter(w.end, G.element(tok))
                except ValueError:
                    raise WordError(f"cannot resolve token {tok!r} at vertex {s.vertices[w.end]}") from None
            w = self.concat(w, piece)
        return w


def presentation(complex: ComplexOfGroups, base: int | str = 0, **kwargs) -> Pi1Presentation:
    if isinstance(base, str):
        base = complex.base.vertex_index(base)
    return Pi1Presentation(complex, base, **kwargs)


# -- module-level operations ----------------------------------------------


def reduce(w: PathWord, p: Pi1Presentation, budget: int | None = None) -> Reduced:
    """Reduce to minimal path length.  Raises :class:`Undecided` if the budget runs out."""
    return p.reduce(w, budget)


def loop_word(p: Pi1Presentation, path: Sequence, base: int | None = None) -> PathWord:
    """The word of a G(Y)-loop given as ``(g0, e1, g1, ..., ek, gk)``.

    Group letters may be indices or element names, edges ``OrientedEdge``
    values or strings such as ``"a+"``.
    """
    base = p.base if base is None else base
    s = p.scwol
    if len(path) % 2 == 0:
        raise WordError("a G(Y)-path alternates letters and edges and has odd length")
    groups, edges = [], []
    v = base
    for j, item in enumerate(path):
        if j % 2 == 1:
            if isinstance(item, str):
                item = OrientedEdge(s.edge_index(item[:-1]), 1 if item[-1] == "+" else -1)
            edges.append(OrientedEdge(*item))
            v = edge_target(s, edges[-1])
        else:
            groups.append(p.group_at(v).element(item) if isinstance(item, str) else int(item))
    w = p.make(base, groups, edges)
    if w.end != base:
        raise WordError(f"loop must end at {s.vertices[base]}, ends at {s.vertices[w.end]}")
    return w


def word_equal(u: PathWord, v: PathWord, p: Pi1Presentation, budget: int | None = None) -> Verdict:
    if (u.start, u.end) != (v.start, v.end):
        raise WordError("words must share endpoints")
    if p.dim >= 2:
        fq = p.finite_quotient()
        if fq is not None:
            return Verdict.YES if fq.evaluate_in(p, u) == fq.evaluate_in(p, v) else Verdict.NO
    try:
        r = p.reduce(p.concat(u, p.inverse(v)), budget)
    except Undecided:
        return Verdict.UNDECIDED
    if r.word.is_identity():
        return Verdict.YES
    return Verdict.NO if p.dim <= 1 else Verdict.REDUCED_NONEMPTY


def outgoing(p: Pi1Presentation, v: int) -> list[OrientedEdge]:
    s = p.scwol
    out = [OrientedEdge(a, -1) for a in range(s.n_edges) if s.init[a] == v]
    out += [OrientedEdge(a, 1) for a in range(s.n_edges) if s.term[a] == v]
    return sorted(out, key=lambda e: (e.edge, -e.sign))


def enumerate_paths(
    p: Pi1Presentation,
    length: int,
    letters: str = "transversal",
    start: int | None = None,
    final: str = "all",
) -> Iterator[PathWord]:
    """All path words of exactly ``length`` edges issuing from ``start``.

    ``letters="all"`` ranges every inner letter over its whole local group;
    ``"transversal"`` only over the normal-form choices (one per sliding class).
    ``final`` is ``"all"`` or ``"identity"`` for the last letter.
    """
    s = p.scwol
    start = p.base if start is None else start

    def inner_choices(v: int, e: OrientedEdge) -> Iterable[int]:
        G = p.group_at(v)
        if letters == "all":
            return range(G.order)
        if e.sign < 0:
            return (0,)
        return sorted(set(p.coset_rep[e.edge]))

    def rec(v: int, groups: tuple, edges: tuple) -> Iterator[PathWord]:
        if len(edges) == length:
            finals = range(p.group_at(v).order) if final == "all" else (0,)
            for g in finals:
                yield PathWord(start, v, groups + (g,), edges)
            return
        for e in outgoing(p, v):
            for g in inner_choices(v, e):
                yield from rec(edge_target(s, e), groups + (g,), edges + (e,))

    yield from rec(start, (), ())
