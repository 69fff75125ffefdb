"""Exact equality in pi1(G(Y), T) when that group is finite, via Todd-Coxeter.

The tree presentation has one generator per generator of each local group and
one per edge outside the tree.  Relators are the local multiplication tables,
the edge monomorphisms and the twisting relations.  Coset enumeration over the
trivial subgroup yields the regular representation, which evaluates words
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from sympy.combinatorics.fp_groups import FpGroup
from sympy.combinatorics.free_groups import free_group

if TYPE_CHECKING:
    from .words import PathWord, Pi1Presentation


@dataclass(frozen=True)
class FinitePi1:
    """``table[coset][column]`` with columns ``2*k`` for generator k and ``2*k+1`` for its inverse."""

    order: int
    table: tuple[tuple[int, ...], ...]
    local_gen: dict  # (vertex, local generator position) -> generator index
    edge_gen: dict  # edge -> generator index
    local_words: tuple  # per vertex, element -> tuple of generator positions
    local_injective: tuple[bool, ...]

    @classmethod
    def build(cls, p: "Pi1Presentation", max_cosets: int = 20_000) -> "FinitePi1 | None":
        s, c = p.scwol, p.complex
        names: list[str] = []
        local_gen = {}
        for v, G in enumerate(c.local):
            for k, _ in enumerate(G.generators):
                local_gen[(v, k)] = len(names)
                names.append(f"g{v}_{k}")
        edge_gen = {}
        for a in range(s.n_edges):
            if a not in p.tree:
                edge_gen[a] = len(names)
                names.append(f"e{a}")
        local_words = tuple(G.word_for() for G in c.local)
        if not names:
            return cls(1, ((),), local_gen, edge_gen, local_words, tuple(True for _ in c.local))
        F, *gens = free_group(",".join(names))

        def local(v: int, x: int):
            out = F.identity
            for k in local_words[v][x]:
                out = out * gens[local_gen[(v, k)]]
            return out

        def edge(a: int, sign: int):
            if a in p.tree:
                return F.identity
            return gens[edge_gen[a]] ** sign

        relators = []
        for v, G in enumerate(c.local):
            for x in range(G.order):
                for k, g in enumerate(G.generators):
                    relators.append(local(v, x) * local(v, g) * local(v, G.mul[x][g]) ** -1)
        for a in range(s.n_edges):
            G = c.local[s.init[a]]
            for g in G.generators:
                rel = edge(a, 1) * local(s.init[a], g) * edge(a, -1) * local(s.term[a], c.psi(a, g)) ** -1
                relators.append(rel)
        for (a, b), ab in s.comp.items():
            rel = edge(a, 1) * edge(b, 1) * edge(ab, -1) * local(s.term[a], c.twist[(a, b)]) ** -1
            relators.append(rel)
        relators = [r for r in relators if r != F.identity]
        group = FpGroup(F, relators)
        try:
            table = group.coset_enumeration([], max_cosets=max_cosets)
        except ValueError:
            return None
        table.compress()
        table.standardize()
        rows = tuple(tuple(int(x) for x in row) for row in table.table)
        out = cls(len(rows), rows, local_gen, edge_gen, local_words, ())
        injective = []
        for v, G in enumerate(c.local):
            images = {out._run(0, out._local_letters(v, x)) for x in range(G.order)}
            injective.append(len(images) == G.order)
        return cls(len(rows), rows, local_gen, edge_gen, local_words, tuple(injective))

    def _local_letters(self, v: int, x: int) -> list[int]:
        return [2 * self.local_gen[(v, k)] for k in self.local_words[v][x]]

    def _run(self, coset: int, columns) -> int:
        for col in columns:
            coset = self.table[coset][col]
        return coset

    def columns(self, p: "Pi1Presentation", w: "PathWord") -> list[int]:
        cols: list[int] = []
        for tok in p.tree_collapse(w):
            if tok[0] == "g":
                cols += self._local_letters(tok[1], tok[2])
            else:
                k = self.edge_gen[tok[1]]
                cols.append(2 * k if tok[2] > 0 else 2 * k + 1)
        return cols

    def evaluate_in(self, p: "Pi1Presentation", w: "PathWord") -> int:
        """The element of pi1(G(Y), T) represented by ``w``, as a coset index."""
        return self._run(0, self.columns(p, w))
