"""Finite groups as multiplication tables, and homomorphisms between them.

Elements are dense integer indices with the identity at index 0.  Every
group carries display names for its elements so that words and files can
refer to them symbolically.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from typing import Iterable, Mapping, Sequence

from .report import ValidationReport


class GroupError(ValueError):
    pass


class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``mul[x][y]`` is the index of ``x*y``.  The table is checked on
    construction (associativity, identity at 0, inverses), so an instance
    is always a group.
    """

    def __init__(
        self,
        mul: Sequence[Sequence[int]],
        names: Sequence[str] | None = None,
        generators: Sequence[int] | None = None,
        name: str | None = None,
        check: bool = True,
    ):
        self.mul = tuple(tuple(int(v) for v in row) for row in mul)
        self.order = len(self.mul)
        if self.order == 0:
            raise GroupError("a group needs at least one element")
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(self.order))
        if len(self.names) != self.order or len(set(self.names)) != self.order:
            raise GroupError("element names must be distinct, one per element")
        self.name = name or f"G{self.order}"
        if check:
            problems = _table_problems(self.mul)
            if problems:
                raise GroupError(f"{self.name}: {problems[0]}")
        self.inv = tuple(row.index(0) for row in self.mul)
        self._index = {n: i for i, n in enumerate(self.names)}
        if generators is None:
            generators = _greedy_generators(self)
        self.generators = tuple(generators)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    def __len__(self) -> int:
        return self.order

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and self.mul == other.mul and self.names == other.names

    def __hash__(self) -> int:
        return hash((self.mul, self.names))

    identity = 0

    def op(self, x: int, y: int) -> int:
        return self.mul[x][y]

    def prod(self, *xs: int) -> int:
        acc = 0
        for x in xs:
            acc = self.mul[acc][x]
        return acc

    def inverse(self, x: int) -> int:
        return self.inv[x]

    def element(self, name: str) -> int:
        try:
            return self._index[str(name)]
        except KeyError:
            raise GroupError(f"{self.name} has no element named {name!r}") from None

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != 0:
            y = self.mul[y][x]
            k += 1
        return k

    def is_abelian(self) -> bool:
        return all(self.mul[x][y] == self.mul[y][x] for x in range(self.order) for y in range(x))

    def generated(self, gens: Iterable[int]) -> frozenset[int]:
        gens = list(gens)
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for s in gens:
                y = self.mul[x][s]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def word_for(self) -> list[tuple[int, ...]]:
        """Shortest words in ``self.generators`` for every element (BFS tree)."""
        words: list[tuple[int, ...] | None] = [None] * self.order
        words[0] = ()
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for gi, s in enumerate(self.generators):
                y = self.mul[x][s]
                if words[y] is None:
                    words[y] = words[x] + (gi,)
                    queue.append(y)
        return words  # type: ignore[return-value]

    def subgroup(self, elements: Iterable[int], name: str | None = None) -> tuple["FiniteGroup", tuple[int, ...]]:
        """Return ``(H, embed)`` where ``embed[i]`` is the index in self of H's element i."""
        elems = sorted(set(elements))
        if not elems or elems[0] != 0:
            raise GroupError("subgroup must contain the identity")
        pos = {x: i for i, x in enumerate(elems)}
        try:
            table = [[pos[self.mul[x][y]] for y in elems] for x in elems]
        except KeyError:
            raise GroupError("element set is not closed under multiplication") from None
        sub = FiniteGroup(table, [self.names[x] for x in elems], name=name, check=False)
        return sub, tuple(elems)


def _table_problems(mul: tuple[tuple[int, ...], ...]) -> list[str]:
    n = len(mul)
    out = []
    if any(len(row) != n for row in mul):
        return ["table is not square"]
    if any(not 0 <= v < n for row in mul for v in row):
        return ["table entry out of range"]
    for x in range(n):
        if mul[0][x] != x or mul[x][0] != x:
            out.append(f"index 0 is not a two-sided identity (fails at {x})")
            return out
    for x in range(n):
        if 0 not in mul[x]:
            out.append(f"element {x} has no right inverse")
            return out
        y = mul[x].index(0)
        if mul[y][x] != 0:
            out.append(f"element {x} has no two-sided inverse")
            return out
    for x, y, z in itertools.product(range(n), repeat=3):
        if mul[mul[x][y]][z] != mul[x][mul[y][z]]:
            out.append(f"not associative at ({x},{y},{z})")
            return out
    return out


def _greedy_generators(g: FiniteGroup) -> tuple[int, ...]:
    gens: list[int] = []
    span = frozenset({0})
    for x in range(1, g.order):
        if x not in span:
            gens.append(x)
            span = g.generated(gens)
            if len(span) == g.order:
                break
    return tuple(gens)


# -- constructors ---------------------------------------------------------


def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], ["1"], generators=(), name="1")


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group order must be positive")
    if n == 1:
        return trivial_group()
    table = [[(x + y) % n for y in range(n)] for x in range(n)]
    return FiniteGroup(table, [str(i) for i in range(n)], generators=(1,), name=f"Z{n}", check=False)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    pairs = list(itertools.product(range(g.order), range(h.order)))
    pos = {p: i for i, p in enumerate(pairs)}
    table = [[pos[(g.mul[a][c], h.mul[b][d])] for (c, d) in pairs] for (a, b) in pairs]
    names = [f"({_strip(g.names[a])},{_strip(h.names[b])})" for a, b in pairs]
    gens = [pos[(s, 0)] for s in g.generators] + [pos[(0, t)] for t in h.generators]
    return FiniteGroup(table, names, generators=gens, name=f"{g.name}x{h.name}", check=False)


def _strip(name: str) -> str:
    return name[1:-1] if name.startswith("(") and name.endswith(")") and "," in name else name


def _cycle_name(perm: tuple[int, ...]) -> str:
    seen, cycles = set(), []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(x + 1)
            x = perm[x]
        cycles.append("(" + "".join(str(c) for c in cyc) + ")")
    return "".join(cycles) or "()"


def symmetric_group(n: int) -> FiniteGroup:
    """S_n acting on {1..n}; elements named in cycle notation, ``()`` the identity.

    Product convention: ``x*y`` means apply ``y`` first, then ``x``.
    """
    perms = sorted(itertools.permutations(range(n)))
    ident = tuple(range(n))
    perms.remove(ident)
    perms.insert(0, ident)
    pos = {p: i for i, p in enumerate(perms)}
    table = [[pos[tuple(x[y[k]] for k in range(n))] for y in perms] for x in perms]
    gens: list[int] = []
    if n >= 2:
        gens.append(pos[tuple([1, 0] + list(range(2, n)))])
    if n >= 3:
        gens.append(pos[tuple(list(range(1, n)) + [0])])
    return FiniteGroup(table, [_cycle_name(p) for p in perms], generators=gens, name=f"S{n}", check=False)


_PRODUCT_SPLIT = re.compile(r"\s*[x×*]\s*")


def parse_group(spec, named: Mapping[str, FiniteGroup] | None = None) -> FiniteGroup:
    """Build a group from shorthand (``"Z2"``, ``"Z3xZ3"``, ``"S3"``, ``"1"``),
    a reference into ``named``, or an explicit ``{elements, table}`` mapping."""
    named = named or {}
    if isinstance(spec, FiniteGroup):
        return spec
    if isinstance(spec, int):
        return cyclic_group(spec)
    if isinstance(spec, Mapping):
        elements = [str(e) for e in spec["elements"]]
        index = {e: i for i, e in enumerate(elements)}
        rows = []
        for row in spec["table"]:
            rows.append([index[str(v)] if str(v) in index else int(v) for v in row])
        if index and rows and rows[0] != list(range(len(elements))):
            raise GroupError("explicit tables must list the identity first")
        gens = spec.get("generators")
        gens = [index[str(x)] for x in gens] if gens is not None else None
        return FiniteGroup(rows, elements, generators=gens, name=spec.get("name"))
    text = str(spec).strip()
    if text in named:
        return named[text]
    if text in ("1", "Z1", "trivial"):
        return trivial_group()
    factors = [f for f in _PRODUCT_SPLIT.split(text) if f]
    if len(factors) > 1:
        out = parse_group(factors[0], named)
        for f in factors[1:]:
            out = direct_product(out, parse_group(f, named))
        return out
    m = re.fullmatch(r"Z(\d+)", text)
    if m:
        return cyclic_group(int(m.group(1)))
    m = re.fullmatch(r"S(\d+)", text)
    if m:
        return symmetric_group(int(m.group(1)))
    raise GroupError(f"cannot parse group description {spec!r}")


# -- homomorphisms --------------------------------------------------------


class GroupHom:
    """A map between finite groups, stored as the full image table."""

    def __init__(self, dom: FiniteGroup, cod: FiniteGroup, images: Sequence[int]):
        if len(images) != dom.order:
            raise GroupError("image table length must equal the domain order")
        self.dom = dom
        self.cod = cod
        self.map = tuple(int(y) for y in images)
        self._preimage: dict[int, int] | None = None

    def __call__(self, x: int) -> int:
        return self.map[x]

    def __repr__(self) -> str:
        return f"GroupHom({self.dom.name} -> {self.cod.name}, {self.map})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupHom) and self.map == other.map and self.dom == other.dom and self.cod == other.cod

    def __hash__(self) -> int:
        return hash(self.map)

    @classmethod
    def identity(cls, g: FiniteGroup) -> "GroupHom":
        return cls(g, g, range(g.order))

    @classmethod
    def trivial(cls, dom: FiniteGroup, cod: FiniteGroup) -> "GroupHom":
        return cls(dom, cod, [0] * dom.order)

    @classmethod
    def from_generator_images(cls, dom: FiniteGroup, cod: FiniteGroup, images: Sequence[int]) -> "GroupHom":
        """Extend generator images to the whole domain; inconsistent data raises."""
        if len(images) != len(dom.generators):
            raise GroupError(
                f"{dom.name} has {len(dom.generators)} generator(s), got {len(images)} image(s)"
            )
        table: list[int | None] = [None] * dom.order
        table[0] = 0
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for s, img in zip(dom.generators, images):
                y = dom.mul[x][s]
                cand = cod.mul[table[x]][img]  # type: ignore[index]
                if table[y] is None:
                    table[y] = cand
                    queue.append(y)
                elif table[y] != cand:
                    raise GroupError(
                        f"generator images do not extend to a homomorphism {dom.name} -> {cod.name}"
                    )
        return cls(dom, cod, table)  # type: ignore[arg-type]

    def preimage(self, y: int) -> int | None:
        if self._preimage is None:
            pre: dict[int, int] = {}
            for x, fx in enumerate(self.map):
                pre.setdefault(fx, x)
            self._preimage = pre
        return self._preimage.get(y)

    def image(self) -> frozenset[int]:
        return frozenset(self.map)

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """``self ∘ inner``."""
        return GroupHom(inner.dom, self.cod, [self.map[inner.map[x]] for x in range(inner.dom.order)])


def check_hom(h: GroupHom, injective: bool = True) -> ValidationReport:
    report = ValidationReport(f"hom {h.dom.name}->{h.cod.name}")
    if any(not 0 <= y < h.cod.order for y in h.map):
        report.add("range", (), "image index outside the codomain")
        return report
    if h.map[0] != 0:
        report.add("identity", (0,), f"identity maps to {h.cod.names[h.map[0]]}")
    dm, cm, f = h.dom.mul, h.cod.mul, h.map
    for x in range(h.dom.order):
        for y in range(h.dom.order):
            if f[dm[x][y]] != cm[f[x]][f[y]]:
                report.add(
                    "multiplicative",
                    (h.dom.names[x], h.dom.names[y]),
                    f"f({h.dom.names[x]}*{h.dom.names[y]}) != f({h.dom.names[x]})*f({h.dom.names[y]})",
                )
                break
    if injective:
        seen: dict[int, int] = {}
        for x, fx in enumerate(f):
            if fx in seen:
                report.add(
                    "not-injective",
                    (h.dom.names[seen[fx]], h.dom.names[x]),
                    f"{h.dom.names[seen[fx]]} and {h.dom.names[x]} both map to {h.cod.names[fx]}",
                )
            else:
                seen[fx] = x
    return report


def image_membership(h: GroupHom, y: int) -> int | None:
    """The unique preimage of ``y`` under an injective ``h``, or None."""
    return h.preimage(y)


def conjugation_aut(g: int, group: FiniteGroup) -> GroupHom:
    """x -> g x g^-1."""
    gi = group.inv[g]
    return GroupHom(group, group, [group.mul[group.mul[g][x]][gi] for x in range(group.order)])
