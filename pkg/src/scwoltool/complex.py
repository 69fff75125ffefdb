"""Complexes of groups over a scwol: local groups, edge monomorphisms, twisting elements."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .groups import FiniteGroup, GroupHom, check_hom
from .report import ValidationReport
from .scwol import Quotient, Scwol, ScwolAction, ScwolError, composable_sequences, dimension, quotient, validate_action, validate_scwol


@dataclass(frozen=True, eq=False)
class ComplexOfGroups:
    """``local[v]`` is G_v, ``edge_hom[a]`` maps G_{i(a)} into G_{t(a)}, and
    ``twist[(a, b)]`` is an element of G_{t(a)} for each composable pair.

    Twists missing from the mapping default to the identity.
    """

    base: Scwol
    local: tuple[FiniteGroup, ...]
    edge_hom: tuple[GroupHom, ...]
    twist: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.local) != self.base.n_vertices:
            raise ValueError("need one local group per vertex")
        if len(self.edge_hom) != self.base.n_edges:
            raise ValueError("need one homomorphism per edge")
        filled = {pair: 0 for pair in self.base.comp}
        filled.update(self.twist)
        object.__setattr__(self, "twist", filled)

    @property
    def dim(self) -> int:
        return dimension(self.base)

    def psi(self, a: int, x: int) -> int:
        return self.edge_hom[a].map[x]

    def with_hom(self, a: int, hom: GroupHom) -> "ComplexOfGroups":
        homs = list(self.edge_hom)
        homs[a] = hom
        return ComplexOfGroups(self.base, self.local, tuple(homs), dict(self.twist))

    def with_twist(self, pair: tuple[int, int], value: int) -> "ComplexOfGroups":
        tw = dict(self.twist)
        tw[pair] = value
        return ComplexOfGroups(self.base, self.local, self.edge_hom, tw)


def validate_complex(c: ComplexOfGroups) -> ValidationReport:
    s = c.base
    report = ValidationReport("complex")
    report.extend(validate_scwol(s))
    E = s.edges
    homs_ok = True
    for a, h in enumerate(c.edge_hom):
        if h.dom is not c.local[s.init[a]] and h.dom != c.local[s.init[a]]:
            report.add("hom-domain", (E[a],), f"psi_{E[a]} must be defined on the local group at i({E[a]})")
            homs_ok = False
            continue
        if h.cod is not c.local[s.term[a]] and h.cod != c.local[s.term[a]]:
            report.add("hom-codomain", (E[a],), f"psi_{E[a]} must land in the local group at t({E[a]})")
            homs_ok = False
            continue
        sub = check_hom(h, injective=True)
        if not sub.ok:
            homs_ok = False
            report.extend(sub, prefix=f"psi_{E[a]}:")
    for (a, b), g in c.twist.items():
        if (a, b) not in s.comp:
            report.add("twist-domain", (E[a], E[b]), f"twist given for non-composable pair ({E[a]},{E[b]})")
        elif not 0 <= g < c.local[s.term[a]].order:
            report.add("twist-range", (E[a], E[b]), "twist element outside the local group at t(a)")
            homs_ok = False
    if not homs_ok:
        return report
    for a, b in composable_sequences(s, 2):
        ab = s.comp.get((a, b))
        if ab is None:
            continue
        G = c.local[s.term[a]]
        g = c.twist[(a, b)]
        gi = G.inv[g]
        for x in range(c.local[s.init[b]].order):
            lhs = G.mul[G.mul[g][c.psi(ab, x)]][gi]
            rhs = c.psi(a, c.psi(b, x))
            if lhs != rhs:
                xn = c.local[s.init[b]].names[x]
                report.add(
                    "cocycle-i",
                    (E[a], E[b], xn),
                    f"Ad(g_{E[a]},{E[b]}) psi_{E[ab]}({xn}) = {G.names[lhs]} but psi_{E[a]} psi_{E[b]}({xn}) = {G.names[rhs]}",
                )
                break
    for a, b, cc in composable_sequences(s, 3):
        bc, ab = s.comp.get((b, cc)), s.comp.get((a, b))
        if bc is None or ab is None:
            continue
        G = c.local[s.term[a]]
        lhs = G.mul[c.psi(a, c.twist[(b, cc)])][c.twist[(a, bc)]]
        rhs = G.mul[c.twist[(a, b)]][c.twist[(ab, cc)]]
        if lhs != rhs:
            report.add(
                "cocycle-ii",
                (E[a], E[b], E[cc]),
                f"psi_a(g_b,c) g_a,bc = {G.names[lhs]} but g_a,b g_ab,c = {G.names[rhs]} for ({E[a]},{E[b]},{E[cc]})",
            )
    return report


@dataclass(frozen=True, eq=False)
class InducedComplex:
    """The complex of groups of an action, with the choices that produced it.

    ``vertex_lift[v]`` is the chosen vertex of X over v, ``edge_lift[a]`` the
    unique edge over a starting at the lift of i(a), and ``section[a]`` the
    group element carrying t(edge_lift[a]) to the lift of t(a).
    ``embedding[v][x]`` is the acting-group element for local element x.
    """

    complex: ComplexOfGroups
    quotient: Quotient
    vertex_lift: tuple[int, ...]
    edge_lift: tuple[int, ...]
    section: tuple[int, ...]
    embedding: tuple[tuple[int, ...], ...]


def induced_complex(s: Scwol, act: ScwolAction) -> InducedComplex:
    report = validate_action(s, act)
    if not report.ok:
        raise ScwolError("invalid action: " + "; ".join(str(v) for v in report.violations))
    if not s.is_connected():
        raise ScwolError("induced_complex needs a connected scwol")
    G = act.group
    q = quotient(s, act)
    Y = q.scwol
    lifts = q.vertex_reps
    local, embeds, pos = [], [], []
    for v, rep in enumerate(lifts):
        stab = [g for g in range(G.order) if act.vertex_perm[g][rep] == rep]
        sub, emb = G.subgroup(stab, name=f"Stab({s.vertices[rep]})")
        local.append(sub)
        embeds.append(emb)
        pos.append({g: i for i, g in enumerate(emb)})
    edge_lift, section = [], []
    for a in range(Y.n_edges):
        start = lifts[Y.init[a]]
        lifted = [e for e in range(s.n_edges) if q.edge_proj[e] == a and s.init[e] == start]
        if len(lifted) != 1:
            raise ScwolError(f"edge orbit {Y.edges[a]} has {len(lifted)} lifts at the chosen vertex")
        e = lifted[0]
        target = lifts[Y.term[a]]
        k = min(g for g in range(G.order) if act.vertex_perm[g][s.term[e]] == target)
        edge_lift.append(e)
        section.append(k)
    homs = []
    for a in range(Y.n_edges):
        k, ki = section[a], G.inv[section[a]]
        i, t = Y.init[a], Y.term[a]
        images = []
        for x in embeds[i]:
            y = G.prod(k, x, ki)
            if y not in pos[t]:
                raise ScwolError(f"conjugated stabilizer of {Y.vertices[i]} escapes the stabilizer of {Y.vertices[t]}")
            images.append(pos[t][y])
        homs.append(GroupHom(local[i], local[t], images))
    twist = {}
    for (a, b), ab in Y.comp.items():
        g = G.prod(section[a], section[b], G.inv[section[ab]])
        t = Y.term[a]
        if g not in pos[t]:
            raise ScwolError(f"twist for ({Y.edges[a]},{Y.edges[b]}) is not in the local group")
        twist[(a, b)] = pos[t][g]
    cog = ComplexOfGroups(Y, tuple(local), tuple(homs), twist)
    return InducedComplex(cog, q, tuple(lifts), tuple(edge_lift), tuple(section), tuple(embeds))


def complex_to_dict(c: ComplexOfGroups) -> dict:
    """Serialise to the project-file layout (explicit tables for every local group)."""
    s = c.base
    groups = {}
    local = {}
    for v, G in enumerate(c.local):
        key = f"G_{s.vertices[v]}"
        groups[key] = {
            "elements": list(G.names),
            "table": [[G.names[y] for y in row] for row in G.mul],
            "generators": [G.names[x] for x in G.generators],
        }
        local[s.vertices[v]] = key
    homs = {}
    for a, h in enumerate(c.edge_hom):
        homs[s.edges[a]] = {h.dom.names[x]: h.cod.names[y] for x, y in enumerate(h.map)}
    twists = [
        [s.edges[a], s.edges[b], c.local[s.term[a]].names[g]] for (a, b), g in sorted(c.twist.items())
    ]
    return {"scwol": s.to_dict(), "groups": groups, "complex": {"local": local, "homs": homs, "twists": twists}}


def graph_of_groups(
    s: Scwol,
    local: Sequence[FiniteGroup],
    homs: Mapping[int, GroupHom] | None = None,
) -> ComplexOfGroups:
    """Convenience constructor for one-dimensional bases; missing homs must have trivial domain."""
    homs = dict(homs or {})
    out = []
    for a in range(s.n_edges):
        if a in homs:
            out.append(homs[a])
        else:
            dom, cod = local[s.init[a]], local[s.term[a]]
            if dom.order != 1:
                raise ValueError(f"edge {s.edges[a]} needs an explicit homomorphism")
            out.append(GroupHom.trivial(dom, cod))
    return ComplexOfGroups(s, tuple(local), tuple(out), {})
