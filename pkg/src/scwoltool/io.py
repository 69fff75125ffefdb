"""Loading project files (YAML or JSON) and metric descriptions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .complex import ComplexOfGroups, InducedComplex, induced_complex
from .groups import FiniteGroup, GroupError, GroupHom, parse_group, trivial_group
from .metric import FiniteMetricSpace
from .scwol import Scwol, ScwolAction, ScwolError
from .words import PathWord, Pi1Presentation, WordError


class ProjectError(ValueError):
    """Malformed or inconsistent project description."""


def read_data(path: str | Path) -> Any:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return json.loads(text)
    return yaml.safe_load(text)


@dataclass
class Project:
    name: str
    scwol: Scwol
    groups: dict[str, FiniteGroup] = field(default_factory=dict)
    complex: ComplexOfGroups | None = None
    action: ScwolAction | None = None
    action_scwol: Scwol | None = None
    aliases: dict[str, str] = field(default_factory=dict)
    run: dict[str, Any] = field(default_factory=dict)
    induced: InducedComplex | None = None

    def complex_of_groups(self) -> ComplexOfGroups:
        """The declared complex, else the one induced by the action, else trivial groups."""
        if self.complex is not None:
            return self.complex
        if self.action is not None:
            if self.induced is None:
                self.induced = induced_complex(self.action_scwol or self.scwol, self.action)
            return self.induced.complex
        return trivial_complex(self.scwol)

    def base_vertex(self, c: ComplexOfGroups | None = None) -> int:
        c = c or self.complex_of_groups()
        base = self.run.get("base")
        if base is None:
            return 0
        if self.complex is None and self.action is not None:
            # the base is named by a vertex upstairs; use its orbit
            s = self.action_scwol or self.scwol
            return self.induced.quotient.vertex_proj[s.vertex_index(base)]  # type: ignore[union-attr]
        return c.base.vertex_index(base)

    def presentation(self, budget: int | None = None) -> Pi1Presentation:
        c = self.complex_of_groups()
        kwargs = {"budget": budget} if budget else {}
        return Pi1Presentation(c, self.base_vertex(c), **kwargs)

    def parsed_aliases(self, p: Pi1Presentation) -> dict[str, PathWord]:
        out: dict[str, PathWord] = {}
        for name, text in self.aliases.items():
            out[name] = p.parse(str(text), aliases=out)
        return out

    def parse_word(self, p: Pi1Presentation, text: str) -> PathWord:
        return p.parse(text, aliases=self.parsed_aliases(p))


def trivial_complex(s: Scwol) -> ComplexOfGroups:
    G = trivial_group()
    local = tuple(G for _ in s.vertices)
    homs = tuple(GroupHom.identity(G) for _ in s.edges)
    return ComplexOfGroups(s, local, homs, {})


def parse_scwol(data: Mapping) -> Scwol:
    try:
        edges = [tuple(e) if not isinstance(e, Mapping) else (e["id"], e["init"], e["term"]) for e in data.get("edges", [])]
        comps = [tuple(c) for c in data.get("compositions", [])]
        return Scwol.build(data["vertices"], edges, comps)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScwolError):
            raise
        raise ProjectError(f"bad scwol description: {exc}") from None


def _hom(spec, dom: FiniteGroup, cod: FiniteGroup) -> GroupHom:
    if spec is None:
        if dom.order != 1:
            raise ProjectError("missing homomorphism for a nontrivial local group")
        return GroupHom.trivial(dom, cod)
    if isinstance(spec, Mapping):
        images = [0] * dom.order
        given = {dom.element(str(k)): cod.element(str(v)) for k, v in spec.items()}
        for x in range(dom.order):
            if x not in given:
                raise ProjectError(f"homomorphism map misses element {dom.names[x]}")
            images[x] = given[x]
        return GroupHom(dom, cod, images)
    return GroupHom.from_generator_images(dom, cod, [cod.element(str(v)) for v in spec])


def parse_complex(s: Scwol, data: Mapping, named: Mapping[str, FiniteGroup]) -> ComplexOfGroups:
    local_spec = data.get("local", {}) or {}
    unknown = set(map(str, local_spec)) - set(s.vertices)
    if unknown:
        raise ProjectError(f"local groups given for unknown vertices {sorted(unknown)}")
    local = tuple(parse_group(local_spec.get(v, "1"), named) for v in s.vertices)
    hom_spec = data.get("homs", {}) or {}
    unknown = set(map(str, hom_spec)) - set(s.edges)
    if unknown:
        raise ProjectError(f"homomorphisms given for unknown edges {sorted(unknown)}")
    homs = tuple(_hom(hom_spec.get(e), local[s.init[a]], local[s.term[a]]) for a, e in enumerate(s.edges))
    twist = {}
    for a_name, b_name, elem in data.get("twists", []) or []:
        a, b = s.edge_index(a_name), s.edge_index(b_name)
        twist[(a, b)] = local[s.term[a]].element(str(elem))
    return ComplexOfGroups(s, local, homs, twist)


def parse_action(s: Scwol, data: Mapping, named: Mapping[str, FiniteGroup]) -> ScwolAction:
    G = parse_group(data["group"], named)
    gens = {}
    for gname, maps in (data.get("generators") or {}).items():
        g = G.element(str(gname))
        vmap = {s.vertex_index(k): s.vertex_index(v) for k, v in (maps.get("vertices") or {}).items()}
        emap = {s.edge_index(k): s.edge_index(v) for k, v in (maps.get("edges") or {}).items()}
        gens[g] = (vmap, emap)
    if G.order == 1:
        return ScwolAction.trivial(s, G)
    return ScwolAction.from_generators(s, G, gens)


def load_project(source: str | Path | Mapping) -> Project:
    """Load a project from a path or an already parsed mapping.

    Raises :class:`ProjectError` (or a more specific ``ValueError``) on bad input.
    """
    if isinstance(source, Mapping):
        data, name = source, str(source.get("name", "project"))
    else:
        data = read_data(source)
        name = str(data.get("name", Path(source).stem)) if isinstance(data, Mapping) else ""
    if not isinstance(data, Mapping) or "scwol" not in data:
        raise ProjectError("a project needs a 'scwol' section")
    try:
        s = parse_scwol(data["scwol"])
        named = {str(k): parse_group(v) for k, v in (data.get("groups") or {}).items()}
        proj = Project(name, s, named, aliases={str(k): str(v) for k, v in (data.get("aliases") or {}).items()})
        if data.get("complex") is not None:
            proj.complex = parse_complex(s, data["complex"], named)
        if data.get("action") is not None:
            proj.action = parse_action(s, data["action"], named)
            proj.action_scwol = s
        proj.run = dict(data.get("run") or {})
    except (GroupError, ScwolError, WordError, ProjectError):
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ProjectError(f"bad project description: {exc}") from None
    return proj


def load_metric(source: str | Path | Mapping) -> FiniteMetricSpace:
    data = source if isinstance(source, Mapping) else read_data(source)
    try:
        return FiniteMetricSpace.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ProjectError(f"bad metric description: {exc}") from None


@dataclass
class UnionConfig:
    kind: str
    space: FiniteMetricSpace
    pieces: list[list[int]]
    core: list[int]
    params: dict[str, int]


def load_union_config(source: str | Path) -> UnionConfig:
    """A union-harness description; ``metric`` is inline or a path relative to the file."""
    data = read_data(source)
    try:
        kind = str(data["kind"])
        ref = data["metric"]
        if isinstance(ref, str):
            space = load_metric(Path(source).parent / ref)
        else:
            space = load_metric(ref)
        index = {str(lab): i for i, lab in enumerate(space.labels)}
        pieces = [[index[str(x)] for x in piece] for piece in data.get("pieces", data.get("parts", []))]
        core = [index[str(x)] for x in data.get("Y", [])]
        params = {k: int(data[k]) for k in ("n", "R", "D", "r", "max_n") if k in data}
    except KeyError as exc:
        raise ProjectError(f"bad union configuration: missing or unknown {exc}") from None
    if kind not in ("union", "finite-union"):
        raise ProjectError(f"unknown union harness kind {kind!r}")
    return UnionConfig(kind, space, pieces, core, params)
