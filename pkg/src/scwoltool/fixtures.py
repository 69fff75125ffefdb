"""Bundled example projects and metric spaces."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .io import Project, load_project, read_data
from .metric import FiniteMetricSpace, path_space

PROJECTS = ("z2z3", "z2seg", "seg_rigid", "s3tri", "circle", "z5point", "simplex", "s3twist", "tetra", "noloops", "girth24")

# graphs of groups and the trivial-twist simplex
DIM1_PROJECTS = ("z2z3", "z2seg", "s3tri", "circle", "z5point", "girth24")


def data_path(name: str) -> Path:
    return Path(str(resources.files("scwoltool") / "data" / name))


def project(name: str) -> Project:
    return load_project(data_path(f"{name}.yaml"))


def path49() -> FiniteMetricSpace:
    """The ball of radius 24 in the integer line."""
    return path_space(49)


def biregular_tree_ball(radius: int = 6, degrees: tuple[int, int] = (3, 2)) -> FiniteMetricSpace:
    """Ball about a degree-``degrees[0]`` vertex of the tree whose vertex degrees
    alternate between the two values along every geodesic."""
    labels = ["r"]
    edges = []
    frontier = [(0, 0)]  # (index, parity of depth)
    for _ in range(radius):
        nxt = []
        for v, parity in frontier:
            children = degrees[parity] - (0 if v == 0 else 1)
            for k in range(children):
                labels.append(f"{labels[v]}.{k}")
                edges.append((v, len(labels) - 1))
                nxt.append((len(labels) - 1, 1 - parity))
        frontier = nxt
    return FiniteMetricSpace.from_graph(labels, edges)


def cross(arm: int = 12) -> tuple[FiniteMetricSpace, list[list[int]]]:
    """Two paths of 2*arm+1 points glued at their midpoints; returns the space and the two paths."""
    labels = ["o"] + [f"{d}{k}" for d in "NESW" for k in range(1, arm + 1)]
    pos = {lab: i for i, lab in enumerate(labels)}
    edges = []
    for d in "NESW":
        prev = "o"
        for k in range(1, arm + 1):
            edges.append((pos[prev], pos[f"{d}{k}"]))
            prev = f"{d}{k}"
    X = FiniteMetricSpace.from_graph(labels, edges)
    horizontal = [pos["o"]] + [pos[f"{d}{k}"] for d in "EW" for k in range(1, arm + 1)]
    vertical = [pos["o"]] + [pos[f"{d}{k}"] for d in "NS" for k in range(1, arm + 1)]
    return X, [sorted(horizontal), sorted(vertical)]


def metric(name: str) -> FiniteMetricSpace:
    return FiniteMetricSpace.from_dict(read_data(data_path(f"{name}.json")))
