"""Scale-by-scale coarse geometry of finite metric spaces.

Asymptotic-dimension certificates, uniform families, union harnesses,
dimension-bound reports and property-A witnesses.  All arithmetic is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .development import group_ball, r_stabilizer, subspace_of
from .metric import FiniteMetricSpace, connected_components
from .report import ValidationReport
from .words import Pi1Presentation


class SearchLimitExceeded(RuntimeError):
    """The branch-and-bound search hit its node limit without a verdict."""

    def __init__(self, nodes: int):
        super().__init__(f"certificate search stopped after {nodes} nodes")
        self.nodes = nodes


@dataclass(frozen=True)
class AsdimCertificate:
    """``families[c]`` is a list of point-index sets; there are n+1 families."""

    R: int
    D: int
    families: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def n(self) -> int:
        return len(self.families) - 1

    def to_dict(self, X: FiniteMetricSpace | None = None) -> dict:
        name = (lambda i: str(X.labels[i])) if X is not None else (lambda i: i)
        return {
            "R": self.R,
            "D": self.D,
            "families": [[[name(i) for i in s] for s in fam] for fam in self.families],
        }


def r_components(X: FiniteMetricSpace, points: Sequence[int], R: int) -> list[list[int]]:
    """Classes of ``points`` under the chain relation d <= R."""
    idx = list(points)
    if not idx:
        return []
    sub = X.dist[np.ix_(idx, idx)] <= R
    adj = [np.flatnonzero(row).tolist() for row in sub]
    return [[idx[k] for k in comp] for comp in connected_components(adj)]


def certificate_from_coloring(X: FiniteMetricSpace, colors: Sequence[int], R: int, D: int, n: int) -> AsdimCertificate:
    fams = []
    for c in range(n + 1):
        pts = [i for i, k in enumerate(colors) if k == c]
        fams.append(tuple(tuple(sorted(comp)) for comp in r_components(X, pts, R)))
    return AsdimCertificate(R, D, tuple(fams))


def check_certificate(X: FiniteMetricSpace, cert: AsdimCertificate, R: int | None = None, D: int | None = None) -> ValidationReport:
    """Cover, D-boundedness and strict R-disjointness within each family."""
    R = cert.R if R is None else R
    D = cert.D if D is None else D
    report = ValidationReport("certificate")
    covered = set()
    for f, fam in enumerate(cert.families):
        for k, s in enumerate(fam):
            if not s:
                report.add("empty-set", (f, k), f"family {f} contains an empty set")
                continue
            covered.update(s)
            diam = X.set_diameter(s)
            if diam > D:
                report.add("bounded", (f, k), f"set {k} of family {f} has diameter {diam} > {D}")
        for k1, k2 in itertools.combinations(range(len(fam)), 2):
            if not fam[k1] or not fam[k2]:
                continue
            gap = X.set_distance(fam[k1], fam[k2])
            if gap <= R:
                report.add(
                    "disjoint", (f, k1, k2), f"sets {k1} and {k2} of family {f} are at distance {gap} <= {R}"
                )
    missing = sorted(set(range(len(X))) - covered)
    if missing:
        report.add("cover", tuple(missing[:5]), f"{len(missing)} point(s) not covered, e.g. {X.labels[missing[0]]}")
    return report


def _search_order(X: FiniteMetricSpace) -> list[int]:
    n = len(X)
    if n == 0:
        return []
    start = int(np.argmax(X.dist[0]))
    return sorted(range(n), key=lambda i: (int(X.dist[start, i]), i))


def find_asdim_certificate(
    X: FiniteMetricSpace, n: int, R: int, D: int, node_limit: int | None = 2_000_000
) -> AsdimCertificate | None:
    """An (n+1)-family certificate at scale (R, D), or None if none exists.

    Exact branch and bound over colourings of the points by family: a colour
    class is admissible iff each of its R-chain classes has diameter <= D, and
    that condition only gets harder as points are added, which justifies the
    pruning.  ``None`` is a proof of non-existence; hitting ``node_limit``
    raises :class:`SearchLimitExceeded` instead.
    """
    if R < 0 or D < 0 or n < 0:
        raise ValueError("n, R and D must be nonnegative")
    N = len(X)
    dist = X.dist
    order = _search_order(X)
    colors = [-1] * N
    # per colour: R-chain clusters of the points assigned so far
    clusters: list[dict[int, list[int]]] = [dict() for _ in range(n + 1)]
    nodes = 0
    next_id = itertools.count()

    def merge_plan(x: int, c: int):
        near = set()
        for cid, pts in clusters[c].items():
            if dist[x, pts].min() <= R:
                near.add(cid)
        members = [x] + [y for cid in near for y in clusters[c][cid]]
        if len(members) > 1 and dist[np.ix_(members, members)].max() > D:
            return None
        return near, members

    def feasible_somewhere(y: int, used: int) -> bool:
        for c in range(min(n, used + 1) + 1):
            if merge_plan(y, c) is not None:
                return True
        return False

    def rec(k: int, used: int) -> bool:
        nonlocal nodes
        if k == N:
            return True
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise SearchLimitExceeded(nodes)
        x = order[k]
        for c in range(min(n, used + 1) + 1):
            plan = merge_plan(x, c)
            if plan is None:
                continue
            near, members = plan
            removed = {cid: clusters[c].pop(cid) for cid in near}
            cid = next(next_id)
            clusters[c][cid] = members
            colors[x] = c
            ok = True
            for y in order[k + 1:]:
                if dist[x, y] <= R and not feasible_somewhere(y, max(used, c)):
                    ok = False
                    break
            if ok and rec(k + 1, max(used, c)):
                return True
            colors[x] = -1
            del clusters[c][cid]
            for old, pts in removed.items():
                clusters[c][old] = pts
        return False

    if N == 0:
        return AsdimCertificate(R, D, tuple(() for _ in range(n + 1)))
    if rec(0, -1):
        return certificate_from_coloring(X, colors, R, D, n)
    return None


def brute_force_certificate(X: FiniteMetricSpace, n: int, R: int, D: int) -> AsdimCertificate | None:
    """Exhaustive over all colourings; only for tiny spaces."""
    N = len(X)
    for colors in itertools.product(range(n + 1), repeat=N):
        ok = True
        for c in range(n + 1):
            pts = [i for i in range(N) if colors[i] == c]
            if any(X.set_diameter(comp) > D for comp in r_components(X, pts, R)):
                ok = False
                break
        if ok:
            return certificate_from_coloring(X, colors, R, D, n)
    return None


def minimal_families(X: FiniteMetricSpace, R: int, D: int, max_n: int = 4, node_limit: int | None = 2_000_000) -> int | None:
    """Least n admitting a certificate at (R, D), or None if none up to ``max_n``."""
    for n in range(max_n + 1):
        if find_asdim_certificate(X, n, R, D, node_limit) is not None:
            return n
    return None


def check_uniform(
    Xs: Sequence[FiniteMetricSpace], n: int, D: int, R: int, certs: Sequence[AsdimCertificate]
) -> ValidationReport:
    """One (R, D) pair and at most n+1 families across the whole collection."""
    report = ValidationReport("uniform")
    if len(Xs) != len(certs):
        report.add("arity", (), "need one certificate per space")
        return report
    for k, (X, cert) in enumerate(zip(Xs, certs)):
        if cert.n > n:
            report.add("families", (k,), f"space {k} uses {cert.n + 1} families > {n + 1}")
        if cert.D > D:
            report.add("bound", (k,), f"space {k} uses D={cert.D} > {D}")
        if cert.R < R:
            report.add("scale", (k,), f"space {k} certified only at R={cert.R} < {R}")
        report.extend(check_certificate(X, cert, R=R, D=D), prefix=f"space {k}:")
    return report


# -- union harnesses ------------------------------------------------------


@dataclass
class HarnessReport:
    hypotheses: ValidationReport
    n: int
    achieved: AsdimCertificate | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.hypotheses.ok and self.achieved is not None

    def lines(self) -> list[str]:
        out = [f"hypotheses: {'ok' if self.hypotheses.ok else 'FAILED'}"]
        out += ["  " + line for line in self.hypotheses.lines()] if not self.hypotheses.ok else []
        if self.achieved is not None:
            out.append(f"conclusion: n={self.n} certificate at R'={self.achieved.R} D'={self.achieved.D}")
        else:
            out.append(f"conclusion: no n={self.n} certificate found")
        out += self.notes
        return out


def _grow_bound(X: FiniteMetricSpace, n: int, R: int, D: int, node_limit: int | None) -> AsdimCertificate | None:
    """Smallest D' >= D (stepping by one up to the diameter) with a certificate."""
    for d in range(D, max(D, X.diameter()) + 1):
        cert = find_asdim_certificate(X, n, R, d, node_limit)
        if cert is not None:
            return cert
    return None


def union_harness(
    X: FiniteMetricSpace,
    pieces: Sequence[Sequence[int]],
    Y: Sequence[int],
    n: int,
    R: int,
    D: int,
    r: int,
    node_limit: int | None = 2_000_000,
) -> HarnessReport:
    """Check the union hypotheses at fixed scales, then search
    for a certificate of X at the same n, the same R and the least D' >= D."""
    hyp = ValidationReport("union hypotheses")
    covered = set().union(*map(set, pieces)) if pieces else set()
    if covered != set(range(len(X))):
        hyp.add("cover", (), "pieces do not cover X")
    for k, piece in enumerate(pieces):
        sub = X.subspace(piece)
        if find_asdim_certificate(sub, n, R, D, node_limit) is None:
            hyp.add("uniform", (k,), f"piece {k} has no n={n} certificate at R={R}, D={D}")
    if Y and find_asdim_certificate(X.subspace(Y), n, R, D, node_limit) is None:
        hyp.add("core", (), f"Y has no n={n} certificate at R={R}, D={D}")
    ys = set(Y)
    rest = [sorted(set(piece) - ys) for piece in pieces]
    for k1, k2 in itertools.combinations(range(len(rest)), 2):
        if rest[k1] and rest[k2]:
            gap = X.set_distance(rest[k1], rest[k2])
            if gap <= r:
                hyp.add("r-disjoint", (k1, k2), f"pieces {k1} and {k2} minus Y are at distance {gap} <= {r}")
    achieved = _grow_bound(X, n, R, D, node_limit) if hyp.ok else None
    return HarnessReport(hyp, n, achieved)


def finite_union_harness(
    X: FiniteMetricSpace,
    parts: Sequence[Sequence[int]],
    R: int,
    D: int,
    max_n: int = 3,
    node_limit: int | None = 2_000_000,
) -> HarnessReport:
    """Find each part's least n_i at (R, D), then certify X at max n_i and R."""
    hyp = ValidationReport("finite union hypotheses")
    covered = set().union(*map(set, parts)) if parts else set()
    if covered != set(range(len(X))):
        hyp.add("cover", (), "parts do not cover X")
    ns = []
    for k, part in enumerate(parts):
        m = minimal_families(X.subspace(part), R, D, max_n, node_limit)
        if m is None:
            hyp.add("part", (k,), f"part {k} has no certificate with at most {max_n + 1} families")
        else:
            ns.append(m)
    n = max(ns) if ns else 0
    achieved = _grow_bound(X, n, R, D, node_limit) if hyp.ok else None
    return HarnessReport(hyp, n, achieved, [f"part dimensions at R={R}, D={D}: {ns}"])


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    achieved: int

    @property
    def bound(self) -> int:
        return (self.n + 1) * (self.k + 1) - 1

    @property
    def sharp(self) -> int:
        return self.n + self.k

    @property
    def within_bound(self) -> bool:
        return self.achieved <= self.bound

    @property
    def within_sharp(self) -> bool:
        return self.achieved <= self.sharp

    def lines(self) -> list[str]:
        return [
            f"local n={self.n}, development k={self.k}",
            f"achieved m={self.achieved} <= (n+1)(k+1)-1 = {self.bound}: {self.within_bound}",
            f"achieved m={self.achieved} <= n+k = {self.sharp}: {self.within_sharp}",
        ]


def dimension_bound_report(n: int, k: int, achieved: int) -> BoundReport:
    return BoundReport(n, k, achieved)


# -- property A -----------------------------------------------------------


@dataclass(frozen=True)
class PropAWitness:
    index: int
    support_radius: int
    measures: tuple[dict[int, Fraction], ...]


def ball_averaging_witness(X: FiniteMetricSpace, n: int) -> PropAWitness:
    """Uniform probability on the closed n-ball around each point."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    measures = []
    for x in range(len(X)):
        ball = X.ball(x, n)
        w = Fraction(1, len(ball))
        measures.append({y: w for y in ball})
    return PropAWitness(n, n, tuple(measures))


def l1_distance(a: dict[int, Fraction], b: dict[int, Fraction]) -> Fraction:
    return sum((abs(a.get(z, 0) - b.get(z, 0)) for z in a.keys() | b.keys()), Fraction(0))


def check_witness(
    X: FiniteMetricSpace, w: PropAWitness, K: int, points: Iterable[int] | None = None
) -> tuple[Fraction, bool]:
    """(max l1 variation over pairs at distance <= K within ``points``, support ok).

    The support check covers every point: each measure is nonnegative, sums to
    one and lives in the ``support_radius`` ball.
    """
    support_ok = True
    for x, m in enumerate(w.measures):
        if sum(m.values(), Fraction(0)) != 1 or any(v < 0 for v in m.values()):
            support_ok = False
        if any(X.d(x, y) > w.support_radius for y, v in m.items() if v != 0):
            support_ok = False
    pts = sorted(range(len(X)) if points is None else points)
    worst = Fraction(0)
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            if X.d(x, y) <= K:
                worst = max(worst, l1_distance(w.measures[x], w.measures[y]))
    return worst, support_ok


def interior_points(X: FiniteMetricSpace, center: int, n: int, radius: int | None = None) -> list[int]:
    """Points whose n-ball stays inside the ``radius`` ball about ``center``."""
    radius = int(X.dist[center].max()) if radius is None else radius
    return [x for x in range(len(X)) if X.d(center, x) + n <= radius]


def variation_profile(
    X: FiniteMetricSpace, nmax: int, K: int, center: int | None = None, interior: bool = True
) -> list[tuple[int, Fraction | None, bool]]:
    """``(n, max variation, support ok)`` for ball averaging, n = 1..nmax.

    The variation is None when no pair of admissible points is within K.

    With ``interior`` the pairs are restricted to points whose n-balls do not
    see the boundary of the ball about ``center``.
    """
    out = []
    for n in range(1, nmax + 1):
        w = ball_averaging_witness(X, n)
        pts = interior_points(X, center, n) if interior and center is not None else list(range(len(X)))
        var, ok = check_witness(X, w, K, pts)
        vacuous = not any(0 < X.d(x, y) <= K for x in pts for y in pts)
        out.append((n, None if vacuous and len(X) > 1 else var, ok))
    return out


def strictly_decreasing(values: Sequence[Fraction]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def path_variation(n: int, K: int = 1) -> Fraction:
    """Closed form for interior points of a long path: 2K / (2n + 1) while K <= 2n + 1."""
    return Fraction(2 * min(K, 2 * n + 1), 2 * n + 1)


@dataclass
class PropAProbe:
    radius: int
    group_radius: int
    stabilizer_size: int
    ball_size: int
    stabilizer_profile: list[tuple[int, Fraction | None, bool]]
    ball_profile: list[tuple[int, Fraction | None, bool]]

    def lines(self) -> list[str]:
        def fmt(profile):
            return " ".join(f"{n}:{'-' if v is None else v}" for n, v, _ in profile)

        support = all(ok for _, _, ok in self.stabilizer_profile + self.ball_profile)
        return [
            f"W_{self.radius}: {self.stabilizer_size} elements inside a word ball of radius {self.group_radius}",
            f"W_{self.radius} variation by n: {fmt(self.stabilizer_profile)}",
            f"group ball ({self.ball_size} points) interior variation by n: {fmt(self.ball_profile)}",
            f"support condition: {'ok' if support else 'FAILED'}",
        ]


def stabilizer_propA_probe(
    p: Pi1Presentation,
    radius: int,
    nmax: int,
    K: int = 1,
    group_radius: int | None = None,
    budget: int | None = None,
    max_group_radius: int = 40,
) -> PropAProbe:
    """Ball-averaging witnesses on the R-stabilizer (inside a word-metric ball
    large enough to contain it) and on that ball itself."""
    stab = r_stabilizer(p, radius, budget)
    rho = max(1, group_radius or 1)
    while True:
        ball = group_ball(p, rho, budget)
        keys = {p.element_key(w) for w in ball.words}
        if stab.keys() <= keys:
            break
        if rho >= max_group_radius:
            raise RuntimeError(f"R-stabilizer not contained in the word ball of radius {max_group_radius}")
        rho += 1
    W = subspace_of(ball, stab.keys())
    w_profile = variation_profile(W, nmax, K, interior=False)
    b_profile = variation_profile(ball.space, nmax, K, center=0, interior=True)
    return PropAProbe(radius, rho, len(W), len(ball.words), w_profile, b_profile)
