"""Compactness profiles, branch approximation, the rigidity detector and
finite isometry groups.

Every verdict carries a witness that can be re-checked without trusting the
search that produced it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product as cartesian

import numpy as np

from .cliques import max_clique, max_independent_set
from .errors import BadParams, PrecondViolated, TooLargeForBruteForce
from .halfspaces import (
    FacingTriple,
    Halfspace,
    Relation,
    boundary_mask,
    branched_at,
    enumerate_walls,
    facing_triple,
    halfspaces,
    rank,
    rank_of,
    relation_of_masks,
    wall_table,
)
from .report import Report, check
from .space import MedianSpace, iter_bits, popcount

A_PROFILE = "pairwise disjoint, transverse to C, depth > eps  =>  finitely many"
A_COVER = "d(x, [x0, x_i]) <= eps"
A_BRANCH = "d_H(Conv({a} ∪ ĥ), h) <= (n(n+1)+1)·eps"
A_RIGID = "no facing triple  =>  Conv(D_1 ∪ ... ∪ D_n) ≅ D_1 × ... × D_n"
A_STAB = "g ∈ Stab(x0), x0 ∉ h  =>  h, gh transverse or disjoint"
A_ORBIT = "|Stab(x0)·x| < ∞,  x = π_C(x0)"


# -- compactness profile -----------------------------------------------------------


@dataclass(frozen=True)
class CompactnessProfile:
    entries: tuple[tuple[Fraction, int], ...]
    families: dict = field(default_factory=dict, compare=False, repr=False)

    def N(self, eps) -> int:
        eps = Fraction(eps)
        for e, n in self.entries:
            if e == eps:
                return n
        raise KeyError(eps)

    @property
    def monotone(self) -> bool:
        ordered = sorted(self.entries)
        return all(a[1] >= b[1] for a, b in zip(ordered, ordered[1:]))


def deep_transverse(S: MedianSpace, C, eps, form: str = "complement") -> list[Halfspace]:
    """Halfspaces transverse to C whose depth in Conv(C) exceeds eps."""
    eps = Fraction(eps)
    cmask = S.mask(C)
    if not cmask:
        raise BadParams("empty set")
    hull, _ = S.hull_mask(cmask)
    out = []
    for h in halfspaces(S):
        inside = h.mask & hull
        if not inside or not (S.full & ~h.mask & hull):
            continue
        target = S.full & ~h.mask if form == "complement" else boundary_mask(S, h)
        reach = S.unscaled(S.dist_to_set(target)[S.indices(inside)].max())
        if reach > eps:
            out.append(h)
    return out


def max_disjoint_family(H: list[Halfspace]) -> list[Halfspace]:
    """Largest pairwise-disjoint subfamily of an arbitrary halfspace family.

    Members may be shrunk to inclusion-minimal ones without losing disjointness,
    so the search runs on the minimal elements only.
    """
    minimal = [h for h in H if not any(g.mask != h.mask and g.mask & ~h.mask == 0 for g in H)]
    uniq = list({h.mask: h for h in minimal}.values())
    conflict = [0] * len(uniq)
    for i, j in combinations(range(len(uniq)), 2):
        if uniq[i].mask & uniq[j].mask:
            conflict[i] |= 1 << j
            conflict[j] |= 1 << i
    return [uniq[k] for k in max_independent_set(conflict)]


def compactness_profile(S: MedianSpace, C, eps_list) -> CompactnessProfile:
    entries, families = [], {}
    for eps in eps_list:
        eps = Fraction(eps)
        fam = max_disjoint_family(deep_transverse(S, C, eps))
        entries.append((eps, len(fam)))
        families[eps] = fam
    prof = CompactnessProfile(tuple(entries), families)
    assert prof.monotone, "profile increases with eps"
    return prof


# -- interval covers ---------------------------------------------------------------


def _dist_to_intervals(S: MedianSpace, x0: int, ends) -> np.ndarray:
    """Scaled distance from every point to the union of [x0, x] over ``ends``."""
    best = None
    ar = np.arange(S.n)
    for x in ends:
        g = S.median_array(x0, x)
        d = S._dist[ar, g]
        best = d if best is None else np.minimum(best, d)
    return best


def interval_cover_check(S: MedianSpace, C, x0, eps) -> tuple[int, list[str]]:
    """Greedy endpoints x_1..x_k in C so that C lies within eps of ∪[x0, x_i]."""
    eps = Fraction(eps)
    cmask = S.mask(C)
    i0 = S.index[x0]
    if not cmask >> i0 & 1:
        raise BadParams("x0 must lie in C")
    limit = (eps * S.scale).__floor__()
    members = S.indices(cmask)
    reach = {}
    ar = np.arange(S.n)
    for x in members.tolist():
        close = S._dist[ar, S.median_array(i0, x)] <= limit
        reach[x] = S.from_bool(close) & cmask
    uncovered, chosen = cmask, []
    while uncovered:
        x = max(members.tolist(), key=lambda y: (popcount(reach[y] & uncovered), -y))
        chosen.append(x)
        uncovered &= ~reach[x]
    d = _dist_to_intervals(S, i0, chosen)
    assert (d[members] <= limit).all(), "cover misses a point"
    return len(chosen), [S.points[x] for x in chosen]


def cover_bound_check(S: MedianSpace, C, x0, eps) -> Report:
    """A deep transverse halfspace is cut by a wall crossing the cover, or contains it."""
    eps = Fraction(eps)
    k, ends = interval_cover_check(S, C, x0, eps)
    i0 = S.index[x0]
    union = 0
    for x in ends:
        union |= S.interval_mask(i0, S.index[x])
    cut = [w.index for w in enumerate_walls(S) if w.splits(union)]
    deep = deep_transverse(S, C, eps)
    stray = [h for h in deep if h.wall not in cut and union & ~h.mask]
    fam = max_disjoint_family(deep)
    rep = Report("cover")
    rep.add(check("deep halfspaces are cut by the cover or contain it", A_COVER, not stray,
                  witness=[sorted(h.members) for h in stray], endpoints=k))
    rep.add(check("disjoint deep family bounded by walls of the cover", A_COVER,
                  len(fam) <= len(cut) + 1, family=len(fam), walls=len(cut)))
    return rep


# -- branch approximation --------------------------------------------------------


def branch_approx_check(S: MedianSpace, h: Halfspace, eps) -> Report:
    """Conv of a deepest point and the boundary approximates a thin halfspace."""
    eps = Fraction(eps)
    inner = [k for k in halfspaces(S) if k.mask & ~h.mask == 0]
    deep = []
    for k in inner:
        if S.dist_to_set(boundary_mask(S, k))[S.indices(k.mask)].max() > eps * S.scale:
            deep.append(k)
    for k1, k2 in combinations(deep, 2):
        if not k1.mask & k2.mask:
            raise PrecondViolated("two disjoint deep halfspaces inside h", pair=(k1, k2))
    bmask = boundary_mask(S, h)
    to_boundary = S.dist_to_set(bmask)
    inside = S.indices(h.mask)
    a = int(inside[np.argmax(to_boundary[inside])])
    hull, _ = S.hull_mask(bmask | 1 << a)
    assert hull & ~h.mask == 0, "hull leaves the halfspace"
    far = S.unscaled(S.dist_to_set(hull)[inside].max())
    n = rank(S)
    delta = S.max_edge_weight
    bound = (n * (n + 1) + 1) * eps + delta
    rep = Report("branch-approx")
    rep.add(check("hull of deepest point and boundary is close to h", A_BRANCH, far <= bound,
                  witness=far, hausdorff=far, bound=bound, rank=n, delta=delta, a=S.points[a],
                  depth=S.unscaled(to_boundary[a])))
    return rep


# -- rigidity -------------------------------------------------------------------


class Verdict(enum.Enum):
    GRID_LIKE = "GRID_LIKE"
    BRANCHING = "BRANCHING"


@dataclass(frozen=True)
class RigidityVerdict:
    verdict: Verdict
    x0: str
    triple: FacingTriple | None = None
    family: tuple[Halfspace, ...] = ()
    lines: tuple[frozenset, ...] = ()
    defects: tuple[str, ...] = ()

    def verify(self, S: MedianSpace) -> bool:
        """Re-check the witness from scratch."""
        if self.triple is not None:
            branched = {h.mask for h in branched_at(S, self.x0)}
            return self.verdict is Verdict.BRANCHING and self.triple.verify(S) and all(
                h.mask in branched for h in self.triple.halfspaces
            )
        masks = [S.mask(line) for line in self.lines]
        problems = _product_defects(S, masks)
        if self.verdict is Verdict.GRID_LIKE:
            return not problems and facing_triple(branched_at(S, self.x0)) is None
        return bool(problems)


def _product_defects(S: MedianSpace, lines: list[int]) -> list[str]:
    out = []
    for k, m in enumerate(lines):
        if not m:
            out.append(f"line {k} is empty")
            return out
        if rank_of(S, m) > 1:
            out.append(f"line {k} has rank > 1")
        degrees = [sum(1 for j, _ in S.neighbors(i) if m >> j & 1) for i in iter_bits(m)]
        if degrees and max(degrees) > 2:
            out.append(f"line {k} branches")
    union = 0
    for m in lines:
        union |= m
    hull, _ = S.hull_mask(union)
    if hull != S.full:
        out.append(f"hull of the lines has {popcount(hull)} of {S.n} points")
    idx = S.indices(hull)
    images = [S.gate_array(m)[idx] for m in lines]
    tuples = set(zip(*(img.tolist() for img in images)))
    size = 1
    for m in lines:
        size *= popcount(m)
    if not (len(tuples) == len(idx) == size):
        out.append(f"projection map hits {len(tuples)} of {size} product points from {len(idx)}")
    D = S._dist
    total = np.zeros((len(idx), len(idx)), dtype=D.dtype)
    for img in images:
        total = total + D[np.ix_(img, img)]
    if not np.array_equal(total, D[np.ix_(idx, idx)]):
        out.append("projection map is not an l1 isometry")
    return out


def rigidity_detect(S: MedianSpace, x0) -> RigidityVerdict:
    """Facing triple at x0, or else the product of lines D_i through x0."""
    H = branched_at(S, x0)
    triple = facing_triple(H)
    if triple is not None:
        return RigidityVerdict(Verdict.BRANCHING, x0, triple=triple)
    i0 = S.index[x0]
    own = [h for h in H if h.mask >> i0 & 1]
    T = wall_table(S).transverse
    adj = [0] * len(own)
    for a, b in combinations(range(len(own)), 2):
        if T[own[a].wall, own[b].wall]:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
    family = tuple(own[k] for k in max_clique(adj))
    bounds = [boundary_mask(S, h) for h in family]
    lines = []
    for k in range(len(family)):
        m = S.full
        for j, b in enumerate(bounds):
            if j != k:
                m &= b
        lines.append(m)
    defects = _product_defects(S, lines)
    verdict = Verdict.BRANCHING if defects else Verdict.GRID_LIKE
    return RigidityVerdict(verdict, x0, family=family, lines=tuple(S.labels(m) for m in lines),
                           defects=tuple(defects))


# -- isometry groups ------------------------------------------------------------


BRUTE_FORCE_POINTS = 10


@dataclass(frozen=True)
class IsometryGroup:
    space: MedianSpace = field(repr=False)
    elements: tuple[tuple[int, ...], ...]
    generators: tuple[tuple[int, ...], ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def act(self, g, mask: int) -> int:
        out = 0
        for i in iter_bits(mask):
            out |= 1 << g[i]
        return out

    def stabilizer(self, x0) -> "IsometryGroup":
        i = self.space.index[x0]
        return IsometryGroup(self.space, tuple(g for g in self.elements if g[i] == i))

    def as_labels(self, g) -> dict:
        P = self.space.points
        return {P[i]: P[j] for i, j in enumerate(g)}


def _compose(g, h):
    return tuple(g[h[i]] for i in range(len(h)))


def _preserves(D, g) -> bool:
    g = np.asarray(g)
    return bool(np.array_equal(D[np.ix_(g, g)], D))


def automorphism_group(S: MedianSpace, generators=None) -> IsometryGroup:
    """All distance-preserving permutations (brute force up to 10 points)."""
    D = S._dist
    n = S.n
    if generators is not None:
        gens = []
        for g in generators:
            g = tuple(S.index[p] for p in g) if g and isinstance(g[0], str) else tuple(int(t) for t in g)
            if sorted(g) != list(range(n)) or not _preserves(D, g):
                raise BadParams("generator is not an isometry")
            gens.append(g)
        ident = tuple(range(n))
        seen, frontier = {ident}, [ident]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    c = _compose(g, a)
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
            frontier = nxt
        return IsometryGroup(S, tuple(sorted(seen)), tuple(gens))
    if n > BRUTE_FORCE_POINTS:
        raise TooLargeForBruteForce(f"{n} points; supply generators")
    profile = [tuple(sorted(row.tolist())) for row in D]
    out = []
    perm = [-1] * n
    used = [False] * n

    def place(i: int):
        if i == n:
            out.append(tuple(perm))
            return
        for j in range(n):
            if used[j] or profile[j] != profile[i]:
                continue
            if any(D[perm[k], j] != D[k, i] for k in range(i)):
                continue
            perm[i], used[j] = j, True
            place(i + 1)
            used[j] = False
        perm[i] = -1

    place(0)
    return IsometryGroup(S, tuple(out))


def _minimal_branched_separators(S: MedianSpace, i0: int, i: int) -> list[Halfspace]:
    sep = [h for h in branched_at(S, S.points[i]) if h.mask >> i & 1 and not h.mask >> i0 & 1]
    return [h for h in sep if not any(g.mask != h.mask and g.mask & ~h.mask == 0 for g in sep)]


def stabilizer_orbit(S: MedianSpace, G: IsometryGroup, x0, x) -> frozenset:
    """Orbit of x under Stab(x0), checked against the bound from branched halfspaces."""
    stab = G.stabilizer(x0)
    i0, i = S.index[x0], S.index[x]
    orbit = {g[i] for g in stab.elements}
    if i != i0:
        mins = _minimal_branched_separators(S, i0, i)
        common = S.full
        for h in mins:
            common &= h.mask
        assert int(S.gate_array(common)[i0]) == i, "x is not the gate of x0 on its minimal separators"
        bound = 1
        for h in mins:
            bound *= len({stab.act(g, h.mask) for g in stab.elements})
        assert len(orbit) <= bound, "orbit exceeds the branched-halfspace bound"
    return S.labels(S.from_indices(orbit))


def stabilizer_wall_check(S: MedianSpace, G: IsometryGroup, x0) -> Report:
    """Elements fixing x0 never nest a halfspace avoiding x0 inside its image."""
    i0 = S.index[x0]
    elems = [g for g in G.elements if g[i0] == i0]
    avoid = [h for h in halfspaces(S) if not h.mask >> i0 & 1]
    bad = None
    seen = {r: 0 for r in Relation}
    for g in elems:
        for h in avoid:
            rel = relation_of_masks(h.mask, G.act(g, h.mask), S.full)
            seen[rel] += 1
            if rel not in (Relation.EQUAL, Relation.TRANSVERSE, Relation.DISJOINT) and bad is None:
                bad = {"element": G.as_labels(g), "halfspace": sorted(h.members), "relation": rel.value}
    rep = Report("group")
    rep.add(check("stabilizer never nests a halfspace in its image", A_STAB, bad is None,
                  witness=bad, elements=len(elems), halfspaces=len(avoid),
                  **{r.name.lower(): c for r, c in seen.items() if c}))
    return rep


def orbit_report(S: MedianSpace, G: IsometryGroup, x0) -> Report:
    rep = Report("group")
    for x in S.points:
        orbit = stabilizer_orbit(S, G, x0, x)
        rep.add(check(f"orbit of {x} under Stab({x0})", A_ORBIT, True, size=len(orbit)))
    return rep
