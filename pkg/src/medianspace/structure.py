"""Bridges between convex sets, the strong-separation embedding, and hull bounds.

Every check is exact.  Where a statement about connected spaces only holds
up to one edge on a graph, the slack ``delta`` is passed and reported
explicitly rather than absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import (
    BadParams,
    IntersectionNotSingleton,
    NoFamilyFound,
    NotInHull,
    NotStronglySeparated,
)
from .halfspaces import (
    Halfspace,
    branched_at,
    enumerate_walls,
    rank,
    relation_of_masks,
    Relation,
    separating,
    wall_interval,
)
from .report import Report, check
from .space import MedianSpace, iter_bits, popcount

A_BRIDGE = "Conv(π_C1(C2), π_C2(C1)) ≅ π_C1(C2) × [x, π_C2(x)]"
A_EMBED = "f(x) = (π_C1(x), π_C2(x), π_[c1,c2](x)) isometric into l1 product"
A_DECOMP = "W(x,y) = W(π_C1 x, π_C1 y) ⊔ W(π_C2 x, π_C2 y) ⊔ W(π_[c1,c2] x, π_[c1,c2] y)"
A_NCUBE = "[x, x0] ≅ [π_C1(x), x0] × [π_C2(x), x0]"
A_HULL = "Conv(N_r(C)) ⊆ N_nr(C)"
A_SEP = "∩{h ∈ H_a : a ∈ h} = {a}"


def _mask(S, C, what="set"):
    m = S.mask(C)
    if not m:
        raise BadParams(f"empty {what}")
    return m


def _require_convex(S, m, what):
    if not S.is_convex_mask(m):
        raise BadParams(f"{what} is not convex")


def _pairwise_l1(S, parts, idx):
    """Sum over ``parts`` (arrays of images) of the pairwise distance matrices."""
    D = S._dist
    total = np.zeros((len(idx), len(idx)), dtype=D.dtype)
    for img in parts:
        total = total + D[np.ix_(img, img)]
    return total


def _max_defect(S, lhs, rhs, idx):
    diff = np.abs(lhs - rhs)
    k = int(np.argmax(diff)) if diff.size else 0
    i, j = divmod(k, len(idx))
    worst = S.unscaled(diff.flat[k]) if diff.size else Fraction(0)
    return worst, (S.points[idx[i]], S.points[idx[j]])


@dataclass(frozen=True)
class Bridge:
    g1: frozenset
    g2: frozenset
    c1: str | None  # set when both gates are single points
    c2: str | None
    span: frozenset  # [c1, c2], or the interval [x, π_C2(x)] used for the product check
    distance: Fraction


def bridge(S: MedianSpace, C1, C2) -> tuple[Bridge, Report]:
    """Mutual gates of two convex sets and the product structure of their hull."""
    m1, m2 = _mask(S, C1), _mask(S, C2)
    _require_convex(S, m1, "C1")
    _require_convex(S, m2, "C2")
    gate1, gate2 = S.gate_array(m1), S.gate_array(m2)
    g1 = S.from_indices(set(gate1[S.indices(m2)].tolist()))
    g2 = S.from_indices(set(gate2[S.indices(m1)].tolist()))
    rep = Report("bridge")
    rep.add(check("gate sets are convex", A_BRIDGE, S.is_convex_mask(g1) and S.is_convex_mask(g2)))

    # the two gate sets are isometric through the mutual projection
    i1 = S.indices(g1)
    image = gate2[i1]
    D = S._dist
    iso = len(set(image.tolist())) == popcount(g2) == len(i1) and np.array_equal(
        D[np.ix_(i1, i1)], D[np.ix_(image, image)]
    )
    rep.add(check("projection maps one gate set isometrically onto the other", A_BRIDGE, bool(iso)))

    x = int(i1[0])
    span = S.interval_mask(x, int(gate2[x]))
    hull, _ = S.hull_mask(g1 | g2)
    idx = S.indices(hull)
    p1 = S.gate_array(g1)[idx]
    p2 = S.gate_array(span)[idx]
    pairs = set(zip(p1.tolist(), p2.tolist()))
    bij = len(pairs) == len(idx) == popcount(g1) * popcount(span)
    rep.add(check("hull of the gates maps bijectively onto gate × interval", A_BRIDGE, bij,
                  hull=len(idx), gate=popcount(g1), interval=popcount(span)))
    lhs = D[np.ix_(idx, idx)]
    rhs = _pairwise_l1(S, [p1, p2], idx)
    worst, where = _max_defect(S, lhs, rhs, idx)
    rep.add(check("hull of the gates is the l1 product", A_BRIDGE, worst == 0, witness=where,
                  max_defect=worst))
    single = popcount(g1) == 1 and popcount(g2) == 1
    c1 = S.points[g1.bit_length() - 1] if single else None
    c2 = S.points[g2.bit_length() - 1] if single else None
    if single:
        span = S.interval_mask(g1.bit_length() - 1, g2.bit_length() - 1)
    b = Bridge(S.labels(g1), S.labels(g2), c1, c2, S.labels(span), S.dist(x, int(gate2[x])))
    return b, rep


def _strong_gates(S, m1, m2):
    if m1 & m2:
        raise NotStronglySeparated("sets intersect")
    walls = [w.index for w in enumerate_walls(S) if w.splits(m1) and w.splits(m2)]
    if walls:
        raise NotStronglySeparated(f"walls {walls} are transverse to both sets")
    c1 = int(S.gate_array(m1)[S.indices(m2)[0]])
    c2 = int(S.gate_array(m2)[S.indices(m1)[0]])
    return c1, c2


def embed_check(S: MedianSpace, C1, C2) -> Report:
    """The map to (C1, C2, [c1, c2]) is an l1 isometry on Conv(C1 ∪ C2)."""
    m1, m2 = _mask(S, C1), _mask(S, C2)
    _require_convex(S, m1, "C1")
    _require_convex(S, m2, "C2")
    c1, c2 = _strong_gates(S, m1, m2)
    rep = Report("embed-check")
    hull, _ = S.hull_mask(m1 | m2)
    rep.add(check("join of C1 and C2 is their hull", A_EMBED, S.join_mask(m1, m2) == hull))
    span = S.interval_mask(c1, c2)
    idx = S.indices(hull)
    parts = [S.gate_array(m)[idx] for m in (m1, m2, span)]
    lhs = S._dist[np.ix_(idx, idx)]
    rhs = _pairwise_l1(S, parts, idx)
    worst, where = _max_defect(S, lhs, rhs, idx)
    rep.add(check("d(x,y) = d1 + d2 + d3 for all pairs of the hull", A_EMBED, worst == 0,
                  witness=where, pairs=len(idx) ** 2, max_defect=worst,
                  c1=S.points[c1], c2=S.points[c2]))
    return rep


def wall_decomposition_check(S: MedianSpace, C1, C2, x, y) -> Report:
    m1, m2 = _mask(S, C1), _mask(S, C2)
    c1, c2 = _strong_gates(S, m1, m2)
    hull, _ = S.hull_mask(m1 | m2)
    i, j = S.index[x], S.index[y]
    if not (hull >> i & 1 and hull >> j & 1):
        raise NotInHull("x and y must lie in Conv(C1 ∪ C2)")
    span = S.interval_mask(c1, c2)
    parts = []
    for m in (m1, m2, span):
        g = S.gate_array(m)
        parts.append(wall_interval(S, 1 << int(g[i]), 1 << int(g[j])))
    whole = wall_interval(S, 1 << i, 1 << j)
    sets = [set(p.walls) for p in parts]
    disjoint = all(not (a & b) for a, b in combinations(sets, 2))
    union = set().union(*sets) == set(whole.walls)
    total = sum((p.measure for p in parts), Fraction(0))
    rep = Report("decompose")
    sizes = [len(p) for p in parts]
    rep.add(check("parts are pairwise disjoint", A_DECOMP, disjoint, witness=sizes, sizes=sizes))
    rep.add(check("parts cover W(x,y) exactly", A_DECOMP, union, witness=sorted(whole.walls),
                  walls=len(whole)))
    rep.add(check("measures add up to d(x,y)", A_DECOMP, total == S.dist(i, j),
                  measures=[p.measure for p in parts], distance=S.dist(i, j)))
    return rep


def interval_product_check(S: MedianSpace, C1, C2, x) -> Report:
    """For C1 ∩ C2 = {x0}: [x, x0] is the product of the projected intervals."""
    m1, m2 = _mask(S, C1), _mask(S, C2)
    common = m1 & m2
    if popcount(common) != 1:
        raise IntersectionNotSingleton(f"C1 ∩ C2 has {popcount(common)} points")
    x0 = common.bit_length() - 1
    hull, _ = S.hull_mask(m1 | m2)
    i = S.index[x]
    if not hull >> i & 1:
        raise NotInHull("x must lie in Conv(C1 ∪ C2)")
    gate1, gate2 = S.gate_array(m1), S.gate_array(m2)
    I = S.interval_mask(i, x0)
    A = S.interval_mask(int(gate1[i]), x0)
    B = S.interval_mask(int(gate2[i]), x0)
    idx = S.indices(I)
    p1, p2 = gate1[idx], gate2[idx]
    image = set(zip(p1.tolist(), p2.tolist()))
    target = {(a, b) for a in S.indices(A).tolist() for b in S.indices(B).tolist()}
    rep = Report("interval-product")
    rep.add(check("y -> (π_C1 y, π_C2 y) is a bijection onto the product", A_NCUBE,
                  image == target and len(image) == len(idx),
                  interval=len(idx), factors=[popcount(A), popcount(B)]))
    lhs = S._dist[np.ix_(idx, idx)]
    worst, where = _max_defect(S, lhs, _pairwise_l1(S, [p1, p2], idx), idx)
    rep.add(check("distances are l1 sums", A_NCUBE, worst == 0, witness=where, max_defect=worst))
    return rep


def hull_neighborhood_check(S: MedianSpace, C, r) -> Report:
    """Conv of the closed r-neighbourhood of C stays within rank(S)·r of C."""
    r = Fraction(r)
    if r < 0:
        raise BadParams("radius must be nonnegative")
    cmask = _mask(S, C)
    n = rank(S)
    to_c = S.dist_to_set(cmask)
    nbhd = S.from_bool(to_c <= _scaled_floor(S, r))
    hull, _ = S.hull_mask(nbhd)
    reach = S.unscaled(to_c[S.indices(hull)].max())
    rep = Report("hull")
    rep.add(check("hull of the r-neighbourhood lies in the nr-neighbourhood", A_HULL,
                  reach <= n * r, witness=reach, rank=n, r=r, max_distance=reach,
                  bound=n * r, tight=(reach == n * r), hull=popcount(hull), neighbourhood=popcount(nbhd)))
    return rep


def _scaled_floor(S, q: Fraction):
    v = q * S.scale
    return v.numerator // v.denominator


@dataclass(frozen=True)
class NearHalfspace:
    halfspace: Halfspace
    dist_a: Fraction  # d(a, h)
    dist_b: Fraction  # d(b, h^c)
    target: Fraction  # d(a, b) / rank
    slack: Fraction  # largest edge weight at a

    @property
    def certified(self) -> bool:
        return self.dist_a <= self.slack and self.dist_b >= self.target - self.slack


def near_halfspace(S: MedianSpace, a, b) -> NearHalfspace:
    """A halfspace separating b from a, touching a, as deep around b as possible."""
    i, j = S.index[a], S.index[b]
    if i == j:
        raise BadParams("a and b must differ")
    walls = enumerate_walls(S)
    best = None
    for h in separating(S, a, b):
        if not any(i in e for e in walls[h.wall].edges):
            continue
        da = S.unscaled(S.dist_to_set(h.mask)[i])
        db = S.unscaled(S.dist_to_set(S.full & ~h.mask)[j])
        key = (-db, da, h.wall)
        if best is None or key < best[0]:
            best = (key, h, da, db)
    _, h, da, db = best
    n = rank(S)
    target = S.dist(i, j) / n
    assert db >= target, "no halfspace at a reaches d(a,b)/rank"
    slack = max(w for k, w in S.neighbors(i))
    return NearHalfspace(h, da, db, target, slack)


@dataclass(frozen=True)
class DeepFamily:
    halfspaces: tuple[Halfspace, ...]
    reach: Fraction  # d(a, ∩ h_i)
    bound: Fraction  # d(a,b) - n(n+1)/2 · eps - delta
    eps: Fraction
    delta: Fraction


def _maximal_cliques(adj: list[int]):
    def expand(R, P, X):
        if not P and not X:
            yield R
            return
        pivot = max(iter_bits(P | X), key=lambda v: popcount(P & adj[v]))
        for v in iter_bits(P & ~adj[pivot]):
            yield from expand(R + [v], P & adj[v], X & adj[v])
            P &= ~(1 << v)
            X |= 1 << v

    yield from expand([], (1 << len(adj)) - 1, 0)


def deep_transverse_family(S: MedianSpace, a, b, eps, delta=None) -> DeepFamily:
    """Pairwise transverse halfspaces of H(a, b), each at least eps deep at b,
    whose intersection is as far from a as possible."""
    eps = Fraction(eps)
    i, j = S.index[a], S.index[b]
    n = rank(S)
    dab = S.dist(i, j)
    if not (0 < eps <= dab / n):
        raise BadParams("need 0 < eps <= d(a,b)/rank")
    delta = S.max_edge_weight if delta is None else Fraction(delta)
    cands = []
    for h in separating(S, a, b):
        if S.unscaled(S.dist_to_set(S.full & ~h.mask)[j]) >= eps:
            cands.append(h)
    adj = [0] * len(cands)
    for p, q in combinations(range(len(cands)), 2):
        if relation_of_masks(cands[p].mask, cands[q].mask, S.full) is Relation.TRANSVERSE:
            adj[p] |= 1 << q
            adj[q] |= 1 << p
    best = None
    for clique in _maximal_cliques(adj):
        common = S.full
        for k in clique:
            common &= cands[k].mask
        reach = S.unscaled(S.dist_to_set(common)[i])
        key = (-reach, sorted(cands[k].wall for k in clique))
        if best is None or key < best[0]:
            best = (key, clique, reach)
    bound = dab - Fraction(n * (n + 1), 2) * eps - delta
    if best is None or best[2] < bound:
        raise NoFamilyFound(f"no transverse family reaches {bound} from {a}")
    family = tuple(sorted((cands[k] for k in best[1]), key=lambda h: h.wall))
    return DeepFamily(family, best[2], bound, eps, delta)


def verify_deep_family(S: MedianSpace, a, b, fam: DeepFamily) -> Report:
    """Re-check a family from scratch."""
    i, j = S.index[a], S.index[b]
    n = rank(S)
    hs = fam.halfspaces
    rep = Report("deep-family")
    rep.add(check("members separate b from a", "h_i ∈ H(a,b)",
                  all(h.mask >> j & 1 and not h.mask >> i & 1 for h in hs)))
    rep.add(check("members pairwise transverse", "h_i ⋔ h_j", all(
        relation_of_masks(g.mask, h.mask, S.full) is Relation.TRANSVERSE for g, h in combinations(hs, 2))))
    rep.add(check("at most rank many", "k ≤ n", 1 <= len(hs) <= n, size=len(hs), rank=n))
    depths = [S.unscaled(S.dist_to_set(S.full & ~h.mask)[j]) for h in hs]
    rep.add(check("each complement at least eps from b", "d(h_i^c, b) ≥ eps",
                  all(d >= fam.eps for d in depths), witness=depths, eps=fam.eps))
    common = S.full
    for h in hs:
        common &= h.mask
    reach = S.unscaled(S.dist_to_set(common)[i])
    bound = S.dist(i, j) - Fraction(n * (n + 1), 2) * fam.eps - fam.delta
    rep.add(check("intersection far from a", "d(a, ∩h_i) ≥ d(a,b) - n(n+1)/2·eps - δ",
                  reach >= bound, witness=reach, reach=reach, bound=bound))
    return rep


def strengthened_separation_check(S: MedianSpace, a) -> Report:
    """Halfspaces branched at ``a`` that contain ``a`` cut out exactly {a}."""
    i = S.index[a]
    common = S.full
    for h in branched_at(S, a):
        if h.mask >> i & 1:
            common &= h.mask
    rep = Report("separation")
    rep.add(check("branched halfspaces isolate the point", A_SEP, common == 1 << i,
                  witness=sorted(S.labels(common))))
    return rep
