"""Walls, halfspaces, transversality, rank, depth and facing triples."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .cliques import max_clique, max_independent_set
from .errors import (
    BadParams,
    EmptyIntersection,
    InconsistentWeights,
    NonMedian,
    NotDisjoint,
    PrecondViolated,
)
from .space import MedianSpace, ensure_valid, iter_bits, popcount

BRUTE_FORCE_CROSSCHECK = 16


@dataclass(frozen=True)
class Wall:
    index: int
    sides: tuple[int, int]
    weight: Fraction
    edges: tuple[tuple[int, int], ...]  # (i, j) with i on side 0

    def side_of(self, i: int) -> int:
        return 0 if self.sides[0] >> i & 1 else 1

    def separates(self, amask: int, bmask: int) -> bool:
        s0, s1 = self.sides
        return (amask & ~s0 == 0 and bmask & ~s1 == 0) or (amask & ~s1 == 0 and bmask & ~s0 == 0)

    def splits(self, mask: int) -> bool:
        return bool(mask & self.sides[0]) and bool(mask & self.sides[1])

    def halfspace(self, S: MedianSpace, side: int) -> "Halfspace":
        return Halfspace(S, self.index, side, self.sides[side])


@dataclass(frozen=True)
class Halfspace:
    space: MedianSpace = field(repr=False, compare=False)
    wall: int
    side: int
    mask: int

    @property
    def members(self) -> frozenset:
        return self.space.labels(self.mask)

    def complement(self) -> "Halfspace":
        return Halfspace(self.space, self.wall, 1 - self.side, self.space.full & ~self.mask)

    def __contains__(self, p):
        return bool(self.mask >> self.space.index[p] & 1)

    def __len__(self):
        return popcount(self.mask)

    def __repr__(self):
        pts = sorted(self.members, key=self.space.index.__getitem__)
        if len(pts) > 6:
            pts = pts[:5] + ["..."]
        return f"Halfspace(wall={self.wall}, side={self.side}, {{{', '.join(pts)}}})"


@dataclass(frozen=True)
class WallSet:
    walls: tuple[int, ...]
    measure: Fraction

    def __len__(self):
        return len(self.walls)


@dataclass
class WallTable:
    walls: list[Wall]
    side0: np.ndarray  # bool (walls, points)
    weights: np.ndarray  # scaled weights
    transverse: np.ndarray  # bool (walls, walls)


# -- enumeration ---------------------------------------------------------------


def _theta_classes(S: MedianSpace) -> list[int]:
    """Side-0 masks of the Djokovic-Winkler classes (graph form)."""
    D = S._dist
    E = np.array([(i, j) for i, j, _ in S.edges], dtype=np.int64).reshape(-1, 2)
    weights = [w for *_, w in S.edges]
    for (i, j), w in zip(E, weights):
        if S.dist(int(i), int(j)) != w:
            raise InconsistentWeights(f"edge {S.points[i]}-{S.points[j]} is not a shortest path")
    U, V = E[:, 0], E[:, 1]
    label = np.full(len(E), -1)
    sides = []
    for e in range(len(E)):
        if label[e] >= 0:
            continue
        x, y = E[e]
        same = (D[U, x] + D[V, y]) != (D[U, y] + D[V, x])
        members = np.flatnonzero(same & (label < 0))
        label[members] = len(sides)
        cls_weights = {weights[k] for k in members}
        if len(cls_weights) > 1:
            raise InconsistentWeights(
                f"edges crossing one wall carry weights {sorted(cls_weights)}", wall=len(sides)
            )
        side = np.asarray(D[:, x] < D[:, y], dtype=bool)
        crossing = side[U] != side[V]
        if not np.array_equal(crossing, same):
            raise NonMedian(
                "deleting an edge class does not split the graph into two sides",
                witness=(S.points[x], S.points[y]),
                axiom="walls",
            )
        sides.append(S.from_bool(side))
    return sides


def _convex_bipartitions(S: MedianSpace) -> list[int]:
    """All bipartitions into two nonempty convex sides, point 0 on side 0."""
    n, full = S.n, S.full
    found = []

    def extend(i: int, A: int, B: int):
        if i == n:
            if B and S.is_convex_mask(A) and S.is_convex_mask(B):
                found.append(A)
            return
        bit = 1 << i
        for side in (0, 1):
            A2, B2 = (A | bit, B) if side == 0 else (A, B | bit)
            grown = A2 if side == 0 else B2
            other = B2 if side == 0 else A2
            if S.join_mask(grown, grown) & other:
                continue
            extend(i + 1, A2, B2)

    if n > 1:
        extend(1, 1, 0)
    return [m for m in found if m != full]


def _order_walls(S: MedianSpace, side_masks: list[int], weight_of) -> list[Wall]:
    drafts = []
    for mask in side_masks:
        crossing = [(i, j) for i, j, _ in S.edges if (mask >> i & 1) != (mask >> j & 1)]
        lo = min(min(e) for e in crossing)
        s0 = mask if mask >> lo & 1 else S.full & ~mask
        oriented = tuple(sorted((i, j) if s0 >> i & 1 else (j, i) for i, j in crossing))
        key = (lo, min(tuple(sorted(e)) for e in crossing))
        drafts.append((key, s0, oriented, weight_of(mask, crossing)))
    drafts.sort(key=lambda t: t[0])
    return [
        Wall(k, (s0, S.full & ~s0), w, edges) for k, (_, s0, edges, w) in enumerate(drafts)
    ]


def enumerate_walls(S: MedianSpace) -> list[Wall]:
    """All walls of ``S``, ordered by their minimal incident point."""
    table = S._cache.get("walls")
    if table is not None:
        return table.walls
    ensure_valid(S)
    weights = {(i, j): w for i, j, w in S.edges}

    if S.form == "graph":
        masks = _theta_classes(S)
        if S.n <= BRUTE_FORCE_CROSSCHECK:
            brute = _convex_bipartitions(S)
            canon = lambda ms: sorted(m if m & 1 else S.full & ~m for m in ms)
            assert canon(masks) == canon(brute), "edge classes disagree with convex bipartitions"
        weight_of = lambda mask, crossing: weights[tuple(sorted(crossing[0]))]
    else:
        masks = _convex_bipartitions(S)
        weight_of = lambda mask, crossing: Fraction(1)

    walls = _order_walls(S, masks, weight_of)
    side0 = np.array([S.to_bool(w.sides[0]) for w in walls], dtype=bool).reshape(len(walls), S.n)
    dtype = S._dist.dtype
    wts = np.array([S.scaled(w.weight) for w in walls], dtype=dtype)
    a = side0.astype(np.int64)
    b = (~side0).astype(np.int64)
    meets = [a @ a.T > 0, a @ b.T > 0, b @ a.T > 0, b @ b.T > 0]
    transverse = meets[0] & meets[1] & meets[2] & meets[3]

    total = np.zeros_like(S._dist)
    for k in range(len(walls)):
        sep = side0[k][:, None] != side0[k][None, :]
        total = total + sep.astype(total.dtype) * wts[k]
    bad = np.argwhere(total != S._dist)
    if bad.size:
        i, j = (int(t) for t in bad[0])
        raise NonMedian(
            "distance differs from the measure of separating walls",
            witness=(S.points[i], S.points[j]),
            axiom="metric-measure",
        )
    S._cache["walls"] = WallTable(walls, side0, wts, transverse)
    return walls


def wall_table(S: MedianSpace) -> WallTable:
    enumerate_walls(S)
    return S._cache["walls"]


def halfspaces(S: MedianSpace) -> list[Halfspace]:
    """Both sides of every wall; element ``2*w + s`` is side ``s`` of wall ``w``."""
    return [w.halfspace(S, s) for w in enumerate_walls(S) for s in (0, 1)]


def halfspace_of(S: MedianSpace, members) -> Halfspace:
    mask = S.mask(members)
    for w in enumerate_walls(S):
        for s in (0, 1):
            if w.sides[s] == mask:
                return w.halfspace(S, s)
    raise BadParams("point set is not a halfspace")


# -- relations -------------------------------------------------------------------


class Relation(enum.Enum):
    EQUAL = "equal"
    COMPLEMENTARY = "complementary"
    SUBSET = "nested (first inside second)"
    SUPERSET = "nested (second inside first)"
    DISJOINT = "disjoint"
    COVERING = "covering"
    TRANSVERSE = "transverse"

    @property
    def nested(self) -> bool:
        return self in (Relation.SUBSET, Relation.SUPERSET)


COMPLEMENT_FIRST = {
    Relation.EQUAL: Relation.COMPLEMENTARY,
    Relation.COMPLEMENTARY: Relation.EQUAL,
    Relation.SUBSET: Relation.COVERING,
    Relation.SUPERSET: Relation.DISJOINT,
    Relation.DISJOINT: Relation.SUPERSET,
    Relation.COVERING: Relation.SUBSET,
    Relation.TRANSVERSE: Relation.TRANSVERSE,
}


def relation_of_masks(a: int, b: int, full: int) -> Relation:
    if a == b:
        return Relation.EQUAL
    if a == full & ~b:
        return Relation.COMPLEMENTARY
    if a & ~b == 0:
        return Relation.SUBSET
    if b & ~a == 0:
        return Relation.SUPERSET
    if a & b == 0:
        return Relation.DISJOINT
    if a | b == full:
        return Relation.COVERING
    return Relation.TRANSVERSE


def classify_pair(h1: Halfspace, h2: Halfspace) -> Relation:
    if h1.space is not h2.space:
        raise BadParams("halfspaces of different spaces")
    return relation_of_masks(h1.mask, h2.mask, h1.space.full)


def rank(S: MedianSpace) -> int:
    r = S._cache.get("rank")
    if r is None:
        T = wall_table(S)
        r = S._cache["rank"] = len(max_clique(_adjacency(T.transverse)))
    return r


def _adjacency(matrix: np.ndarray) -> list[int]:
    return [int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little") for row in matrix]


def trace_masks(S: MedianSpace, cmask: int) -> list[int]:
    """Distinct nontrivial traces ``h ∩ C`` of side-0 halfspaces on ``C``, one per trace wall."""
    seen = []
    for w in enumerate_walls(S):
        t0, t1 = w.sides[0] & cmask, w.sides[1] & cmask
        if t0 and t1:
            key = min(t0, t1)
            if key not in seen:
                seen.append(key)
    return seen


def rank_of(S: MedianSpace, C) -> int:
    """Rank of the convex set ``C`` as a median space, via wall traces."""
    cmask = S.mask(C)
    traces = trace_masks(S, cmask)
    adj = [0] * len(traces)
    for i, j in combinations(range(len(traces)), 2):
        if relation_of_masks(traces[i], traces[j], cmask) is Relation.TRANSVERSE:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return len(max_clique(adj))


def wall_interval(S: MedianSpace, A, B) -> WallSet:
    """Walls with ``A`` on one side and ``B`` on the other."""
    amask, bmask = S.mask(A), S.mask(B)
    if not amask or not bmask:
        raise BadParams("wall interval of an empty set")
    chosen = tuple(w.index for w in enumerate_walls(S) if w.separates(amask, bmask))
    walls = enumerate_walls(S)
    measure = sum((walls[k].weight for k in chosen), Fraction(0))
    if popcount(amask) == 1 and popcount(bmask) == 1:
        i, j = amask.bit_length() - 1, bmask.bit_length() - 1
        assert measure == S.dist(i, j), "wall measure differs from distance"
    return WallSet(chosen, measure)


def separating(S: MedianSpace, a, b) -> list[Halfspace]:
    """H(a, b): halfspaces containing ``b`` but not ``a``."""
    i, j = S.index[a], S.index[b]
    out = []
    for w in enumerate_walls(S):
        si, sj = w.side_of(i), w.side_of(j)
        if si != sj:
            out.append(w.halfspace(S, sj))
    return out


# -- boundary and depth ----------------------------------------------------------


def boundary_mask(S: MedianSpace, h: Halfspace) -> int:
    wall = enumerate_walls(S)[h.wall]
    out = 0
    for i, j in wall.edges:
        out |= 1 << (i if h.side == 0 else j)
    return out


def boundary(S: MedianSpace, h: Halfspace) -> frozenset:
    """The h-side endpoints of the edges crossing h's wall."""
    mask = boundary_mask(S, h)
    assert S.is_convex_mask(mask), "boundary is not convex"
    if popcount(mask) >= 2 and rank(S) >= 1:
        assert rank_of(S, mask) < rank(S), "boundary rank does not drop"
    return S.labels(mask)


def depth(S: MedianSpace, h: Halfspace, A=None, form: str = "complement") -> Fraction:
    """Largest distance from a point of ``h ∩ A`` to ``h``'s complement (or boundary)."""
    amask = S.full if A is None else S.mask(A)
    inside = h.mask & amask
    if not inside:
        raise EmptyIntersection("halfspace misses the set")
    if form == "complement":
        target = S.full & ~h.mask
    elif form == "hyperplane":
        target = boundary_mask(S, h)
    else:
        raise BadParams(f"unknown depth form {form!r}")
    return S.unscaled(S.dist_to_set(target)[S.indices(inside)].max())


def branched_at(S: MedianSpace, x) -> list[Halfspace]:
    """Both sides of each wall with a crossing edge at ``x``."""
    i = S.index[x]
    out = []
    for w in enumerate_walls(S):
        if any(i in e for e in w.edges):
            out.extend((w.halfspace(S, 0), w.halfspace(S, 1)))
    return out


# -- separation and facing triples -----------------------------------------------


def _walls_splitting_both(S: MedianSpace, m1: int, m2: int) -> list[int]:
    return [w.index for w in enumerate_walls(S) if w.splits(m1) and w.splits(m2)]


def strongly_separated(S: MedianSpace, C1, C2) -> bool:
    m1, m2 = S.mask(C1), S.mask(C2)
    if m1 & m2:
        raise NotDisjoint("sets intersect")
    result = not _walls_splitting_both(S, m1, m2)
    g1 = set(S.gate_array(m1)[S.indices(m2)].tolist())
    g2 = set(S.gate_array(m2)[S.indices(m1)].tolist())
    assert result == (len(g1) == 1 and len(g2) == 1), "strong separation disagrees with the bridge"
    return result


@dataclass(frozen=True)
class FacingTriple:
    halfspaces: tuple[Halfspace, Halfspace, Halfspace]
    gate: str | None = None

    def verify(self, S: MedianSpace) -> bool:
        masks = [h.mask for h in self.halfspaces]
        if any(a & b for a, b in combinations(masks, 2)):
            return False
        if self.gate is None:
            return True
        return _common_gate(S, masks) == S.index[self.gate]


def _common_gate(S: MedianSpace, masks) -> int | None:
    """The point c with m(x1,x2,x3) = c for all x_i in the sets, if there is one."""
    D = S._dist
    idx = [S.indices(m) for m in masks]
    c = S.median_index(int(idx[0][0]), int(idx[1][0]), int(idx[2][0]))
    for a, b in combinations(range(3), 2):
        ia, ib = idx[a], idx[b]
        lhs = D[np.ix_(ia, [c])] + D[np.ix_([c], ib)]
        if not np.array_equal(lhs, D[np.ix_(ia, ib)]):
            return None
    return c


def facing_triple(H, strong: bool = False) -> FacingTriple | None:
    """First three pairwise-disjoint members of ``H`` (strongly separated, with gate, if asked)."""
    H = list(H)
    if not H:
        return None
    S = H[0].space
    n = len(H)
    disjoint = [0] * n
    for i, j in combinations(range(n), 2):
        if not H[i].mask & H[j].mask:
            disjoint[i] |= 1 << j
            disjoint[j] |= 1 << i
    for i in range(n):
        later_i = disjoint[i] >> (i + 1) << (i + 1)
        for j in iter_bits(later_i):
            common = later_i & disjoint[j] & ~((1 << (j + 1)) - 1)
            for k in iter_bits(common):
                trio = (H[i], H[j], H[k])
                if not strong:
                    return FacingTriple(trio)
                masks = [h.mask for h in trio]
                if any(_walls_splitting_both(S, a, b) for a, b in combinations(masks, 2)):
                    continue
                c = _common_gate(S, masks)
                if c is not None:
                    return FacingTriple(trio, S.points[c])
    return None


def extract_disjoint_family(H) -> list[Halfspace]:
    """Maximum pairwise-disjoint subfamily of a family whose pairs are disjoint or transverse."""
    uniq = []
    for h in H:
        if all(h.mask != g.mask for g in uniq):
            uniq.append(h)
    if not uniq:
        return []
    full = uniq[0].space.full
    n = len(uniq)
    conflict = [0] * n
    for i, j in combinations(range(n), 2):
        rel = relation_of_masks(uniq[i].mask, uniq[j].mask, full)
        if rel in (Relation.DISJOINT, Relation.COMPLEMENTARY):
            continue
        if rel is not Relation.TRANSVERSE:
            raise PrecondViolated(f"pair is {rel.value}", pair=(uniq[i], uniq[j]))
        conflict[i] |= 1 << j
        conflict[j] |= 1 << i
    return [uniq[k] for k in max_independent_set(conflict)]
