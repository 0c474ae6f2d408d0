"""Measured poc sets, ultrafilters and the realized dual median space.

Proper elements are indexed ``2*w + s``: the two sides of wall ``w``, so the
involution is ``k ^ 1``.  The adjoined ``0`` and ``0*`` are implicit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BadParams
from .fixtures import product
from .halfspaces import enumerate_walls
from .report import Report, check
from .space import MedianSpace, ensure_valid, iter_bits

MAJORITY_EXHAUSTIVE = 64


@dataclass(frozen=True)
class MeasuredPocSet:
    names: tuple[str, ...]
    above: tuple[int, ...]  # above[p]: bitmask of q with p < q
    weights: tuple[Fraction, ...]  # one per wall
    basepoint: tuple[int, ...] | None = None  # chosen side per wall

    @property
    def walls(self) -> int:
        return len(self.weights)

    def star(self, p: int) -> int:
        return p ^ 1

    def less(self, p: int, q: int) -> bool:
        return bool(self.above[p] >> q & 1)

    def relations(self) -> list[tuple[int, int]]:
        return [(p, q) for p in range(len(self.names)) for q in iter_bits(self.above[p])]

    def index(self, name: str) -> int:
        return self.names.index(name)


def make_pocset(names, order, weights, basepoint=None) -> MeasuredPocSet:
    """Close ``order`` (pairs of element indices) under transitivity and the involution.

    Raises BadParams when the result is not a poc set.
    """
    m = len(names)
    if m % 2 or len(weights) * 2 != m:
        raise BadParams("elements must come in complementary pairs, one weight per pair")
    if len(set(names)) != m:
        raise BadParams("duplicate element names")
    weights = tuple(Fraction(w) for w in weights)
    if any(w <= 0 for w in weights):
        raise BadParams("wall weights must be positive")
    above = [0] * m
    for p, q in order:
        if not (0 <= p < m and 0 <= q < m):
            raise BadParams(f"order relation ({p}, {q}) out of range")
        above[p] |= 1 << q
        above[q ^ 1] |= 1 << (p ^ 1)
    changed = True
    while changed:
        changed = False
        for p in range(m):
            grown = above[p]
            for q in iter_bits(above[p]):
                grown |= above[q]
            if grown != above[p]:
                above[p], changed = grown, True
    for p in range(m):
        if above[p] >> p & 1:
            raise BadParams(f"order relation has a cycle through {names[p]!r}")
        if above[p] >> (p ^ 1) & 1:
            raise BadParams(f"{names[p]!r} is comparable with its complement")
    if basepoint is not None:
        basepoint = tuple(int(s) for s in basepoint)
        if len(basepoint) != len(weights):
            raise BadParams("basepoint must choose one side per wall")
    return MeasuredPocSet(tuple(names), tuple(above), weights, basepoint)


@dataclass(frozen=True)
class Ultrafilter:
    sides: tuple[int, ...]

    @property
    def label(self) -> str:
        return "u:" + "".join(map(str, self.sides))

    def elements(self) -> frozenset[int]:
        return frozenset(2 * w + s for w, s in enumerate(self.sides))


def _elements_mask(sides) -> int:
    out = 0
    for w, s in enumerate(sides):
        out |= 1 << (2 * w + s)
    return out


def is_ultrafilter(P: MeasuredPocSet, sides) -> bool:
    U = _elements_mask(sides)
    return all(P.above[p] & ~U == 0 for p in iter_bits(U))


def pocset_of(S: MedianSpace, basepoint=None) -> MeasuredPocSet:
    """Halfspaces ordered by inclusion, complement as involution, wall weights."""
    walls = enumerate_walls(S)
    masks = [w.sides[s] for w in walls for s in (0, 1)]
    names = [f"h{w.index}" + ("" if s == 0 else "*") for w in walls for s in (0, 1)]
    order = [
        (p, q)
        for p in range(len(masks))
        for q in range(len(masks))
        if p != q and masks[p] & ~masks[q] == 0
    ]
    x = S.points[0] if basepoint is None else basepoint
    base = principal_ultrafilter(S, x).sides
    return make_pocset(names, order, [w.weight for w in walls], base)


def principal_ultrafilter(S: MedianSpace, x) -> Ultrafilter:
    i = S.index[x]
    return Ultrafilter(tuple(w.side_of(i) for w in enumerate_walls(S)))


def ultrafilters(P: MeasuredPocSet) -> list[Ultrafilter]:
    """Every consistent total choice, in lexicographic order of the chosen sides."""
    W = P.walls
    closure = [P.above[p] | 1 << p for p in range(2 * W)]
    out = []

    def clash(U: int) -> bool:
        return bool(U & (U >> 1) & _EVEN[W])

    def search(w: int, U: int):
        while w < W and U >> (2 * w) & 3:
            w += 1
        if w == W:
            out.append(Ultrafilter(tuple(0 if U >> (2 * k) & 1 else 1 for k in range(W))))
            return
        for s in (0, 1):
            V = U | closure[2 * w + s]
            if not clash(V):
                search(w + 1, V)

    search(0, 0)
    return out


class _EvenMasks(dict):
    def __missing__(self, W):
        value = sum(1 << (2 * k) for k in range(W))
        self[W] = value
        return value


_EVEN = _EvenMasks()


def ultrafilter_distance(P: MeasuredPocSet, U: Ultrafilter, V: Ultrafilter) -> Fraction:
    """Measure of the walls on which ``U`` and ``V`` choose different sides."""
    return sum((P.weights[w] for w in range(P.walls) if U.sides[w] != V.sides[w]), Fraction(0))


def realize(P: MeasuredPocSet) -> MedianSpace:
    """The dual median space: ultrafilters, adjacent when they differ on one wall."""
    U = ultrafilters(P)
    labels = [u.label for u in U]
    codes = {u.sides: i for i, u in enumerate(U)}
    edges = []
    for i, u in enumerate(U):
        for w in range(P.walls):
            if u.sides[w] == 0:
                flipped = u.sides[:w] + (1,) + u.sides[w + 1 :]
                j = codes.get(flipped)
                if j is not None:
                    edges.append((labels[i], labels[j], P.weights[w]))
    S = MedianSpace.from_graph(labels, edges, name="M(P)")

    bits = np.array([[s for s in u.sides] for u in U], dtype=np.int64).reshape(len(U), P.walls)
    wts = np.array([S.scaled(w) for w in P.weights], dtype=S._dist.dtype)
    measured = (bits[:, None, :] != bits[None, :, :]) @ wts if P.walls else np.zeros_like(S._dist)
    assert np.array_equal(measured, S._dist), "graph distance differs from the wall measure"
    _assert_majority_closed(bits, np.random.default_rng(0))
    ensure_valid(S)
    return S


def _assert_majority_closed(bits: np.ndarray, rng):
    n, W = bits.shape
    if W == 0 or n < 3:
        return
    weights = 1 << np.arange(W, dtype=object) if W > 62 else 1 << np.arange(W, dtype=np.int64)
    codes = bits.astype(weights.dtype) @ weights
    known = set(codes.tolist())
    if n <= MAJORITY_EXHAUSTIVE:
        firsts = range(n)
        for i in firsts:
            a, b, c = codes[i], codes[:, None], codes[None, :]
            maj = (a & b) | (b & c) | (a & c)
            missing = [m for m in np.unique(maj).tolist() if m not in known]
            assert not missing, "majority of ultrafilters is not an ultrafilter"
    else:
        trios = rng.integers(0, n, size=(20000, 3))
        for i, j, k in trios:
            a, b, c = codes[i], codes[j], codes[k]
            assert (a & b) | (b & c) | (a & c) in known, "majority of ultrafilters is not an ultrafilter"


def majority(U: Ultrafilter, V: Ultrafilter, W: Ultrafilter) -> Ultrafilter:
    return Ultrafilter(tuple(1 if a + b + c >= 2 else 0 for a, b, c in zip(U.sides, V.sides, W.sides)))


ANCHOR_DUALITY = "M(H(X)) ≅ X"
ANCHOR_PRODUCT = "M(P1 ⊔ P2) ≅ (M(P1) × M(P2), d_l1)"


def roundtrip_check(S: MedianSpace) -> Report:
    """Points to principal ultrafilters: bijective and distance preserving."""
    rep = Report("roundtrip")
    P = pocset_of(S)
    U = ultrafilters(P)
    image = [principal_ultrafilter(S, x) for x in S.points]
    distinct = len(set(image)) == len(image)
    onto = set(image) == set(U)
    rep.add(check("principal map is injective", ANCHOR_DUALITY, distinct,
                  witness=_first_collision(S, image), points=S.n))
    rep.add(check("every ultrafilter is principal", ANCHOR_DUALITY, onto,
                  witness=sorted(u.label for u in set(U) - set(image)),
                  points=S.n, ultrafilters=len(U)))
    defect = None
    for i in range(S.n):
        for j in range(i + 1, S.n):
            if ultrafilter_distance(P, image[i], image[j]) != S.dist(i, j):
                defect = (S.points[i], S.points[j])
                break
        if defect:
            break
    rep.add(check("distances preserved exactly", ANCHOR_DUALITY, defect is None, witness=defect,
                  pairs=S.n * (S.n - 1) // 2))
    if onto and distinct:
        M = realize(P)
        pos = {u.label: k for k, u in enumerate(U)}
        perm = np.array([pos[u.label] for u in image])
        same = bool(np.array_equal(M._dist[np.ix_(perm, perm)] * S.scale, S._dist * M.scale))
        rep.add(check("realized dual is isometric", ANCHOR_DUALITY, same, points=M.n))
    return rep


def _first_collision(S, image):
    seen = {}
    for x, u in zip(S.points, image):
        if u in seen:
            return (seen[u], x)
        seen[u] = x
    return None


def disjoint_union(P1: MeasuredPocSet, P2: MeasuredPocSet) -> MeasuredPocSet:
    """Walls of ``P1`` then walls of ``P2``, with no relations across."""
    shift = len(P1.names)
    names = [f"L.{n}" for n in P1.names] + [f"R.{n}" for n in P2.names]
    order = P1.relations() + [(p + shift, q + shift) for p, q in P2.relations()]
    base = None
    if P1.basepoint is not None and P2.basepoint is not None:
        base = P1.basepoint + P2.basepoint
    return make_pocset(names, order, P1.weights + P2.weights, base)


def l1_product(S1: MedianSpace, S2: MedianSpace) -> MedianSpace:
    return product(S1, S2)


def contravariance_check(P1: MeasuredPocSet, P2: MeasuredPocSet) -> Report:
    """Realizing a disjoint union gives the l1 product of the realizations."""
    rep = Report("contravariance")
    M = realize(disjoint_union(P1, P2))
    M1, M2 = realize(P1), realize(P2)
    Prod = l1_product(M1, M2)
    w1 = P1.walls
    mapping = {}
    for label in M.points:
        sides = label[2:]
        mapping[label] = f"u:{sides[:w1]}|u:{sides[w1:]}"
    bijective = sorted(mapping.values()) == sorted(Prod.points)
    rep.add(check("canonical map is a bijection", ANCHOR_PRODUCT, bijective,
                  points=M.n, product_points=Prod.n))
    if bijective:
        perm = np.array([Prod.index[mapping[p]] for p in M.points])
        same = bool(np.array_equal(Prod._dist[np.ix_(perm, perm)] * M.scale, M._dist * Prod.scale))
        rep.add(check("distances equal the l1 sums", ANCHOR_PRODUCT, same, points=M.n))
    return rep


def is_isometry(S1: MedianSpace, S2: MedianSpace, mapping: dict) -> bool:
    """Whether ``mapping`` (labels of S1 to labels of S2) is a bijective isometry."""
    if sorted(mapping) != sorted(S1.points) or sorted(mapping.values()) != sorted(S2.points):
        return False
    perm = np.array([S2.index[mapping[p]] for p in S1.points])
    return bool(np.array_equal(S2._dist[np.ix_(perm, perm)] * S1.scale, S1._dist * S2.scale))
