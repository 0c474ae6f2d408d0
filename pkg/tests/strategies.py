"""Hypothesis strategies for spaces and point sets."""

from hypothesis import strategies as st

from medianspace import fixtures

SPECS = ["hypercube:2", "hypercube:3", "grid:2", "grid:3", "path:5", "star:3", "substar",
         "weighted_star:4", "substar:3:2:1/2", "star:2*path:3", "grid:2:1"]

_cache = {}


def _build(key):
    if key not in _cache:
        _cache[key] = fixtures.parse_fixture(key) if isinstance(key, str) else \
            fixtures.random_median_graph(key[1], dim=key[2])
    return _cache[key]


@st.composite
def spaces(draw, random=True):
    if random and draw(st.booleans()):
        return _build(("random", draw(st.integers(0, 10_000)), draw(st.integers(2, 4))))
    return _build(draw(st.sampled_from(SPECS)))


@st.composite
def space_and_points(draw, k):
    S = draw(spaces())
    return S, [draw(st.sampled_from(S.points)) for _ in range(k)]


@st.composite
def space_and_subset(draw, min_size=1, max_size=4):
    S = draw(spaces())
    pts = draw(st.lists(st.sampled_from(S.points), min_size=min_size, max_size=max_size))
    return S, pts
