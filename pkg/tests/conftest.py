import math

import pytest

from hedgecut import (
    Admg,
    Edge,
    McipInstance,
    ProbabilisticAdmg,
    WeightedInstance,
)

INF = math.inf

# Running example: four observed variables where the effect on y is
# confounded three ways.  Used throughout because its optima under both
# objectives are known in closed form.
Z, T, X, Y = range(4)


def build_confounded4() -> ProbabilisticAdmg:
    g = Admg(
        ["z", "t", "x", "y"],
        [Edge.directed(Z, X), Edge.directed(T, X), Edge.directed(X, Y)],
        [
            Edge.bidirected(Z, X),
            Edge.bidirected(Z, Y),
            Edge.bidirected(T, X),
            Edge.bidirected(Z, T),
        ],
    )
    prob = {
        Edge.directed(Z, X): 1.0,
        Edge.directed(T, X): 1.0,
        Edge.directed(X, Y): 1.0,
        Edge.bidirected(Z, X): 0.7,
        Edge.bidirected(Z, Y): 0.9,
        Edge.bidirected(T, X): 0.7,
        Edge.bidirected(Z, T): 1.0,
    }
    return ProbabilisticAdmg(g, prob)


@pytest.fixture
def confounded4() -> ProbabilisticAdmg:
    return build_confounded4()


# Two-target removal instance whose intervention image is the canonical
# marker-pair example: either breaking the x confounding or the z
# confounding suffices, so the optimum is the cheaper of the two.
def build_twotarget() -> McipInstance:
    g = Admg(
        ["x", "z", "y1", "y2"],
        [Edge.directed(1, 0), Edge.directed(0, 2)],
        [
            Edge.bidirected(0, 1),
            Edge.bidirected(1, 3),
            Edge.bidirected(2, 3),
        ],
    )
    return McipInstance(g, {0: 1.0, 1: 2.0, 2: INF, 3: INF}, frozenset({2, 3}))


@pytest.fixture
def twotarget() -> McipInstance:
    return build_twotarget()


# Four-vertex two-target weighted instance used for the rewrite from
# edge removal to interventions; its image's size and target are known.
def build_pairchain() -> WeightedInstance:
    g = Admg(
        ["x1", "x2", "y1", "y2"],
        [Edge.directed(1, 0), Edge.directed(0, 2)],
        [
            Edge.bidirected(0, 1),
            Edge.bidirected(1, 3),
            Edge.bidirected(2, 3),
        ],
    )
    weights = {
        Edge.directed(1, 0): 1.1,
        Edge.directed(0, 2): 1.3,
        Edge.bidirected(0, 1): 1.7,
        Edge.bidirected(1, 3): 1.9,
        Edge.bidirected(2, 3): 2.3,
    }
    return WeightedInstance(g, weights, frozenset({2, 3}))


@pytest.fixture
def pairchain() -> WeightedInstance:
    return build_pairchain()
