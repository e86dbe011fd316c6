"""Shared fixture graphs, tables, and SCMs used across the test modules."""

from fractions import Fraction as F

import pytest

from dofam import Bdmg, JointTable, Scm, product_table, uniform_table
from dofam.scm import Mechanism, NoiseComponent


@pytest.fixture
def cycle_figure():
    """Four-node graph whose direct causes need the iterative procedure:
    i->j->k->l->i plus the parallel pair i->l."""
    return Bdmg(
        ["i", "j", "k", "l"],
        [("i", "j"), ("j", "k"), ("k", "l"), ("l", "i"), ("i", "l")],
    )


@pytest.fixture
def nonmax_figure():
    """Non-maximal ancestral graph: arc chain j-l-h-k with l->k, h->j, isolated i."""
    return Bdmg(
        ["j", "l", "h", "k", "i"],
        [("l", "k"), ("h", "j")],
        [("j", "l"), ("l", "h"), ("h", "k")],
    )


@pytest.fixture
def twopip_figure():
    """Doubled collider chains: two inducing paths between j and k."""
    return Bdmg(
        ["j", "l", "h", "k", "l2", "h2"],
        [("l", "k"), ("h", "j"), ("l2", "k"), ("h2", "j")],
        [("j", "l"), ("l", "h"), ("h", "k"), ("j", "l2"), ("l2", "h2"), ("h2", "k")],
    )


@pytest.fixture
def prefix_figure():
    """Single-PIP misidentification graph: i->j->h->k with arc j<->k."""
    return Bdmg(
        ["i", "j", "h", "k"],
        [("i", "j"), ("j", "h"), ("h", "k")],
        [("j", "k")],
    )


def make_xor_scm(p1=F(1, 2), p2=F(1, 2)):
    """Collider x1 -> x3 <- x2 with x3 = x1 xor x2 and Bernoulli inputs."""
    g = Bdmg(["x1", "x2", "x3"], [("x1", "x3"), ("x2", "x3")])
    comps = [
        NoiseComponent(("x1",), JointTable([("e_x1", 2)], [1 - p1, p1])),
        NoiseComponent(("x2",), JointTable([("e_x2", 2)], [1 - p2, p2])),
        NoiseComponent(("x3",), JointTable([("e_x3", 1)], [F(1)])),
    ]
    mechs = {
        "x1": Mechanism(("e_x1",), (0, 1)),
        "x2": Mechanism(("e_x2",), (0, 1)),
        "x3": Mechanism(("x1", "x2", "e_x3"), (0, 1, 1, 0)),
    }
    return Scm(g, {"x1": 2, "x2": 2, "x3": 2}, comps, mechs)


def make_two_graphs_scm():
    """x1 = e1, x2 = x1 + e2, x3 = x1 + e3 over fair bits."""
    g = Bdmg(["x1", "x2", "x3"], [("x1", "x2"), ("x1", "x3")])
    half = [F(1, 2), F(1, 2)]
    comps = [
        NoiseComponent(("x1",), JointTable([("e_x1", 2)], half)),
        NoiseComponent(("x2",), JointTable([("e_x2", 2)], half)),
        NoiseComponent(("x3",), JointTable([("e_x3", 2)], half)),
    ]
    mechs = {
        "x1": Mechanism(("e_x1",), (0, 1)),
        "x2": Mechanism(("x1", "e_x2"), (0, 1, 1, 2)),
        "x3": Mechanism(("x1", "e_x3"), (0, 1, 1, 2)),
    }
    return Scm(g, {"x1": 2, "x2": 3, "x3": 3}, comps, mechs)


def make_chain_scm():
    """x1 -> x2 -> x3 with noisy (non-deterministic) mechanisms."""
    g = Bdmg(["x1", "x2", "x3"], [("x1", "x2"), ("x2", "x3")])
    comps = [
        NoiseComponent(("x1",), JointTable([("e_x1", 2)], [F(1, 3), F(2, 3)])),
        NoiseComponent(("x2",), JointTable([("e_x2", 2)], [F(1, 4), F(3, 4)])),
        NoiseComponent(("x3",), JointTable([("e_x3", 2)], [F(2, 5), F(3, 5)])),
    ]
    mechs = {
        "x1": Mechanism(("e_x1",), (0, 1)),
        "x2": Mechanism(("x1", "e_x2"), (0, 1, 1, 0)),
        "x3": Mechanism(("x2", "e_x3"), (0, 1, 1, 0)),
    }
    return Scm(g, {"x1": 2, "x2": 2, "x3": 2}, comps, mechs)


def make_triangle_scm():
    """x1 -> x2 -> x3 plus x1 -> x3; the in-between pair of the bivariate axiom."""
    g = Bdmg(["x1", "x2", "x3"], [("x1", "x2"), ("x2", "x3"), ("x1", "x3")])
    comps = [
        NoiseComponent(("x1",), JointTable([("e_x1", 2)], [F(1, 2), F(1, 2)])),
        NoiseComponent(("x2",), JointTable([("e_x2", 2)], [F(1, 4), F(3, 4)])),
        NoiseComponent(("x3",), JointTable([("e_x3", 2)], [F(1, 3), F(2, 3)])),
    ]
    mechs = {
        "x1": Mechanism(("e_x1",), (0, 1)),
        "x2": Mechanism(("x1", "e_x2"), (0, 1, 1, 0)),
        "x3": Mechanism(("x1", "x2", "e_x3"), (0, 1, 1, 0, 1, 0, 0, 1)),
    }
    return Scm(g, {"x1": 2, "x2": 2, "x3": 2}, comps, mechs)


def xor_table():
    """Joint of the fair XOR collider: uniform on the parity-consistent cells."""
    probs = []
    for x1 in range(2):
        for x2 in range(2):
            for x3 in range(2):
                probs.append(F(1, 4) if x3 == x1 ^ x2 else F(0))
    return JointTable([("x1", 2), ("x2", 2), ("x3", 2)], probs)


def biased_pair_table():
    """x2 follows x1 with probability 3/4; x3 an independent fair bit."""
    probs = []
    for x1 in range(2):
        for x2 in range(2):
            for x3 in range(2):
                probs.append(F(1, 2) * (F(3, 4) if x2 == x1 else F(1, 4)) * F(1, 2))
    return JointTable([("x1", 2), ("x2", 2), ("x3", 2)], probs)


def independent_version(table):
    return product_table([table.marginal([n]) for n in table.names])
