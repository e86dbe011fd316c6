"""Exact discrete structural causal models over acyclic mixed graphs.

Mechanisms are lookup tables, noises are exact joint tables grouped by the
arc-connected components of the graph: noises in different components are
independent by construction, while a component's table may encode the
dependence its arcs stand for.  Joints and interventions are computed by
full enumeration of the noise space, so every probability is an exact
rational.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .graph import Bdmg
from .dist import DistError, JointTable, format_rational, parse_rational


class ScmError(ValueError):
    pass


@dataclass(frozen=True)
class Mechanism:
    """Total assignment table for one node: (parents..., noise) -> value.

    ``order`` lists the parent variables first and the node's noise variable
    last; ``table`` is row-major over that order with the last index fastest.
    """

    order: tuple
    table: tuple

    def evaluate(self, values: dict, cards: dict) -> int:
        idx = 0
        for name in self.order:
            idx = idx * cards[name] + values[name]
        return self.table[idx]


@dataclass(frozen=True)
class NoiseComponent:
    members: tuple          # node names covered by this component
    table: JointTable       # joint over the members' noise variables


class Scm:
    """Graph + cardinalities + noise model + mechanisms; immutable."""

    __slots__ = ("graph", "cards", "components", "mechanisms", "noise_of", "_cache")

    def __init__(self, graph: Bdmg, cards: dict, components, mechanisms: dict):
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "cards", dict(cards))
        object.__setattr__(self, "components", tuple(components))
        object.__setattr__(self, "mechanisms", dict(mechanisms))
        noise_of = {}
        for v, mech in self.mechanisms.items():
            if not mech.order:
                raise ScmError("mechanism for %r has an empty order" % (v,))
            noise_of[v] = mech.order[-1]
        object.__setattr__(self, "noise_of", noise_of)
        object.__setattr__(self, "_cache", {})

    def require_valid(self):
        problems = validate(self).problems
        if problems:
            raise ScmError("invalid SCM: " + "; ".join(problems))

    def __setattr__(self, name, value):
        raise AttributeError("Scm is immutable")

    def noise_card(self, node):
        var = self.noise_of[node]
        for comp in self.components:
            for (n, c) in comp.table.variables:
                if n == var:
                    return c
        raise ScmError("noise variable %r not found" % (var,))

    def component_of(self, node):
        for comp in self.components:
            if node in comp.members:
                return comp
        raise ScmError("node %r not covered by a noise component" % (node,))

    def topological_order(self):
        if "topo" not in self._cache:
            g = self.graph
            remaining = {v: len(g.parents(v)) for v in g.nodes}
            ready = [v for v in g.nodes if remaining[v] == 0]
            out = []
            while ready:
                v = ready.pop(0)
                out.append(v)
                for ch in g.sort_nodes(g.children(v)):
                    remaining[ch] -= 1
                    if remaining[ch] == 0:
                        ready.append(ch)
            if len(out) != len(g.nodes):
                raise ScmError("graph has a directed cycle")
            self._cache["topo"] = tuple(out)
        return self._cache["topo"]

    # --- serialization ------------------------------------------------------

    def to_json_dict(self):
        return {
            "graph": self.graph.to_json_dict(),
            "cards": dict(self.cards),
            "noise": {
                "components": [
                    {
                        "vars": list(v for (v, _c) in comp.table.variables),
                        "cards": {v: c for (v, c) in comp.table.variables},
                        "probs": [format_rational(p) for p in comp.table.probs],
                    }
                    for comp in self.components
                ]
            },
            "mechanisms": {
                v: {"order": list(m.order), "table": list(m.table)}
                for v, m in self.mechanisms.items()
            },
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data):
        try:
            graph = Bdmg.from_json_dict(data["graph"])
            cards = {str(k): int(v) for k, v in data["cards"].items()}
            comps = []
            noise_var_members = {}
            mechanisms = {
                str(v): Mechanism(tuple(m["order"]), tuple(int(x) for x in m["table"]))
                for v, m in data["mechanisms"].items()
            }
            for v, m in mechanisms.items():
                noise_var_members[m.order[-1]] = v
            for entry in data["noise"]["components"]:
                variables = [(v, int(entry["cards"][v])) for v in entry["vars"]]
                table = JointTable(variables, entry["probs"])
                members = tuple(noise_var_members.get(v, v) for v in entry["vars"])
                comps.append(NoiseComponent(members=members, table=table))
        except (TypeError, KeyError, DistError) as exc:
            raise ScmError("malformed SCM JSON: %s" % exc) from exc
        return cls(graph, cards, comps, mechanisms)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class ValidationReport:
    problems: tuple

    @property
    def ok(self):
        return not self.problems


def arc_components(g: Bdmg):
    """Connected components of the arc-only graph, as frozensets of nodes."""
    seen = set()
    comps = []
    for v in g.nodes:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in g.spouses(u):
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    return tuple(comps)


def validate(scm) -> ValidationReport:
    """Check acyclicity, noise-partition/arc agreement, mechanism totality."""
    problems = []
    g = scm.graph
    if not g.is_acyclic():
        cyc = next(c for c in g.strong_components() if len(c) > 1)
        problems.append("graph is cyclic (component %s); simulation unsupported"
                        % sorted(cyc))
    if set(scm.cards) != set(g.nodes):
        problems.append("cardinalities do not cover the node set")
    if set(scm.mechanisms) != set(g.nodes):
        problems.append("mechanisms do not cover the node set")

    declared = tuple(frozenset(c.members) for c in scm.components)
    expected = arc_components(g)
    if sorted(declared, key=sorted) != sorted(expected, key=sorted):
        problems.append(
            "noise components %s do not match arc-connected components %s"
            % (sorted(map(sorted, declared)), sorted(map(sorted, expected)))
        )

    noise_vars = set()
    for comp in scm.components:
        comp_vars = {n for (n, _c) in comp.table.variables}
        noise_vars |= comp_vars
        want = {scm.noise_of[v] for v in comp.members if v in scm.noise_of}
        if comp_vars != want:
            problems.append(
                "component over %s declares noise vars %s, mechanisms use %s"
                % (sorted(comp.members), sorted(comp_vars), sorted(want))
            )

    for v, mech in scm.mechanisms.items():
        if v not in g._index:
            problems.append("mechanism for unknown node %r" % (v,))
            continue
        parents = set(mech.order[:-1])
        if parents != set(g.parents(v)):
            problems.append(
                "mechanism for %r reads %s, parents are %s"
                % (v, sorted(parents), sorted(g.parents(v)))
            )
            continue
        if mech.order[-1] not in noise_vars:
            problems.append("mechanism for %r: noise var %r not in any component"
                            % (v, mech.order[-1]))
            continue
        size = 1
        for name in mech.order[:-1]:
            size *= scm.cards[name]
        size *= scm.noise_card(v)
        if len(mech.table) != size:
            problems.append("mechanism table for %r has %d entries, wants %d (not total)"
                            % (v, len(mech.table), size))
        elif any(not (0 <= x < scm.cards[v]) for x in mech.table):
            problems.append("mechanism table for %r emits out-of-range values" % (v,))
    return ValidationReport(tuple(problems))


def joint(scm: Scm) -> JointTable:
    """Exact pushforward of the noise distribution through the mechanisms."""
    if "joint" in scm._cache:
        return scm._cache["joint"]
    scm.require_valid()
    g = scm.graph
    order = scm.topological_order()
    variables = [(v, scm.cards[v]) for v in g.nodes]
    strides = {}
    acc = 1
    for v, c in reversed(variables):
        strides[v] = acc
        acc *= c
    probs = [Fraction(0)] * acc

    comp_cells = []
    for comp in scm.components:
        names = [n for (n, _c) in comp.table.variables]
        cells = [
            (dict(zip(names, assign)), p)
            for assign, p in zip(comp.table.assignments(), comp.table.probs)
            if p > 0
        ]
        comp_cells.append(cells)

    all_cards = {**scm.cards, **_noise_cards(scm)}
    for combo in itertools.product(*comp_cells):
        values = {}
        p = Fraction(1)
        for cell, q in combo:
            values.update(cell)
            p *= q
        for v in order:
            values[v] = scm.mechanisms[v].evaluate(values, all_cards)
        idx = sum(strides[v] * values[v] for v in g.nodes)
        probs[idx] += p
    table = JointTable(variables, probs)
    scm._cache["joint"] = table
    return table


def _noise_cards(scm):
    if "noise_cards" not in scm._cache:
        out = {}
        for comp in scm.components:
            for (n, c) in comp.table.variables:
                out[n] = c
        scm._cache["noise_cards"] = out
    return scm._cache["noise_cards"]


def intervene_standard(scm: Scm, node: str, replacement: JointTable) -> Scm:
    """Replace ``node``'s equation by an independent draw from ``replacement``.

    The intervened graph loses all arrows into the node and all arcs at it;
    the remaining members of the node's old noise component keep their joint
    law (marginalized over the removed noise) and are re-partitioned along
    the surviving arcs.
    """
    g = scm.graph
    g.check_node(node)
    scm.require_valid()
    if len(replacement.variables) != 1:
        raise ScmError("replacement must be a single-variable table")
    if replacement.variables[0][1] != scm.cards[node]:
        raise ScmError(
            "replacement cardinality %d does not match %r (%d)"
            % (replacement.variables[0][1], node, scm.cards[node])
        )
    g2 = scm.graph.intervened(node)
    g2 = Bdmg(g2.nodes, g2.arrows, g2.arcs)  # re-checks bowlessness
    noise_var = scm.noise_of[node]

    new_comps = [NoiseComponent((node,), JointTable([(noise_var, scm.cards[node])],
                                                    replacement.probs))]
    old = scm.component_of(node)
    for comp in scm.components:
        if comp is old:
            continue
        new_comps.append(comp)
    rest = [v for v in old.members if v != node]
    if rest:
        # split along the arcs that survive the intervention
        sub = {}
        for v in rest:
            comp_nodes = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in g2.spouses(u):
                    if w not in comp_nodes:
                        comp_nodes.add(w)
                        stack.append(w)
            sub[frozenset(comp_nodes)] = None
        for members in sub:
            vars_ = [scm.noise_of[v] for v in members]
            new_comps.append(NoiseComponent(tuple(sorted(members)),
                                            old.table.marginal(vars_)))

    mechanisms = dict(scm.mechanisms)
    mechanisms[node] = Mechanism((noise_var,), tuple(range(scm.cards[node])))
    return Scm(g2, scm.cards, new_comps, mechanisms)


def standard_family(scm: Scm, overrides: Optional[dict] = None):
    """Single-node standard interventions for every node, as a table family.

    Each intervention replaces the node by a copy of its own marginal unless
    an override distribution is supplied.
    """
    from .derive import InterventionalFamily

    overrides = overrides or {}
    base = joint(scm)
    tables = {}
    for v in scm.graph.nodes:
        repl = overrides.get(v)
        if repl is None:
            repl = base.marginal([v])
        tables[v] = joint(intervene_standard(scm, v, repl))
    return InterventionalFamily.from_tables(tables, roster=scm.graph.nodes)


@dataclass(frozen=True)
class AtomicKernelSet:
    """Atomic interventions on one node, plus a reference marginal for it.

    ``kernels`` maps each value of the target to a joint table over the
    remaining variables (in roster order); ``reference`` is a strictly
    positive distribution over the target used to glue the kernels into a
    single interventional joint.
    """

    variables: tuple        # full roster: tuples (name, card)
    target: str
    kernels: dict           # value -> JointTable over variables minus target
    reference: JointTable   # single-variable table over the target

    def __post_init__(self):
        names = [n for (n, _c) in self.variables]
        if self.target not in names:
            raise ScmError("target %r not in roster" % (self.target,))
        card = dict(self.variables)[self.target]
        if set(self.kernels) != set(range(card)):
            raise ScmError("need exactly one kernel per target value")
        rest = tuple((n, c) for (n, c) in self.variables if n != self.target)
        for val, k in self.kernels.items():
            if k.variables != rest:
                raise ScmError("kernel for value %r is not over the remaining roster" % (val,))
        if self.reference.variables != ((self.target, card),):
            raise ScmError("reference marginal must be over the target alone")
        if not self.reference.is_strictly_positive():
            raise ScmError("reference marginal must be strictly positive")


def atomic_to_family(aks: AtomicKernelSet) -> JointTable:
    """Disintegration dP(x) = dA(x_target)(rest) dR(x_target), as one table."""
    names = [n for (n, _c) in aks.variables]
    t_pos = names.index(aks.target)
    probs = []
    for assign in itertools.product(*(range(c) for (_n, c) in aks.variables)):
        val = assign[t_pos]
        rest = assign[:t_pos] + assign[t_pos + 1:]
        kernel = aks.kernels[val]
        probs.append(aks.reference.probs[val] * kernel.prob(dict(zip(
            [n for n in names if n != aks.target], rest))))
    return JointTable(aks.variables, probs)
