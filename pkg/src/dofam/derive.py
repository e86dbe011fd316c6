"""Cause sets, the iterative direct-cause procedure, and causal graphs.

A family holds one conditional-independence source per node, read as the
post-intervention law for that node.  Sources can be exact joint tables or
separation oracles over intervened ground-truth graphs; the derivation only
ever asks CI queries, so both back ends are interchangeable.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

from .graph import Bdmg, GraphError, PreconditionError, find_pips, sigma_separated
from .dist import JointTable


class DeriveError(ValueError):
    pass


class CapabilityError(DeriveError):
    """A source cannot answer the requested query shape."""


class ShortcutError(DeriveError):
    """Ancestral shortcut used on a family whose causal graph is not ancestral."""


# --- CI sources -------------------------------------------------------------


class TableSource:
    """CI source backed by an exact joint table."""

    supports_arbitrary_sets = True

    def __init__(self, table: JointTable):
        self.table = table
        self.variables = table.names
        self._memo = {}

    def ci(self, a, b, c=()):
        key = (frozenset(a), frozenset(b), frozenset(c))
        if key not in self._memo:
            self._memo[key] = self.table.ci(key[0], key[1], key[2])
        return self._memo[key]


class GraphSource:
    """CI source backed by sigma-separation in an intervened ground truth.

    Faithful by construction: dependence holds exactly when the graph is
    sigma-connecting.  Graph separations satisfy the compositional graphoid
    properties plus singleton-transitivity and the ordered stabilities, which
    makes these sources ideal theorem-test inputs.
    """

    supports_arbitrary_sets = True

    def __init__(self, intervened_truth: Bdmg):
        self.graph = intervened_truth
        self.variables = intervened_truth.nodes
        self._memo = {}

    def ci(self, a, b, c=()):
        key = (frozenset(a), frozenset(b), frozenset(c))
        if key not in self._memo:
            self._memo[key] = sigma_separated(self.graph, key[0], key[1], key[2])
        return self._memo[key]


class InterventionalFamily:
    """One CI source per node of a shared roster."""

    def __init__(self, sources: dict, roster):
        self.roster = tuple(roster)
        if set(sources) != set(self.roster):
            raise DeriveError("family needs exactly one source per node")
        for v, src in sources.items():
            if set(src.variables) != set(self.roster):
                raise DeriveError("source for %r is over a different roster" % (v,))
        self.sources = dict(sources)

    @classmethod
    def from_tables(cls, tables: dict, roster=None):
        roster = tuple(roster) if roster is not None else tuple(sorted(tables))
        return cls({v: TableSource(t) for v, t in tables.items()}, roster)

    @classmethod
    def from_oracle(cls, ground_truth: Bdmg):
        """Faithful family over a ground-truth graph: intervene, then separate."""
        sources = {
            v: GraphSource(ground_truth.intervened(v)) for v in ground_truth.nodes
        }
        fam = cls(sources, ground_truth.nodes)
        fam.ground_truth = ground_truth
        return fam

    def source(self, v):
        if v not in self.sources:
            raise DeriveError("no intervention source for %r" % (v,))
        return self.sources[v]

    def table(self, v) -> JointTable:
        src = self.source(v)
        if not isinstance(src, TableSource):
            raise CapabilityError("source for %r is not table-backed" % (v,))
        return src.table

    @property
    def table_backed(self):
        return all(isinstance(s, TableSource) for s in self.sources.values())

    def ci(self, i, a, b, c=()):
        """CI answer under the intervention on i."""
        return self.source(i).ci(a, b, c)

    def dependent(self, i, a, b, c=()):
        return not self.ci(i, a, b, c)

    # --- serialization ------------------------------------------------------

    def to_json_dict(self):
        if getattr(self, "ground_truth", None) is not None:
            return {"oracle": {"ground_truth": self.ground_truth.to_json_dict()}}
        return {
            "interventions": {v: self.table(v).to_json_dict() for v in self.roster}
        }

    @classmethod
    def from_json_dict(cls, data):
        if "oracle" in data:
            return cls.from_oracle(Bdmg.from_json_dict(data["oracle"]["ground_truth"]))
        if "interventions" not in data:
            raise DeriveError("family JSON needs 'interventions' or 'oracle'")
        tables = {
            v: JointTable.from_json_dict(t) for v, t in data["interventions"].items()
        }
        rosters = {t.names for t in tables.values()}
        if len(rosters) > 1:
            raise DeriveError("intervention tables disagree on the variable roster")
        return cls.from_tables(tables, roster=next(iter(rosters)))

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))


# --- cause and effect --------------------------------------------------------


@dataclass(frozen=True)
class CausalPreorder:
    """Strict preorder induced by transitive cause: below iff caused but not causing."""

    cause: dict
    eff: dict

    def less(self, i, k):
        return k in self.cause[i] and i not in self.cause[k]

    def equivalent(self, i, k):
        return i != k and k in self.cause[i] and k in self.eff[i]

    def pairs(self):
        out = {"less": [], "equiv": []}
        for i, k in itertools.permutations(sorted(self.cause), 2):
            if self.less(i, k):
                out["less"].append((i, k))
            if i < k and self.equivalent(i, k):
                out["equiv"].append((i, k))
        return out


def cause_relations(fam: InterventionalFamily):
    """cause/eff maps, causal cycles, and the induced preorder."""
    cause = {k: set() for k in fam.roster}
    for i in fam.roster:
        for k in fam.roster:
            if i != k and fam.dependent(i, {i}, {k}):
                cause[k].add(i)
    eff = {i: {k for k in fam.roster if i in cause[k]} for i in fam.roster}
    cc = {
        i: {k for k in fam.roster if k != i and k in cause[i] and k in eff[i]} | {i}
        for i in fam.roster
    }
    cause = {k: frozenset(v) for k, v in cause.items()}
    eff = {k: frozenset(v) for k, v in eff.items()}
    cc = {k: frozenset(v) for k, v in cc.items()}
    return cause, eff, cc, CausalPreorder(cause, eff)


@dataclass(frozen=True)
class TransitivityReport:
    holds: bool
    violations: tuple            # (i, j, k): i causes j, j causes k, i does not cause k
    singleton_transitive: dict   # node -> bool, for sources that could be checked
    condition_a_violations: tuple
    condition_b_violations: tuple
    skipped: tuple

    @property
    def sufficient(self):
        if self.skipped:
            return None
        return (
            all(self.singleton_transitive.values())
            and not self.condition_a_violations
            and not self.condition_b_violations
        )


def check_transitivity(fam: InterventionalFamily) -> TransitivityReport:
    """Axiom check plus the singleton-transitivity sufficient conditions.

    Condition (a): i independent of k given j under do(i); condition (b):
    j dependent on k under do(i); both quantified over i not causing k and
    j causing k.
    """
    from .dist import check_property

    cause, _eff, _cc, _pre = cause_relations(fam)
    violations = []
    for i, j, k in itertools.permutations(fam.roster, 3):
        if i in cause[j] and j in cause[k] and i not in cause[k]:
            violations.append((i, j, k))

    singleton = {}
    skipped = []
    for v in fam.roster:
        src = fam.source(v)
        if isinstance(src, TableSource):
            singleton[v] = check_property(src.table, "singleton_transitivity").holds
        elif isinstance(src, GraphSource):
            # graph separations are singleton-transitive by construction
            singleton[v] = True
        else:
            skipped.append("source for %r does not expose singleton-transitivity" % (v,))

    cond_a = []
    cond_b = []
    for i in fam.roster:
        for k in fam.roster:
            if i == k or i in cause[k]:
                continue
            for j in cause[k]:
                if j == i:
                    continue
                if not fam.ci(i, {i}, {k}, {j}):
                    cond_a.append((i, j, k))
                if fam.ci(i, {j}, {k}):
                    cond_b.append((i, j, k))
    return TransitivityReport(
        holds=not violations,
        violations=tuple(sorted(violations)),
        singleton_transitive=singleton,
        condition_a_violations=tuple(sorted(cond_a)),
        condition_b_violations=tuple(sorted(cond_b)),
        skipped=tuple(skipped),
    )


# --- the iterative procedure ---------------------------------------------------


@dataclass
class CausalDerivation:
    roster: tuple
    cause: dict
    eff: dict
    cc: dict
    preorder: CausalPreorder
    dcause: dict                 # k -> frozenset of direct causes
    icause: dict                 # (i, k) -> frozenset, final intervened causes
    structure: Bdmg              # S: arrows only
    intervened_structures: dict  # i -> S_i
    intervened_graphs: dict      # i -> G_i (arcs included)
    graph: Bdmg                  # G: arrows of S plus every-intervention arcs
    rounds: int
    trace: tuple                 # per-round dcause snapshots
    mode: str = "iterative"

    def icause_of_set(self, i, pair):
        pair = set(pair)
        out = set()
        for k in pair:
            out |= self.icause[(i, k)]
        return frozenset(out - pair)

    def cause_of_set(self, pair):
        pair = set(pair)
        out = set()
        for k in pair:
            out |= self.cause[k]
        return frozenset(out - pair)

    def to_json_dict(self):
        def setmap(m):
            return {k: sorted(v) for k, v in m.items()}

        pre = self.preorder.pairs()
        return {
            "mode": self.mode,
            "rounds": self.rounds,
            "cause": setmap(self.cause),
            "eff": setmap(self.eff),
            "cc": setmap(self.cc),
            "dcause": setmap(self.dcause),
            "icause": {
                i: {k: sorted(self.icause[(i, k)]) for k in self.roster}
                for i in self.roster
            },
            "preorder": {
                "less": [list(p) for p in pre["less"]],
                "equiv": [list(p) for p in pre["equiv"]],
            },
            "trace": [
                {"round": n + 1, "dcause": setmap(snap)}
                for n, snap in enumerate(self.trace)
            ],
            "structure": self.structure.to_json_dict(),
            "graph": self.graph.to_json_dict(),
            "intervened_graphs": {
                i: g.to_json_dict() for i, g in self.intervened_graphs.items()
            },
        }


def _arrows_of(dcause):
    return [(i, k) for k, causes in dcause.items() for i in causes]


def _ancestor_map(g: Bdmg):
    return {v: g.ancestors({v}) for v in g.nodes}


def derive(fam: InterventionalFamily, mode: str = "iterative") -> CausalDerivation:
    """Run the direct-cause computation and build all derived graphs.

    ``iterative`` is the fixed-point procedure: shrink dcause by testing
    dependence given the intervened causes, rebuild the structure, recompute
    intervened causes as ancestors in the structure minus arrows into the
    intervened node, and repeat until the structure stabilizes.  Updates are
    synchronous per round so node enumeration order cannot matter.

    ``ancestral_shortcut`` replaces the intervened causes by plain causes in
    both the direct-cause and the arc tests; it is only sound when the final
    graph is ancestral, which is verified after the fact.
    """
    if mode not in ("iterative", "ancestral_shortcut"):
        raise DeriveError("unknown mode %r" % (mode,))
    roster = fam.roster
    cause, eff, cc, preorder = cause_relations(fam)

    trace = []
    if mode == "iterative":
        dcause = {k: set(cause[k]) for k in roster}
        icause = {(i, k): frozenset(cause[k]) for i in roster for k in roster}
        arrows = frozenset()  # the initial empty structure
        rounds = 0
        max_rounds = len(roster) * max(1, len(roster) - 1) + 1
        while True:
            rounds += 1
            if rounds > max_rounds:
                raise DeriveError("direct-cause iteration failed to stabilize")
            dcause = {
                k: {
                    i
                    for i in dcause[k]
                    if fam.dependent(i, {i}, {k}, icause[(i, k)] - {i})
                }
                for k in roster
            }
            trace.append({k: frozenset(v) for k, v in dcause.items()})
            new_arrows = frozenset(_arrows_of(dcause))
            structure = Bdmg(roster, new_arrows)
            s_i = {i: structure.without_arrows_into(i) for i in roster}
            icause = {}
            for i in roster:
                an_map = _ancestor_map(s_i[i])
                for k in roster:
                    icause[(i, k)] = an_map[k]
            if new_arrows == arrows:
                break
            arrows = new_arrows
    else:
        dcause = {
            k: {
                i for i in cause[k] if fam.dependent(i, {i}, {k}, cause[k] - {i})
            }
            for k in roster
        }
        trace.append({k: frozenset(v) for k, v in dcause.items()})
        structure = Bdmg(roster, _arrows_of(dcause))
        s_i = {i: structure.without_arrows_into(i) for i in roster}
        icause = {(i, k): s_i[i].ancestors({k}) for i in roster for k in roster}
        rounds = 1

    dcause = {k: frozenset(v) for k, v in dcause.items()}
    derivation = CausalDerivation(
        roster=roster,
        cause=cause,
        eff=eff,
        cc=cc,
        preorder=preorder,
        dcause=dcause,
        icause=icause,
        structure=structure,
        intervened_structures=s_i,
        intervened_graphs={},
        graph=structure,
        rounds=rounds,
        trace=tuple(trace),
        mode=mode,
    )

    use_cause = mode == "ancestral_shortcut"
    g_i = {}
    for i in roster:
        arcs = []
        for j, k in itertools.combinations(roster, 2):
            if i in (j, k) or structure.arrow_adjacent(j, k):
                continue
            cond = (
                derivation.cause_of_set({j, k})
                if use_cause
                else derivation.icause_of_set(i, {j, k})
            )
            if fam.dependent(i, {j}, {k}, cond):
                arcs.append((j, k))
        g_i[i] = Bdmg(roster, s_i[i].arrows, arcs)
    derivation.intervened_graphs = g_i

    arcs = []
    for j, k in itertools.combinations(roster, 2):
        if structure.arrow_adjacent(j, k):
            continue
        others = [i for i in roster if i not in (j, k)]
        # the every-intervention rule is read as vacuously false on an
        # empty witness range, so two-node families never gain arcs
        if others and all(g_i[i].has_arc(j, k) for i in others):
            arcs.append((j, k))
    derivation.graph = Bdmg(roster, structure.arrows, arcs)

    if mode == "ancestral_shortcut":
        from .graph import classify

        if not classify(derivation.graph).is_ancestral:
            raise ShortcutError(
                "ancestral shortcut produced a non-ancestral graph; use iterative mode"
            )
    return derivation


def derive_variants(
    fam: InterventionalFamily,
    derivation: CausalDerivation,
    arc_rule: str = "standard",
    arc_policy: str = "every_i",
) -> Bdmg:
    """Causal graph under an alternative arc rule or aggregation policy.

    ``every_C`` places a per-intervention arc only when the pair stays
    dependent under every conditioning set avoiding the three nodes;
    ``some_i`` keeps an arc as soon as one intervention shows it.
    """
    if arc_rule not in ("standard", "every_C"):
        raise DeriveError("unknown arc rule %r" % (arc_rule,))
    if arc_policy not in ("every_i", "some_i"):
        raise DeriveError("unknown arc policy %r" % (arc_policy,))
    roster = derivation.roster
    structure = derivation.structure
    if arc_rule == "every_C":
        for v in roster:
            if not getattr(fam.source(v), "supports_arbitrary_sets", False):
                raise CapabilityError("source for %r cannot answer arbitrary C" % (v,))

    def arc_under(i, j, k):
        if arc_rule == "standard":
            return derivation.intervened_graphs[i].has_arc(j, k)
        rest = [v for v in roster if v not in (i, j, k)]
        for r in range(len(rest) + 1):
            for c in itertools.combinations(rest, r):
                if fam.ci(i, {j}, {k}, c):
                    return False
        return True

    arcs = []
    for j, k in itertools.combinations(roster, 2):
        if structure.arrow_adjacent(j, k):
            continue
        others = [i for i in roster if i not in (j, k)]
        if not others:
            continue
        hits = [arc_under(i, j, k) for i in others]
        if (arc_policy == "every_i" and all(hits)) or (
            arc_policy == "some_i" and any(hits)
        ):
            arcs.append((j, k))
    return Bdmg(roster, structure.arrows, arcs)


def graph_from_observation(
    fam: InterventionalFamily,
    observed: JointTable,
    derivation: Optional[CausalDerivation] = None,
) -> Bdmg:
    """G(P): arrows from the derived structure, arcs read off the observation."""
    if set(observed.names) != set(fam.roster):
        raise DeriveError("observation roster does not match the family")
    if derivation is None:
        derivation = derive(fam)
    arcs = []
    for j, k in itertools.combinations(derivation.roster, 2):
        if derivation.structure.arrow_adjacent(j, k):
            continue
        if not observed.ci({j}, {k}, derivation.cause_of_set({j, k})):
            arcs.append((j, k))
    return Bdmg(derivation.roster, derivation.structure.arrows, arcs)


# --- misidentified direct causes (single-intervention limits) -------------------


@dataclass(frozen=True)
class PipAdjustment:
    dcause: dict          # adjusted direct-cause map
    structure: Bdmg       # adjusted arrow structure
    removed: tuple        # (tail, head, witness intervention)
    unresolved: tuple     # (a, b, edge kind, number of PIPs)
    tested: tuple         # every extra test run: (tail, head, via, independent)

    def to_json_dict(self):
        return {
            "dcause": {k: sorted(v) for k, v in self.dcause.items()},
            "structure": self.structure.to_json_dict(),
            "removed": [list(r) for r in self.removed],
            "unresolved": [list(u) for u in self.unresolved],
            "tested": [list(t) for t in self.tested],
        }


def pip_adjust(fam: InterventionalFamily, derivation: CausalDerivation) -> PipAdjustment:
    """Retract arrows that a primitive inducing path can explain away.

    For an arrow i -> k whose pair has exactly one PIP in the i-intervened
    graph, the arrow is removed when some intervention on an inner node of
    the PIP renders i independent of k given the other causes of k.  Pairs
    with two or more PIPs (arrows, or arcs of the causal graph) cannot be
    settled by single interventions and are flagged unresolved.
    """
    removed = []
    unresolved = []
    tested = []
    dcause = {k: set(v) for k, v in derivation.dcause.items()}

    for (i, k) in sorted(derivation.structure.arrows):
        pips = find_pips(derivation.intervened_graphs[i], i, k)
        if not pips:
            continue
        if len(pips) > 1:
            unresolved.append((i, k, "arrow", len(pips)))
            continue
        cond = derivation.cause[k] - {i}
        for j in pips[0].nodes[1:-1]:
            independent = fam.ci(j, {i}, {k}, cond)
            tested.append((i, k, j, independent))
            if independent:
                removed.append((i, k, j))
                dcause[k].discard(i)
                break

    for (j, k) in sorted(derivation.graph.arcs):
        pips = find_pips(derivation.graph, j, k)
        if len(pips) > 1:
            unresolved.append((j, k, "arc", len(pips)))

    structure = Bdmg(derivation.roster, _arrows_of(dcause))
    return PipAdjustment(
        dcause={k: frozenset(v) for k, v in dcause.items()},
        structure=structure,
        removed=tuple(removed),
        unresolved=tuple(unresolved),
        tested=tuple(tested),
    )
