"""Randomized generators, faithful oracle families, and theorem suites.

Suites are the acceptance harness: each one generates a deterministic
population from a seed, filters it by the hypotheses of the theorem it
exercises, and asserts the conclusion exactly on the filtered instances.
Budgets count generated instances, never wall time.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import (
    Bdmg,
    GraphError,
    acyclify,
    classify,
    find_pips,
    inseparable_pairs,
    markov_equivalent,
    m_separated,
    sigma_separated,
    sigma_separated_oracle,
)
from .dist import JointTable, check_property, markov_check
from .scm import Mechanism, NoiseComponent, Scm, arc_components, intervene_standard, joint, standard_family
from .derive import GraphSource, InterventionalFamily, check_transitivity, derive
from .axioms import (
    IncompatibleFamilyError,
    check_compatible,
    check_edge_cause,
    check_observable,
    check_quantifiable,
    reconstruct_P,
)


class VerifyError(ValueError):
    pass


def _rng(*parts):
    return random.Random(":".join(str(p) for p in parts))


# --- random graphs -----------------------------------------------------------


def random_bdmg(seed, n, arrow_density=0.3, arc_density=0.15, class_constraint="any") -> Bdmg:
    """Deterministic random graph of the requested class, n <= 10 nodes."""
    if n > 10:
        raise VerifyError("random graphs are desk-scale: n <= 10")
    if class_constraint not in ("any", "admg", "ancestral", "dag", "maximal_ancestral"):
        raise VerifyError("unknown class constraint %r" % (class_constraint,))
    rng = _rng("bdmg", seed)
    nodes = ["x%d" % (i + 1) for i in range(n)]

    for attempt in range(200):
        arrows = set()
        arcs = set()
        if class_constraint == "any":
            for u, v in itertools.combinations(nodes, 2):
                if rng.random() < arc_density:
                    arcs.add((u, v))
                    continue
                if rng.random() < arrow_density:
                    arrows.add((u, v))
                if rng.random() < arrow_density:
                    arrows.add((v, u))
        else:
            order = list(nodes)
            rng.shuffle(order)
            rank = {v: i for i, v in enumerate(order)}
            for u, v in itertools.combinations(nodes, 2):
                lo, hi = (u, v) if rank[u] < rank[v] else (v, u)
                if rng.random() < arrow_density:
                    arrows.add((lo, hi))
                elif class_constraint != "dag" and rng.random() < arc_density:
                    arcs.add((u, v))
        g = Bdmg(nodes, arrows, arcs)
        if class_constraint in ("ancestral", "maximal_ancestral"):
            bad = [
                (u, v)
                for (u, v) in g.arcs
                if u in g.ancestors({v}) or v in g.ancestors({u})
            ]
            if bad:
                g = Bdmg(nodes, arrows, set(g.arcs) - set(bad))
        if class_constraint == "maximal_ancestral" and inseparable_pairs(g):
            continue
        return g
    raise VerifyError("could not satisfy constraint %r" % (class_constraint,))


# --- random SCMs ---------------------------------------------------------------


def _positive_pmf(rng, size):
    weights = [rng.randrange(1, 8) for _ in range(size)]
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_scm(seed, g: Bdmg, cards=2, noise_cards=2) -> Scm:
    """Random mechanisms and noises for an acyclic graph, exact rationals.

    Arc-complete noise components get one strictly positive joint table.
    Components that are not arc-complete are built as an exact pushforward
    of one shared latent per arc plus one private noise per node, which
    realizes arc dependence while keeping arc-free pairs exactly
    independent (the pattern the Markov property needs).
    """
    if not g.is_acyclic():
        raise VerifyError("random_scm needs an acyclic graph")
    rng = _rng("scm", seed)
    if isinstance(cards, int):
        cards = {v: cards for v in g.nodes}
    if isinstance(noise_cards, int):
        noise_cards = {v: noise_cards for v in g.nodes}

    noise_var = {v: "e_%s" % v for v in g.nodes}
    arcs_at = {v: sorted(a for a in g.arcs if v in a) for v in g.nodes}
    latent_card = 2
    node_noise_card = {
        v: noise_cards[v] * latent_card ** len(arcs_at[v]) for v in g.nodes
    }

    components = []
    for members in arc_components(g):
        members = tuple(g.sort_nodes(members))
        variables = [(noise_var[v], node_noise_card[v]) for v in members]
        complete = all(
            g.has_arc(u, v) for u, v in itertools.combinations(members, 2)
        )
        if len(members) == 1 or complete:
            size = 1
            for _n, c in variables:
                size *= c
            table = JointTable(variables, _positive_pmf(rng, size))
        else:
            table = _latent_pushforward(rng, g, members, noise_var,
                                        noise_cards, latent_card)
        components.append(NoiseComponent(members, table))

    mechanisms = {}
    for v in g.nodes:
        parents = g.sort_nodes(g.parents(v))
        order = tuple(parents) + (noise_var[v],)
        size = node_noise_card[v]
        for p in parents:
            size *= cards[p]
        if rng.random() < 0.5:
            # affine mixing: guaranteed sensitivity to every parent and the noise
            coeffs = [rng.randrange(1, cards[v]) if cards[v] > 1 else 0 for _ in parents]
            table = []
            for combo in itertools.product(
                *[range(cards[p]) for p in parents], range(node_noise_card[v])
            ):
                acc = combo[-1]
                for c, x in zip(coeffs, combo[:-1]):
                    acc += c * x
                table.append(acc % cards[v])
        else:
            table = [rng.randrange(cards[v]) for _ in range(size)]
        mechanisms[v] = Mechanism(order, tuple(table))
    return Scm(g, cards, components, mechanisms)


def _latent_pushforward(rng, g, members, noise_var, noise_cards, latent_card):
    """Noise joint for an arc component: tuple-encoded (private, latents at node)."""
    arcs = sorted(
        a for a in g.arcs if a[0] in members and a[1] in members
    )
    priv_pmf = {v: _positive_pmf(rng, noise_cards[v]) for v in members}
    arc_pmf = {a: _positive_pmf(rng, latent_card) for a in arcs}
    variables = []
    for v in members:
        card = noise_cards[v] * latent_card ** len([a for a in arcs if v in a])
        variables.append((noise_var[v], card))
    size = 1
    for _n, c in variables:
        size *= c
    probs = [Fraction(0)] * size

    def encode(v, private, lat_values):
        code = private
        for a in arcs:
            if v in a:
                code = code * latent_card + lat_values[a]
        return code

    for privates in itertools.product(*(range(noise_cards[v]) for v in members)):
        for lats in itertools.product(range(latent_card), repeat=len(arcs)):
            lat_values = dict(zip(arcs, lats))
            p = Fraction(1)
            for v, pv in zip(members, privates):
                p *= priv_pmf[v][pv]
            for a, lv in zip(arcs, lats):
                p *= arc_pmf[a][lv]
            idx = 0
            for (v, pv), (_n, card) in zip(zip(members, privates), variables):
                idx = idx * card + encode(v, pv, lat_values)
            probs[idx] += p
    return JointTable(variables, probs)


def oracle_family(g: Bdmg) -> InterventionalFamily:
    """Faithful-by-construction family: intervene the truth, answer by separation."""
    return InterventionalFamily.from_oracle(g)


# --- suites ---------------------------------------------------------------------


@dataclass
class SuiteResult:
    suite: str
    seed: int
    budget: int
    cases: int = 0
    failures: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self):
        return not self.failures

    def fail(self, case_seed, detail):
        self.failures.append({"case_seed": case_seed, "detail": detail})

    def to_json_dict(self):
        # wall time is reported on stderr by the CLI, never in the JSON,
        # so identical invocations stay byte-identical
        return {
            "suite": self.suite,
            "seed": self.seed,
            "budget": self.budget,
            "cases": self.cases,
            "failures": self.failures,
            "extras": self.extras,
            "ok": self.ok,
        }


def _graph_population(seed, budget, max_n=6, constraint="any"):
    for idx in range(budget):
        rng = _rng("pop", seed, idx)
        n = rng.randrange(2, max_n + 1)
        yield idx, random_bdmg(
            seed="%d.%d" % (seed, idx),
            n=n,
            arrow_density=rng.choice([0.2, 0.3, 0.45]),
            arc_density=rng.choice([0.1, 0.2, 0.3]),
            class_constraint=constraint,
        )


def _suite_sep_equiv(result, seed, budget):
    """Acyclification+m equals the raw sigma path oracle, all singleton queries."""
    for idx, g in _graph_population(seed, budget, max_n=6):
        result.cases += 1
        for i, j in itertools.combinations(g.nodes, 2):
            rest = [v for v in g.nodes if v not in (i, j)]
            for r in range(len(rest) + 1):
                for c in itertools.combinations(rest, r):
                    fast = sigma_separated(g, {i}, {j}, c)
                    slow = sigma_separated_oracle(g, {i}, {j}, c)
                    if fast != slow:
                        result.fail(
                            "%d.%d" % (seed, idx),
                            {"i": i, "j": j, "C": list(c), "fast": fast, "slow": slow},
                        )


def _suite_pip_insep(result, seed, budget):
    """Every inseparable pair is connected by at least one PIP."""
    for idx, g in _graph_population(seed, budget, max_n=6):
        result.cases += 1
        for (i, j) in inseparable_pairs(g):
            if not find_pips(g, i, j):
                result.fail("%d.%d" % (seed, idx), {"pair": [i, j], "pips": 0})


def _scm_population(result, seed, budget, max_n=5, constraint="admg", cards=(2, 3)):
    for idx in range(budget):
        rng = _rng("scmpop", seed, idx)
        n = rng.randrange(2, max_n + 1)
        g = random_bdmg(
            seed="%d.%d" % (seed, idx),
            n=n,
            arrow_density=rng.choice([0.3, 0.5]),
            arc_density=rng.choice([0.0, 0.15, 0.25]),
            class_constraint=constraint,
        )
        card_map = {v: rng.choice(cards) for v in g.nodes}
        scm = random_scm("%d.%d" % (seed, idx), g, card_map, noise_cards=2)
        yield idx, g, scm


def _suite_scm_markov(result, seed, budget):
    """SCM joints (and every standard intervention) are Markov to their graphs."""
    for idx, g, scm in _scm_population(result, seed, budget, max_n=5):
        result.cases += 1
        tables = {None: (g, joint(scm))}
        base = tables[None][1]
        for v in g.nodes:
            repl = base.marginal([v])
            tables[v] = (g.intervened(v), joint(intervene_standard(scm, v, repl)))
        for label, (graph, table) in tables.items():
            for i, j in itertools.combinations(g.nodes, 2):
                rest = [v for v in g.nodes if v not in (i, j)]
                for r in range(len(rest) + 1):
                    for c in itertools.combinations(rest, r):
                        if m_separated(graph, {i}, {j}, c) and not table.ci({i}, {j}, c):
                            result.fail(
                                "%d.%d" % (seed, idx),
                                {"intervention": label, "i": i, "j": j, "C": list(c)},
                            )


def _family_population(result, seed, budget):
    """Mixed population: oracle families plus canonical SCM table families."""
    for idx in range(budget):
        rng = _rng("fampop", seed, idx)
        if rng.random() < 0.5:
            n = rng.randrange(2, 6)
            g = random_bdmg(
                "%d.%d" % (seed, idx), n,
                arrow_density=rng.choice([0.25, 0.4]),
                arc_density=rng.choice([0.0, 0.15]),
                class_constraint="any",
            )
            yield idx, "oracle", g, oracle_family(g), None
        else:
            n = rng.randrange(2, 5)
            g = random_bdmg(
                "%d.%d" % (seed, idx), n,
                arrow_density=rng.choice([0.3, 0.5]),
                arc_density=rng.choice([0.0, 0.2]),
                class_constraint="admg",
            )
            scm = random_scm("%d.%d" % (seed, idx), g, {v: 2 for v in g.nodes}, 2)
            yield idx, "scm", g, standard_family(scm), joint(scm)


def _sources_compositional(fam):
    """Intersection+composition of every source; free for separation oracles."""
    for v in fam.roster:
        src = fam.source(v)
        if isinstance(src, GraphSource):
            continue
        table = fam.table(v)
        if not check_property(table, "intersection").holds:
            return False
        if not check_property(table, "composition").holds:
            return False
    return True


def _global_markov_source(fam, i, g):
    """Global Markov of the (possibly oracle) i-th source against a graph."""
    for a, b in itertools.combinations(g.nodes, 2):
        rest = [v for v in g.nodes if v not in (a, b)]
        for r in range(len(rest) + 1):
            for c in itertools.combinations(rest, r):
                if sigma_separated(g, {a}, {b}, c) and not fam.ci(i, {a}, {b}, c):
                    return {"i": i, "a": a, "b": b, "C": list(c)}
    return None


def _suite_intervened_markov(result, seed, budget):
    """Transitive compositional families are Markov to the intervened graphs.

    For SCM-backed families that are also observable, the observed joint is
    additionally checked against the causal graph.
    """
    kept = 0
    for idx, kind, g, fam, observed in _family_population(result, seed, budget):
        result.cases += 1
        if not check_transitivity(fam).holds:
            continue
        if not _sources_compositional(fam):
            continue
        kept += 1
        derivation = derive(fam)
        for i in fam.roster:
            witness = _global_markov_source(fam, i, derivation.intervened_graphs[i])
            if witness:
                result.fail("%d.%d" % (seed, idx), {"kind": kind, **witness})
        if observed is not None:
            if not check_property(observed, "intersection").holds:
                continue
            if not check_property(observed, "composition").holds:
                continue
            if not check_observable(fam, observed, derivation).holds:
                continue
            report = markov_check(observed, derivation.graph, "global")
            if not report.holds:
                result.fail(
                    "%d.%d" % (seed, idx),
                    {"kind": "observed", "violations": len(report.violations)},
                )
    result.extras["filter_pass"] = kept


def _suite_exchange(result, seed, budget):
    """Causes equal graph ancestors; causal cycles equal strong components."""
    kept = 0
    for idx, kind, g, fam, _observed in _family_population(result, seed, budget):
        result.cases += 1
        if not check_transitivity(fam).holds or not _sources_compositional(fam):
            continue
        kept += 1
        derivation = derive(fam)
        gg = derivation.graph
        for k in fam.roster:
            if gg.ancestors({k}) != derivation.cause[k]:
                result.fail(
                    "%d.%d" % (seed, idx),
                    {"kind": kind, "k": k, "an": sorted(gg.ancestors({k})),
                     "cause": sorted(derivation.cause[k])},
                )
            if gg.strong_component(k) != derivation.cc[k]:
                result.fail(
                    "%d.%d" % (seed, idx),
                    {"kind": kind, "k": k, "sc": sorted(gg.strong_component(k)),
                     "cc": sorted(derivation.cc[k])},
                )
            if derivation.cause[k] and not derivation.dcause[k]:
                result.fail(
                    "%d.%d" % (seed, idx),
                    {"kind": kind, "k": k, "detail": "cause non-empty but dcause empty"},
                )
    result.extras["filter_pass"] = kept


def _ancestral_scm_population(result, seed, budget):
    for idx in range(budget):
        rng = _rng("ancpop", seed, idx)
        n = rng.randrange(3, 6)
        constraint = "dag" if rng.random() < 0.4 else "ancestral"
        g = random_bdmg(
            "%d.%d" % (seed, idx), n,
            arrow_density=rng.choice([0.3, 0.45]),
            arc_density=rng.choice([0.0, 0.2, 0.35]),
            class_constraint=constraint,
        )
        scm = random_scm("%d.%d" % (seed, idx), g, {v: 2 for v in g.nodes}, 2)
        yield idx, g, scm


def _suite_scm_graph_equality(result, seed, budget):
    """Edge-cause + converse pairwise Markov recover the SCM graph.

    Maximal filtered instances must match exactly; non-maximal ones must be
    Markov equivalent.
    """
    kept = 0
    for idx, g, scm in _ancestral_scm_population(result, seed, budget):
        result.cases += 1
        fam = standard_family(scm)
        derivation = derive(fam)
        if not check_edge_cause(fam, g, derivation).holds:
            continue
        base = joint(scm)
        if not markov_check(base, g, "converse_pairwise").holds:
            continue
        kept += 1
        derived = derivation.graph
        if classify(g).is_maximal:
            if derived != g:
                result.fail(
                    "%d.%d" % (seed, idx),
                    {"expected": g.to_json_dict(), "derived": derived.to_json_dict()},
                )
        else:
            if not markov_equivalent(derived, g):
                result.fail(
                    "%d.%d" % (seed, idx),
                    {"detail": "non-maximal instance not Markov equivalent",
                     "expected": g.to_json_dict(), "derived": derived.to_json_dict()},
                )
    result.extras["filter_pass"] = kept
    result.extras["filter_rate"] = "%d/%d" % (kept, result.cases)


def _dag_scm_population(result, seed, budget):
    for idx in range(budget):
        rng = _rng("dagpop", seed, idx)
        n = rng.randrange(2, 5)
        g = random_bdmg(
            "%d.%d" % (seed, idx), n,
            arrow_density=rng.choice([0.35, 0.5]),
            arc_density=0.0,
            class_constraint="dag",
        )
        scm = random_scm("%d.%d" % (seed, idx), g, {v: 2 for v in g.nodes}, 2)
        yield idx, g, scm


def _suite_quantifiable_chain(result, seed, budget):
    """Quantifiable families satisfy the intervention-free conditional identity."""
    kept = 0
    for idx, g, scm in _dag_scm_population(result, seed, budget):
        result.cases += 1
        fam = standard_family(scm)
        observed = joint(scm)
        derivation = derive(fam)
        try:
            if not check_quantifiable(fam, observed, derivation).holds:
                continue
        except IncompatibleFamilyError:
            continue
        kept += 1
        for i in fam.roster:
            for k in fam.roster:
                if i == k:
                    continue
                cause_k = derivation.cause[k]
                cond_vars = sorted(cause_k)
                for ctx_vals in itertools.product(
                    *(range(observed.card(v)) for v in cond_vars)
                ):
                    ctx = dict(zip(cond_vars, ctx_vals))
                    lhs = fam.table(i).conditional_marginal([k], ctx) if ctx else None
                    rhs = observed.conditional_marginal([k], ctx) if ctx else None
                    if not ctx:
                        lhs = {a: p for a, p in zip(
                            fam.table(i).marginal([k]).assignments(),
                            fam.table(i).marginal([k]).probs)}
                        rhs = {a: p for a, p in zip(
                            observed.marginal([k]).assignments(),
                            observed.marginal([k]).probs)}
                    if lhs is None or rhs is None:
                        continue
                    if lhs != rhs:
                        result.fail(
                            "%d.%d" % (seed, idx),
                            {"i": i, "k": k, "context": ctx,
                             "detail": "conditional differs from observation"},
                        )
    result.extras["filter_pass"] = kept


def _suite_uniqueness(result, seed, budget):
    """Quantifiable DAG families rebuild the observation exactly."""
    kept = 0
    for idx, g, scm in _dag_scm_population(result, seed, budget):
        result.cases += 1
        fam = standard_family(scm)
        observed = joint(scm)
        derivation = derive(fam)
        if not classify(derivation.graph).is_dag:
            continue
        try:
            if not check_quantifiable(fam, observed, derivation).holds:
                continue
        except IncompatibleFamilyError:
            continue
        kept += 1
        outcome = reconstruct_P(fam, derivation, reference=observed)
        if not outcome.matches:
            result.fail(
                "%d.%d" % (seed, idx),
                {"mismatches": len(outcome.mismatch_cells), "notes": list(outcome.notes)},
            )
    result.extras["filter_pass"] = kept


def _suite_transitivity_sufficiency(result, seed, budget):
    """Singleton-transitive sources with conditions (a)+(b) force transitivity."""
    kept = 0
    for idx, kind, g, fam, _observed in _family_population(result, seed, budget):
        result.cases += 1
        report = check_transitivity(fam)
        if kind == "oracle" and not report.holds:
            result.fail(
                "%d.%d" % (seed, idx),
                {"kind": kind, "detail": "oracle family not transitive",
                 "violations": [list(v) for v in report.violations[:3]]},
            )
            continue
        if report.sufficient:
            kept += 1
            if not report.holds:
                result.fail(
                    "%d.%d" % (seed, idx),
                    {"kind": kind,
                     "detail": "sufficient conditions held but transitivity failed",
                     "violations": [list(v) for v in report.violations[:3]]},
                )
    result.extras["filter_pass"] = kept


SUITES = {
    "sep_equiv": _suite_sep_equiv,
    "pip_insep": _suite_pip_insep,
    "scm_markov": _suite_scm_markov,
    "intervened_markov": _suite_intervened_markov,
    "exchange": _suite_exchange,
    "scm_graph_equality": _suite_scm_graph_equality,
    "quantifiable_chain": _suite_quantifiable_chain,
    "uniqueness": _suite_uniqueness,
    "transitivity_sufficiency": _suite_transitivity_sufficiency,
}


def run_suite(name, seed=7, budget=50) -> SuiteResult:
    """Execute one named suite deterministically; failures carry replay seeds."""
    if name not in SUITES:
        raise VerifyError("unknown suite %r (have: %s)" % (name, ", ".join(sorted(SUITES))))
    result = SuiteResult(suite=name, seed=seed, budget=budget)
    start = time.monotonic()
    SUITES[name](result, seed, budget)
    result.wall_time = time.monotonic() - start
    return result
