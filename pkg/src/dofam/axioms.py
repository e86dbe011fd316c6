"""Axiom checkers tying interventional families to an observed distribution.

Every check enumerates its quantified clauses exhaustively on the finite
state space and reports exact witnesses.  "Almost all" clauses are read
over strictly positive contexts of the relevant marginals; null contexts
are excluded from both sides of an equality.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dist import JointTable
from .derive import (
    CausalDerivation,
    DeriveError,
    CapabilityError,
    InterventionalFamily,
    derive,
)
from .graph import Bdmg, classify, separable


class AxiomError(ValueError):
    pass


class IncompatibleFamilyError(AxiomError):
    """Quantifiability was asked of a family that fails compatibility."""


class NotQuantifiableError(AxiomError):
    """Bivariate quantifiability was asked of a non-quantifiable family."""


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    witnesses: tuple
    skipped: tuple = ()
    checked: int = 0

    @property
    def holds(self):
        return not self.witnesses and not self.skipped

    def to_json_dict(self):
        return {
            "axiom": self.axiom,
            "holds": self.holds,
            "witnesses": [_jsonable(w) for w in self.witnesses],
            "skipped": list(self.skipped),
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in sorted(value.items())}
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    from fractions import Fraction
    from .dist import format_rational

    if isinstance(value, Fraction):
        return format_rational(value)
    return value


def _need_tables(fam: InterventionalFamily):
    if not fam.table_backed:
        raise CapabilityError("this check needs table-backed interventions")


def _check_roster(fam: InterventionalFamily, observed: JointTable):
    if set(observed.names) != set(fam.roster):
        raise DeriveError("observation roster does not match the family")


# --- observability (axioms 2 and 3) -----------------------------------------


def check_observable(
    fam: InterventionalFamily,
    observed: JointTable,
    derivation: Optional[CausalDerivation] = None,
) -> AxiomReport:
    """Interventional separations transfer to the observed distribution.

    Clause (a) quantifies over separable pairs of the causal graph and every
    other intervention; clause (b) over causes and their own intervention.
    """
    _need_tables(fam)
    _check_roster(fam, observed)
    if derivation is None:
        derivation = derive(fam)
    witnesses = []
    checked = 0
    g = derivation.graph
    for j, k in itertools.combinations(fam.roster, 2):
        if g.adjacent(j, k) or not separable(g, j, k):
            continue
        cond_p = derivation.cause_of_set({j, k})
        for i in fam.roster:
            if i in (j, k):
                continue
            checked += 1
            if fam.ci(i, {j}, {k}, derivation.icause_of_set(i, {j, k})):
                if not observed.ci({j}, {k}, cond_p):
                    witnesses.append(
                        {"clause": "a", "i": i, "j": j, "k": k,
                         "lhs": "indep", "rhs": "dep"}
                    )
    for k in fam.roster:
        for i in derivation.cause[k]:
            checked += 1
            if fam.ci(i, {i}, {k}, derivation.icause_of_set(i, {i, k})):
                if not observed.ci({i}, {k}, derivation.cause_of_set({i, k})):
                    witnesses.append(
                        {"clause": "b", "i": i, "k": k, "lhs": "indep", "rhs": "dep"}
                    )
    return AxiomReport("A2", tuple(witnesses), checked=checked)


def check_strongly_observable(
    fam: InterventionalFamily,
    observed: JointTable,
    derivation: Optional[CausalDerivation] = None,
) -> AxiomReport:
    """Converse transfer: observed separations reappear under interventions."""
    _need_tables(fam)
    _check_roster(fam, observed)
    if derivation is None:
        derivation = derive(fam)
    witnesses = []
    checked = 0
    for j, k in itertools.combinations(fam.roster, 2):
        cond_p = derivation.cause_of_set({j, k})
        obs_indep = observed.ci({j}, {k}, cond_p)
        for i in fam.roster:
            if i in (j, k):
                continue
            checked += 1
            if obs_indep and not fam.ci(i, {j}, {k}, derivation.icause_of_set(i, {j, k})):
                witnesses.append(
                    {"clause": "a", "i": i, "j": j, "k": k,
                     "lhs": "indep", "rhs": "dep"}
                )
    for k in fam.roster:
        for i in derivation.cause[k]:
            checked += 1
            if observed.ci({i}, {k}, derivation.cause_of_set({i, k})):
                if not fam.ci(i, {i}, {k}, derivation.icause_of_set(i, {i, k})):
                    witnesses.append(
                        {"clause": "b", "i": i, "k": k, "lhs": "indep", "rhs": "dep"}
                    )
    return AxiomReport("A3", tuple(witnesses), checked=checked)


# --- compatibility and quantifiability (axioms 4 and 5) ------------------------


def check_compatible(
    fam: InterventionalFamily,
    observed: JointTable,
    derivation: Optional[CausalDerivation] = None,
) -> AxiomReport:
    """Equal supports of the cause(k)+k marginals, for every intervention."""
    _need_tables(fam)
    _check_roster(fam, observed)
    if derivation is None:
        derivation = derive(fam)
    witnesses = []
    checked = 0
    for i in fam.roster:
        table_i = fam.table(i)
        for k in fam.roster:
            if i == k:
                continue
            checked += 1
            names = sorted(derivation.cause[k] | {k})
            m_do = table_i.marginal(names)
            m_p = observed.marginal(names)
            sup_do = {a for a, p in zip(m_do.assignments(), m_do.probs) if p > 0}
            sup_p = {a for a, p in zip(m_p.assignments(), m_p.probs) if p > 0}
            if sup_do != sup_p:
                cell = next(iter(sup_do ^ sup_p))
                witnesses.append(
                    {"i": i, "k": k, "vars": names, "cell": cell,
                     "only_in": "do" if cell in sup_do else "P"}
                )
    return AxiomReport("compatible", tuple(witnesses), checked=checked)


def _marginal_equalities(table_do, observed, targets, base_cond, extra, drop_extra_on_rhs):
    """Compare conditional marginals over every positive context.

    LHS conditions on base_cond plus ``extra`` in the interventional table;
    the RHS uses the observed table, with ``extra`` dropped when the
    intervened variable is not a cause.  Contexts that are null on either
    side are skipped (the almost-everywhere reading).
    """
    witnesses = []
    cond_vars = sorted(base_cond | {extra})
    cards = {n: table_do.card(n) for n in cond_vars}
    for ctx_vals in itertools.product(*(range(cards[n]) for n in cond_vars)):
        ctx = dict(zip(cond_vars, ctx_vals))
        lhs = table_do.conditional_marginal(targets, ctx)
        if lhs is None:
            continue
        rhs_ctx = dict(ctx)
        if drop_extra_on_rhs:
            del rhs_ctx[extra]
        rhs = (
            observed.conditional_marginal(targets, rhs_ctx)
            if rhs_ctx
            else _plain_marginal(observed, targets)
        )
        if rhs is None:
            continue
        for cell in sorted(lhs):
            if lhs[cell] != rhs[cell]:
                witnesses.append(
                    {"context": ctx, "targets": tuple(sorted(targets)), "cell": cell,
                     "lhs": lhs[cell], "rhs": rhs[cell]}
                )
    return witnesses


def _plain_marginal(table, targets):
    targets = sorted(set(targets))
    cards = [table.card(n) for n in targets]
    _names, joint = table.margin_map(targets)
    idx = [_names.index(n) for n in targets]
    out = {}
    for combo in itertools.product(*(range(c) for c in cards)):
        out[combo] = Fraction(0)
    for key, p in joint.items():
        out[tuple(key[i] for i in idx)] += p
    return out


def check_quantifiable(
    fam: InterventionalFamily,
    observed: JointTable,
    derivation: Optional[CausalDerivation] = None,
) -> AxiomReport:
    """Univariate conditional marginals of interventions match the observation."""
    _need_tables(fam)
    _check_roster(fam, observed)
    if derivation is None:
        derivation = derive(fam)
    compat = check_compatible(fam, observed, derivation)
    if not compat.holds:
        raise IncompatibleFamilyError(
            "family is not compatible with the observation: %r" % (compat.witnesses[:1],)
        )
    witnesses = []
    checked = 0
    for i in fam.roster:
        table_i = fam.table(i)
        for k in fam.roster:
            if i == k:
                continue
            checked += 1
            base = derivation.cause[k] - {i}
            is_cause = i in derivation.cause[k]
            for w in _marginal_equalities(
                table_i, observed, {k}, base, i, drop_extra_on_rhs=not is_cause
            ):
                w.update({"i": i, "k": k, "branch": "cause" if is_cause else "non-cause"})
                witnesses.append(w)
    return AxiomReport("A4", tuple(witnesses), checked=checked)


def check_bivariate_quantifiable(
    fam: InterventionalFamily,
    observed: JointTable,
    derivation: Optional[CausalDerivation] = None,
) -> AxiomReport:
    """Pairwise conditional marginals of interventions match the observation.

    Quantified over every pair {j, k} and every other intervention i; the
    branch (drop the intervened value or keep it) follows membership of i in
    the pair's causes.
    """
    _need_tables(fam)
    _check_roster(fam, observed)
    if derivation is None:
        derivation = derive(fam)
    quant = check_quantifiable(fam, observed, derivation)
    if not quant.holds:
        raise NotQuantifiableError(
            "family is not quantifiable: %r" % (quant.witnesses[:1],)
        )
    witnesses = []
    checked = 0
    for j, k in itertools.combinations(fam.roster, 2):
        pair_cause = derivation.cause_of_set({j, k})
        for i in fam.roster:
            if i in (j, k):
                continue
            checked += 1
            base = pair_cause - {i}
            is_cause = i in pair_cause
            for w in _marginal_equalities(
                fam.table(i), observed, {j, k}, base, i, drop_extra_on_rhs=not is_cause
            ):
                w.update({"i": i, "j": j, "k": k,
                          "branch": "cause" if is_cause else "non-cause"})
                witnesses.append(w)
    return AxiomReport("A5", tuple(witnesses), checked=checked)


# --- edge-cause and congruence -------------------------------------------------


def check_edge_cause(
    fam: InterventionalFamily,
    reference: Bdmg,
    derivation: Optional[CausalDerivation] = None,
) -> AxiomReport:
    """Every arrow of the reference graph is realized as a direct cause."""
    if set(reference.nodes) != set(fam.roster):
        raise DeriveError("reference graph roster does not match the family")
    if derivation is None:
        derivation = derive(fam)
    witnesses = []
    checked = 0
    for (i, j) in sorted(reference.arrows):
        checked += 1
        if fam.ci(i, {i}, {j}):
            witnesses.append({"i": i, "j": j, "failed": "marginal dependence"})
            continue
        cond = derivation.icause[(i, j)] - {i}
        if fam.ci(i, {i}, {j}, cond):
            witnesses.append({"i": i, "j": j, "failed": "dependence given intervened causes",
                              "C": cond})
    return AxiomReport("edge_cause", tuple(witnesses), checked=checked)


def check_congruent(fam_a: InterventionalFamily, fam_b: InterventionalFamily) -> AxiomReport:
    """Same causes plus matching direct-cause and arc tests in both families."""
    if set(fam_a.roster) != set(fam_b.roster):
        raise DeriveError("families are over different rosters")
    da = derive(fam_a)
    db = derive(fam_b)
    witnesses = []
    checked = 0
    for k in fam_a.roster:
        if da.cause[k] != db.cause[k]:
            witnesses.append({"clause": "causes", "k": k,
                              "first": da.cause[k], "second": db.cause[k]})
    if witnesses:
        return AxiomReport("congruent", tuple(witnesses), checked=1)
    for k in fam_a.roster:
        for i in da.cause[k]:
            checked += 1
            lhs = fam_a.ci(i, {i}, {k}, da.icause_of_set(i, {i, k}))
            rhs = fam_b.ci(i, {i}, {k}, db.icause_of_set(i, {i, k}))
            if lhs != rhs:
                witnesses.append({"clause": "1", "i": i, "k": k,
                                  "first": "indep" if lhs else "dep",
                                  "second": "indep" if rhs else "dep"})
    for i in fam_a.roster:
        for j, k in itertools.combinations([v for v in fam_a.roster if v != i], 2):
            checked += 1
            lhs = fam_a.ci(i, {j}, {k}, da.icause_of_set(i, {j, k}))
            rhs = fam_b.ci(i, {j}, {k}, db.icause_of_set(i, {j, k}))
            if lhs != rhs:
                witnesses.append({"clause": "2", "i": i, "j": j, "k": k,
                                  "first": "indep" if lhs else "dep",
                                  "second": "indep" if rhs else "dep"})
    return AxiomReport("congruent", tuple(witnesses), checked=checked)


# --- reconstruction of the observation -------------------------------------------


@dataclass(frozen=True)
class ReconstructionResult:
    table: JointTable
    reference: Optional[JointTable]
    matches: Optional[bool]
    mismatch_cells: tuple
    notes: tuple

    def to_json_dict(self):
        return {
            "table": self.table.to_json_dict(),
            "matches": self.matches,
            "mismatches": [_jsonable(m) for m in self.mismatch_cells],
            "notes": list(self.notes),
        }


def reconstruct_P(
    fam: InterventionalFamily,
    derivation: CausalDerivation,
    reference: Optional[JointTable] = None,
) -> ReconstructionResult:
    """Rebuild the observation from interventional conditionals on a DAG.

    Factorizes cell probabilities as a product of P^k(. | causes of k),
    each conditional extracted from any intervention other than k.  A
    mismatch against a supplied reference is reported together with which
    hypothesis (composition of the reference) failed.
    """
    _need_tables(fam)
    cls = classify(derivation.graph)
    if not cls.is_dag:
        raise DeriveError("reconstruction needs a DAG causal graph")
    roster = fam.roster
    sources = {}
    for k in roster:
        donor = next(i for i in roster if i != k)
        sources[k] = fam.table(donor)

    order = _topo(derivation.graph)
    variables = [(v, fam.table(roster[0]).card(v)) for v in roster]
    probs = []
    for assign in itertools.product(*(range(c) for (_v, c) in variables)):
        values = dict(zip([v for (v, _c) in variables], assign))
        running = Fraction(1)
        for k in order:
            ctx = {c: values[c] for c in derivation.cause[k]}
            cond = (
                sources[k].conditional_marginal([k], ctx)
                if ctx
                else _plain_marginal(sources[k], [k])
            )
            if cond is None:
                if running == 0:
                    break
                raise DeriveError(
                    "missing positive context %r for %r during reconstruction" % (ctx, k)
                )
            running *= cond[(values[k],)]
            if running == 0:
                break
        probs.append(running)
    table = JointTable(variables, probs)

    matches = None
    mismatches = []
    notes = []
    if reference is not None:
        if set(reference.names) != set(table.names):
            raise DeriveError("reference roster does not match the family")
        for assign in table.assignments():
            values = dict(zip(table.names, assign))
            a = table.prob(values)
            b = reference.prob(values)
            if a != b:
                mismatches.append({"cell": assign, "reconstructed": a, "reference": b})
        matches = not mismatches
        if not matches:
            from .dist import check_property

            for prop in ("composition", "intersection"):
                if not check_property(reference, prop).holds:
                    notes.append(
                        "reference distribution violates %s; factorization hypotheses fail"
                        % prop
                    )
    return ReconstructionResult(
        table=table,
        reference=reference,
        matches=matches,
        mismatch_cells=tuple(mismatches),
        notes=tuple(notes),
    )


def _topo(g: Bdmg):
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
        raise DeriveError("graph has a directed cycle")
    return out


AXIOM_CHECKS = {
    "A2": check_observable,
    "A3": check_strongly_observable,
    "A4": check_quantifiable,
    "A5": check_bivariate_quantifiable,
    "compatible": check_compatible,
}
