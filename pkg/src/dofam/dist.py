"""Exact finite joint distributions and conditional-independence checking.

Probabilities are ``fractions.Fraction`` throughout, so every independence
decision is an exact equality; there are no tolerances anywhere.  Decimal
strings on input are converted exactly (finite decimals are rationals).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .graph import Bdmg, sigma_separated, _set_triples


class DistError(ValueError):
    pass


def parse_rational(value) -> Fraction:
    """Exact conversion from "num/den" strings, decimal strings, ints."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise DistError("cannot parse rational %r: %s" % (value, exc)) from exc
    raise DistError("cannot parse rational from %r" % (value,))


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return "%d/%d" % (q.numerator, q.denominator)


class JointTable:
    """Dense exact joint distribution over named discrete variables.

    ``probs`` is row-major with the last variable varying fastest.  Entries
    must be non-negative rationals summing to exactly one.  Instances are
    immutable; marginals are cached.
    """

    __slots__ = ("variables", "probs", "_index", "_strides", "_cache")

    def __init__(self, variables, probs):
        variables = tuple((str(n), int(c)) for (n, c) in variables)
        names = [n for (n, _c) in variables]
        if len(set(names)) != len(names):
            raise DistError("duplicate variable names: %r" % (names,))
        for n, c in variables:
            if c < 1:
                raise DistError("cardinality of %r must be >= 1" % n)
        size = 1
        for _n, c in variables:
            size *= c
        probs = tuple(parse_rational(p) for p in probs)
        if len(probs) != size:
            raise DistError("expected %d probabilities, got %d" % (size, len(probs)))
        if any(p < 0 for p in probs):
            raise DistError("negative probability entry")
        if sum(probs) != 1:
            raise DistError("probabilities sum to %s, not 1" % (sum(probs),))
        strides = {}
        acc = 1
        for n, c in reversed(variables):
            strides[n] = acc
            acc *= c
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_index", {n: k for k, (n, _c) in enumerate(variables)})
        object.__setattr__(self, "_strides", strides)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("JointTable is immutable")

    # --- basics ---------------------------------------------------------

    @property
    def names(self):
        return tuple(n for (n, _c) in self.variables)

    def card(self, name):
        self.check_vars([name])
        return self.variables[self._index[name]][1]

    def check_vars(self, names):
        for n in names:
            if n not in self._index:
                raise DistError("unknown variable %r" % (n,))

    def sort_vars(self, names):
        return sorted(names, key=self._index.__getitem__)

    def assignments(self):
        return itertools.product(*(range(c) for (_n, c) in self.variables))

    def prob(self, assignment):
        """Probability of a full assignment given as a dict name -> value."""
        idx = 0
        for (n, _c) in self.variables:
            idx += self._strides[n] * assignment[n]
        return self.probs[idx]

    def __eq__(self, other):
        if not isinstance(other, JointTable):
            return NotImplemented
        return self.variables == other.variables and self.probs == other.probs

    def __hash__(self):
        return hash((self.variables, self.probs))

    def __repr__(self):
        return "JointTable(%r, %d cells)" % (list(self.names), len(self.probs))

    # --- marginals and conditionals --------------------------------------

    def marginal(self, names) -> "JointTable":
        """Exact marginal onto ``names`` (kept in this table's variable order)."""
        names = set(names)
        if not names:
            raise DistError("marginal onto the empty set")
        self.check_vars(names)
        key = ("marginal", frozenset(names))
        if key in self._cache:
            return self._cache[key]
        kept = [(n, c) for (n, c) in self.variables if n in names]
        kept_idx = [k for k, (n, _c) in enumerate(self.variables) if n in names]
        size = 1
        for _n, c in kept:
            size *= c
        out = [Fraction(0)] * size
        strides = []
        acc = 1
        for _n, c in reversed(kept):
            strides.append(acc)
            acc *= c
        strides.reverse()
        for assign, p in zip(self.assignments(), self.probs):
            if p == 0:
                continue
            pos = 0
            for s, k in zip(strides, kept_idx):
                pos += s * assign[k]
            out[pos] += p
        result = JointTable(kept, out)
        self._cache[key] = result
        return result

    def margin_map(self, names):
        """Marginal as a dict: tuple of values (in table order of names) -> mass."""
        names = self.sort_vars(set(names))
        key = ("map", tuple(names))
        if key in self._cache:
            return self._cache[key]
        idxs = [self._index[n] for n in names]
        out = {}
        for assign, p in zip(self.assignments(), self.probs):
            if p == 0:
                continue
            k = tuple(assign[i] for i in idxs)
            out[k] = out.get(k, Fraction(0)) + p
        self._cache[key] = (tuple(names), out)
        return self._cache[key]

    def conditional_marginal(self, targets, given: dict):
        """P^targets(. | given) as {assignment tuple: mass}, or None on a null context.

        Target assignments are keyed in lexicographic name order so results
        from tables with different variable orders compare directly.
        """
        targets = sorted(set(targets))
        given_names = self.sort_vars(set(given))
        if set(targets) & set(given):
            raise DistError("targets overlap the conditioning assignment")
        all_names, joint = self.margin_map(set(targets) | set(given))
        pos_t = [all_names.index(n) for n in targets]
        pos_g = [all_names.index(n) for n in given_names]
        want = tuple(given[n] for n in given_names)
        ctx_mass = Fraction(0)
        cells = {}
        for k, p in joint.items():
            if tuple(k[i] for i in pos_g) != want:
                continue
            ctx_mass += p
            tk = tuple(k[i] for i in pos_t)
            cells[tk] = cells.get(tk, Fraction(0)) + p
        if ctx_mass == 0:
            return None
        full = {}
        cards = [self.card(n) for n in targets]
        for tk in itertools.product(*(range(c) for c in cards)):
            full[tk] = cells.get(tk, Fraction(0)) / ctx_mass
        return full

    def is_strictly_positive(self):
        return all(p > 0 for p in self.probs)

    # --- conditional independence ------------------------------------------

    def ci(self, a, b, c=()) -> bool:
        """Exact test of A independent of B given C.

        Quantifies over conditioning contexts with positive mass only; the
        decision is the rational equality P(abc)P(c) == P(ac)P(bc).
        """
        a, b, c = frozenset(a), frozenset(b), frozenset(c)
        if not a or not b:
            raise DistError("A and B must be non-empty")
        if a & b or (a | b) & c:
            raise DistError("A, B, C must be pairwise disjoint")
        self.check_vars(a | b | c)
        names, joint = self.margin_map(a | b | c)
        pos_a = [k for k, n in enumerate(names) if n in a]
        pos_b = [k for k, n in enumerate(names) if n in b]
        pos_c = [k for k, n in enumerate(names) if n in c]
        p_c = {}
        p_ac = {}
        p_bc = {}
        for k, p in joint.items():
            ka = tuple(k[i] for i in pos_a)
            kb = tuple(k[i] for i in pos_b)
            kc = tuple(k[i] for i in pos_c)
            p_c[kc] = p_c.get(kc, Fraction(0)) + p
            p_ac[(ka, kc)] = p_ac.get((ka, kc), Fraction(0)) + p
            p_bc[(kb, kc)] = p_bc.get((kb, kc), Fraction(0)) + p
        support_a = {}
        support_b = {}
        for (ka, kc) in p_ac:
            support_a.setdefault(kc, []).append(ka)
        for (kb, kc) in p_bc:
            support_b.setdefault(kc, []).append(kb)
        for kc, mass in p_c.items():
            if mass == 0:
                continue
            for ka in support_a.get(kc, ()):
                for kb in support_b.get(kc, ()):
                    lhs = joint.get(tuple(_weave(names, pos_a, pos_b, pos_c, ka, kb, kc)), Fraction(0))
                    if lhs * mass != p_ac[(ka, kc)] * p_bc[(kb, kc)]:
                        return False
        return True

    # --- serialization -------------------------------------------------------

    def to_json_dict(self):
        return {
            "vars": [{"name": n, "card": c} for (n, c) in self.variables],
            "probs": [format_rational(p) for p in self.probs],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data):
        try:
            variables = [(v["name"], v["card"]) for v in data["vars"]]
            probs = data["probs"]
        except (TypeError, KeyError) as exc:
            raise DistError("malformed table JSON: %s" % exc) from exc
        return cls(variables, probs)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))


def _weave(names, pos_a, pos_b, pos_c, ka, kb, kc):
    out = [0] * len(names)
    for i, v in zip(pos_a, ka):
        out[i] = v
    for i, v in zip(pos_b, kb):
        out[i] = v
    for i, v in zip(pos_c, kc):
        out[i] = v
    return out


def uniform_table(variables) -> JointTable:
    size = 1
    for _n, c in variables:
        size *= c
    return JointTable(variables, [Fraction(1, size)] * size)


def product_table(marginals: Iterable[JointTable]) -> JointTable:
    """Product measure of single- or multi-variable tables (independent blocks)."""
    marginals = list(marginals)
    variables = []
    for t in marginals:
        variables.extend(t.variables)
    probs = []
    for combo in itertools.product(*(zip(t.assignments(), t.probs) for t in marginals)):
        p = Fraction(1)
        for _a, q in combo:
            p *= q
        probs.append(p)
    return JointTable(variables, probs)


# --- structural property checkers ----------------------------------------------


class PartialOrder:
    """Strict partial order from generating pairs (lesser, greater)."""

    def __init__(self, pairs=()):
        less = {}
        for (a, b) in pairs:
            less.setdefault(a, set()).add(b)
        changed = True
        while changed:
            changed = False
            for a in list(less):
                grown = set(less[a])
                for b in list(less[a]):
                    grown |= less.get(b, set())
                if grown != less[a]:
                    less[a] = grown
                    changed = True
        for a in less:
            if a in less[a]:
                raise DistError("order pairs contain a cycle through %r" % (a,))
        self._less = {a: frozenset(bs) for a, bs in less.items()}

    def less(self, a, b):
        return b in self._less.get(a, ())

    @classmethod
    def from_valid_order(cls, covers):
        return cls(covers)


PROPERTIES = (
    "intersection",
    "composition",
    "singleton_transitivity",
    "upward_stability",
    "downward_stability",
)


@dataclass(frozen=True)
class CiReport:
    property: str
    violations: tuple
    checked: int = 0

    @property
    def holds(self):
        return not self.violations


def _subsets(pool):
    pool = list(pool)
    for r in range(len(pool) + 1):
        yield from itertools.combinations(pool, r)


def check_property(table: JointTable, property: str, order: Optional[PartialOrder] = None,
                   full_sets: bool = False) -> CiReport:
    """Exhaustive check of one structural CI property.

    Default scope uses singleton A, B, D with arbitrary C (the scope every
    use in this artifact needs); ``full_sets`` widens intersection and
    composition to arbitrary disjoint sets, feasible for <= 5 variables.
    """
    if property not in PROPERTIES:
        raise DistError("unknown property %r" % (property,))
    ordered = property in ("upward_stability", "downward_stability")
    if ordered and order is None:
        raise DistError("property %r needs a partial order" % (property,))
    names = list(table.names)
    violations = []
    checked = 0

    if property in ("intersection", "composition"):
        if full_sets:
            triples = _full_triples(names)
        else:
            triples = _singleton_triples(names)
        for a, b, d, c in triples:
            checked += 1
            if property == "intersection":
                if table.ci(a, b, c | d) and table.ci(a, d, c | b):
                    if not table.ci(a, b | d, c):
                        violations.append({"A": a, "B": b, "D": d, "C": c})
            else:
                if table.ci(a, b, c) and table.ci(a, d, c):
                    if not table.ci(a, b | d, c):
                        violations.append({"A": a, "B": b, "D": d, "C": c})
    elif property == "singleton_transitivity":
        for i, j, k in itertools.permutations(names, 3):
            if i > j:
                continue  # symmetric in i, j
            for c in _subsets([n for n in names if n not in (i, j, k)]):
                c = frozenset(c)
                checked += 1
                if table.ci({i}, {j}, c) and table.ci({i}, {j}, c | {k}):
                    if not (table.ci({i}, {k}, c) or table.ci({j}, {k}, c)):
                        violations.append({"i": i, "j": j, "k": k, "C": c})
    else:
        for i, j in itertools.combinations(names, 2):
            rest = [n for n in names if n not in (i, j)]
            for c in _subsets(rest):
                c = frozenset(c)
                if not table.ci({i}, {j}, c):
                    continue
                for k in rest:
                    checked += 1
                    if property == "upward_stability":
                        if k in c or not (order.less(i, k) or order.less(j, k)):
                            continue
                        if not table.ci({i}, {j}, c | {k}):
                            violations.append({"i": i, "j": j, "k": k, "C": c})
                    else:
                        if k not in c:
                            continue
                        if order.less(i, k) or order.less(j, k):
                            continue
                        if any(order.less(l, k) for l in c if l != k):
                            continue
                        if not table.ci({i}, {j}, c - {k}):
                            violations.append({"i": i, "j": j, "k": k, "C": c})
    return CiReport(property=property, violations=tuple(violations), checked=checked)


def _singleton_triples(names):
    for i in names:
        for j, k in itertools.combinations([n for n in names if n != i], 2):
            rest = [n for n in names if n not in (i, j, k)]
            for c in _subsets(rest):
                yield frozenset({i}), frozenset({j}), frozenset({k}), frozenset(c)


def _full_triples(names):
    # all disjoint non-empty A, B, D plus disjoint C: 5-way labelling
    for labels in itertools.product(range(5), repeat=len(names)):
        a = frozenset(n for n, l in zip(names, labels) if l == 0)
        b = frozenset(n for n, l in zip(names, labels) if l == 1)
        d = frozenset(n for n, l in zip(names, labels) if l == 2)
        c = frozenset(n for n, l in zip(names, labels) if l == 3)
        if a and b and d:
            yield a, b, d, c


MARKOV_KINDS = ("pairwise", "global", "converse_pairwise", "faithful", "adjacency_faithful")


@dataclass(frozen=True)
class MarkovReport:
    kind: str
    violations: tuple
    checked: int = 0

    @property
    def holds(self):
        return not self.violations


def markov_check(table: JointTable, g: Bdmg, kind: str, full_sets: bool = False) -> MarkovReport:
    """Markov-property suites of a table against a graph (shared node roster)."""
    if kind not in MARKOV_KINDS:
        raise DistError("unknown markov check %r" % (kind,))
    if set(table.names) != set(g.nodes):
        raise DistError("table variables and graph nodes differ")
    violations = []
    checked = 0

    if kind in ("pairwise", "converse_pairwise"):
        for i, j in itertools.combinations(g.nodes, 2):
            cond = g.ancestors({i, j})
            if kind == "pairwise" and not g.adjacent(i, j):
                checked += 1
                if not table.ci({i}, {j}, cond):
                    violations.append({"i": i, "j": j, "C": cond})
            if kind == "converse_pairwise" and g.adjacent(i, j):
                checked += 1
                if table.ci({i}, {j}, cond):
                    violations.append({"i": i, "j": j, "C": cond})
        return MarkovReport(kind, tuple(violations), checked)

    if kind == "adjacency_faithful":
        for i, j in itertools.combinations(g.nodes, 2):
            if not g.adjacent(i, j):
                continue
            for c in _subsets([n for n in g.nodes if n not in (i, j)]):
                checked += 1
                if table.ci({i}, {j}, c):
                    violations.append({"i": i, "j": j, "C": frozenset(c)})
        return MarkovReport(kind, tuple(violations), checked)

    # global / faithful
    if full_sets:
        triples = _set_triples(g.nodes)
    else:
        triples = (
            (frozenset({i}), frozenset({j}), frozenset(c))
            for i, j in itertools.combinations(g.nodes, 2)
            for c in _subsets([n for n in g.nodes if n not in (i, j)])
        )
    for a, b, c in triples:
        checked += 1
        sep = sigma_separated(g, a, b, c)
        ind = table.ci(a, b, c)
        if sep and not ind:
            violations.append({"A": a, "B": b, "C": c, "direction": "sep_not_ci"})
        if kind == "faithful" and ind and not sep:
            violations.append({"A": a, "B": b, "C": c, "direction": "ci_not_sep"})
    return MarkovReport(kind, tuple(violations), checked)
