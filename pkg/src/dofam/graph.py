"""Bowless directed mixed graphs (arrows + arcs) and their separation criteria.

A graph here carries two edge kinds: arrows ``i -> j`` and arcs ``i <-> j``
(an arc stands for a latent common cause).  Parallel arrows in both
directions are allowed; an arrow and an arc on the same pair (a "bow") is
rejected unless the caller opts in -- acyclification can legitimately
produce bows, and separation queries still work on such graphs.

Separation comes in three flavours: ``d`` (DAGs), ``m`` (acyclic mixed
graphs) and ``sigma`` (any graph, cycle-aware).  ``sigma`` is answered by
acyclifying and running the ``m`` reachability algorithm; a slow oracle
that enumerates raw sigma-connecting paths is kept for differential
testing.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Optional


class GraphError(ValueError):
    pass


class UnknownNodeError(GraphError):
    pass


class BowError(GraphError):
    pass


class CriterionError(GraphError):
    """Separation criterion incompatible with the graph class."""


class PreconditionError(GraphError):
    """A contract precondition failed (distinct from a negative answer)."""


ARROW = "arrow"
ARC = "arc"


class Bdmg:
    """Immutable directed mixed graph over named nodes.

    ``arrows`` is a set of ordered pairs, ``arcs`` a set of unordered pairs
    stored in roster order.  Self-loops are always rejected; bows only when
    ``allow_bows`` is set.
    """

    __slots__ = (
        "nodes",
        "arrows",
        "arcs",
        "_index",
        "_parents",
        "_children",
        "_spouses",
        "_cache",
    )

    def __init__(self, nodes, arrows=(), arcs=(), allow_bows=False):
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise GraphError("duplicate node labels: %r" % (nodes,))
        index = {v: n for n, v in enumerate(nodes)}

        arrow_set = set()
        for (u, v) in arrows:
            if u not in index or v not in index:
                raise UnknownNodeError("arrow endpoint not a node: %r" % ((u, v),))
            if u == v:
                raise GraphError("self-loop arrow at %r" % u)
            arrow_set.add((u, v))

        arc_set = set()
        for pair in arcs:
            u, v = tuple(pair)
            if u not in index or v not in index:
                raise UnknownNodeError("arc endpoint not a node: %r" % (pair,))
            if u == v:
                raise GraphError("self-loop arc at %r" % u)
            if index[u] > index[v]:
                u, v = v, u
            arc_set.add((u, v))

        if not allow_bows:
            for (u, v) in arc_set:
                if (u, v) in arrow_set or (v, u) in arrow_set:
                    raise BowError("bow on pair (%r, %r)" % (u, v))

        parents = {v: set() for v in nodes}
        children = {v: set() for v in nodes}
        spouses = {v: set() for v in nodes}
        for (u, v) in arrow_set:
            parents[v].add(u)
            children[u].add(v)
        for (u, v) in arc_set:
            spouses[u].add(v)
            spouses[v].add(u)

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "arrows", frozenset(arrow_set))
        object.__setattr__(self, "arcs", frozenset(arc_set))
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_parents", {v: frozenset(s) for v, s in parents.items()})
        object.__setattr__(self, "_children", {v: frozenset(s) for v, s in children.items()})
        object.__setattr__(self, "_spouses", {v: frozenset(s) for v, s in spouses.items()})
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("Bdmg is immutable")

    # --- basics -------------------------------------------------------

    @property
    def node_count(self):
        return len(self.nodes)

    @property
    def node_names(self):
        return list(self.nodes)

    def check_node(self, v):
        if v not in self._index:
            raise UnknownNodeError("unknown node %r" % (v,))

    def check_nodes(self, vs):
        for v in vs:
            self.check_node(v)

    def index(self, v):
        self.check_node(v)
        return self._index[v]

    def sort_nodes(self, vs):
        return sorted(vs, key=self._index.__getitem__)

    def parents(self, v):
        self.check_node(v)
        return self._parents[v]

    def children(self, v):
        self.check_node(v)
        return self._children[v]

    def spouses(self, v):
        self.check_node(v)
        return self._spouses[v]

    def parents_of_set(self, vs):
        """pa(A): parents of members, minus A itself."""
        vs = set(vs)
        self.check_nodes(vs)
        out = set()
        for v in vs:
            out |= self._parents[v]
        return frozenset(out - vs)

    def adjacent(self, u, v):
        self.check_node(u)
        self.check_node(v)
        return (
            (u, v) in self.arrows
            or (v, u) in self.arrows
            or self._arc_key(u, v) in self.arcs
        )

    def arrow_adjacent(self, u, v):
        return (u, v) in self.arrows or (v, u) in self.arrows

    def has_arc(self, u, v):
        return self._arc_key(u, v) in self.arcs

    def _arc_key(self, u, v):
        if self._index[u] > self._index[v]:
            u, v = v, u
        return (u, v)

    def has_bows(self):
        return any(
            (u, v) in self.arrows or (v, u) in self.arrows for (u, v) in self.arcs
        )

    def edges_at(self, v):
        """All edges incident to v as (other, head_at_v, head_at_other, kind)."""
        self.check_node(v)
        key = ("edges_at", v)
        if key not in self._cache:
            out = []
            for u in self._children[v]:
                out.append((u, False, True, ARROW))
            for u in self._parents[v]:
                out.append((u, True, False, ARROW))
            for u in self._spouses[v]:
                out.append((u, True, True, ARC))
            out.sort(key=lambda e: (self._index[e[0]], e[3], e[1]))
            self._cache[key] = tuple(out)
        return self._cache[key]

    def __eq__(self, other):
        if not isinstance(other, Bdmg):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.arrows == other.arrows
            and self.arcs == other.arcs
        )

    def __hash__(self):
        return hash((self.nodes, self.arrows, self.arcs))

    def __repr__(self):
        arrows = sorted(self.arrows, key=lambda e: (self._index[e[0]], self._index[e[1]]))
        arcs = sorted(self.arcs, key=lambda e: (self._index[e[0]], self._index[e[1]]))
        return "Bdmg(nodes=%r, arrows=%r, arcs=%r)" % (list(self.nodes), arrows, arcs)

    # --- reachability -------------------------------------------------

    def ancestors(self, nodes):
        """an(A): nodes with a directed path of length >= 1 into A, minus A.

        The convention j not-in an(j) is applied throughout; the set query
        additionally subtracts all of A.
        """
        targets = set(nodes)
        self.check_nodes(targets)
        out = set()
        stack = list(targets)
        while stack:
            v = stack.pop()
            for p in self._parents[v]:
                if p not in out:
                    out.add(p)
                    stack.append(p)
        return frozenset(out - targets)

    def descendants(self, nodes):
        """de(A): nodes reachable from A by directed paths, minus A."""
        sources = set(nodes)
        self.check_nodes(sources)
        out = set()
        stack = list(sources)
        while stack:
            v = stack.pop()
            for c in self._children[v]:
                if c not in out:
                    out.add(c)
                    stack.append(c)
        return frozenset(out - sources)

    def _reach_down(self, v):
        """Nodes reachable from v by a directed path of length >= 1 (may include v)."""
        key = ("reach_down", v)
        if key not in self._cache:
            out = set()
            stack = list(self._children[v])
            while stack:
                u = stack.pop()
                if u not in out:
                    out.add(u)
                    stack.extend(self._children[u])
            self._cache[key] = frozenset(out)
        return self._cache[key]

    def strong_components(self):
        """Partition into strongly connected components (mutual-ancestor sets)."""
        if "sccs" not in self._cache:
            # Iterative Tarjan over the arrow relation.
            index = {}
            lowlink = {}
            on_stack = set()
            stack = []
            sccs = []
            counter = itertools.count()
            for root in self.nodes:
                if root in index:
                    continue
                work = [(root, iter(self.sort_nodes(self._children[root])))]
                index[root] = lowlink[root] = next(counter)
                stack.append(root)
                on_stack.add(root)
                while work:
                    v, it = work[-1]
                    advanced = False
                    for w in it:
                        if w not in index:
                            index[w] = lowlink[w] = next(counter)
                            stack.append(w)
                            on_stack.add(w)
                            work.append((w, iter(self.sort_nodes(self._children[w]))))
                            advanced = True
                            break
                        if w in on_stack:
                            lowlink[v] = min(lowlink[v], index[w])
                    if advanced:
                        continue
                    work.pop()
                    if work:
                        parent = work[-1][0]
                        lowlink[parent] = min(lowlink[parent], lowlink[v])
                    if lowlink[v] == index[v]:
                        comp = set()
                        while True:
                            w = stack.pop()
                            on_stack.discard(w)
                            comp.add(w)
                            if w == v:
                                break
                        sccs.append(frozenset(comp))
            sccs.sort(key=lambda c: min(self._index[v] for v in c))
            self._cache["sccs"] = tuple(sccs)
            self._cache["scc_of"] = {v: c for c in sccs for v in c}
        return self._cache["sccs"]

    def strong_component(self, v):
        self.check_node(v)
        self.strong_components()
        return self._cache["scc_of"][v]

    def is_acyclic(self):
        return all(len(c) == 1 for c in self.strong_components())

    # --- derived graphs -----------------------------------------------

    def without_arrows_into(self, v):
        self.check_node(v)
        return Bdmg(
            self.nodes,
            [(a, b) for (a, b) in self.arrows if b != v],
            self.arcs,
            allow_bows=True,
        )

    def intervened(self, v):
        """Remove all arrows into v and all arcs at v (standard intervention)."""
        self.check_node(v)
        return Bdmg(
            self.nodes,
            [(a, b) for (a, b) in self.arrows if b != v],
            [(a, b) for (a, b) in self.arcs if v not in (a, b)],
            allow_bows=True,
        )

    # --- serialization -------------------------------------------------

    def to_json_dict(self):
        arrows = sorted(self.arrows, key=lambda e: (self._index[e[0]], self._index[e[1]]))
        arcs = sorted(self.arcs, key=lambda e: (self._index[e[0]], self._index[e[1]]))
        return {
            "nodes": list(self.nodes),
            "arrows": [[u, v] for (u, v) in arrows],
            "arcs": [[u, v] for (u, v) in arcs],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data, allow_bows=False):
        try:
            nodes = data["nodes"]
            arrows = [tuple(e) for e in data.get("arrows", [])]
            arcs = [tuple(e) for e in data.get("arcs", [])]
        except (TypeError, KeyError) as exc:
            raise GraphError("malformed graph JSON: %s" % exc) from exc
        return cls(nodes, arrows, arcs, allow_bows=allow_bows)

    @classmethod
    def from_json(cls, text, allow_bows=False):
        return cls.from_json_dict(json.loads(text), allow_bows=allow_bows)

    def to_dot(self, name="G"):
        lines = ["digraph %s {" % name]
        for v in self.nodes:
            lines.append('  "%s";' % v)
        arrows = sorted(self.arrows, key=lambda e: (self._index[e[0]], self._index[e[1]]))
        arcs = sorted(self.arcs, key=lambda e: (self._index[e[0]], self._index[e[1]]))
        for (u, v) in arrows:
            lines.append('  "%s" -> "%s";' % (u, v))
        for (u, v) in arcs:
            lines.append('  "%s" -> "%s" [dir=both];' % (u, v))
        lines.append("}")
        return "\n".join(lines) + "\n"


# --- acyclification -----------------------------------------------------


def acyclify(g: Bdmg) -> Bdmg:
    """Collapse strongly connected components into arc cliques, lift parents.

    Arrow j -> i iff j is a parent of sc(i) from outside it; arc i <-> j iff
    some members of sc(i) and sc(j) coincide or are arc-linked.  The output
    is acyclic and Markov-equivalent under m-separation, but may contain
    bows.
    """
    key = "acyclify"
    if key in g._cache:
        return g._cache[key]
    arrows = set()
    for i in g.nodes:
        sc = g.strong_component(i)
        pa_sc = set()
        for v in sc:
            pa_sc |= g.parents(v)
        for j in pa_sc - sc:
            arrows.add((j, i))
    arcs = set()
    for i, j in itertools.combinations(g.nodes, 2):
        sci, scj = g.strong_component(i), g.strong_component(j)
        if sci is scj or sci == scj:
            arcs.add((i, j))
            continue
        if any(g.has_arc(a, b) for a in sci for b in scj):
            arcs.add((i, j))
    out = Bdmg(g.nodes, arrows, arcs, allow_bows=True)
    g._cache[key] = out
    return out


# --- separation ----------------------------------------------------------


@dataclass(frozen=True)
class SeparationQuery:
    a: frozenset
    b: frozenset
    c: frozenset
    criterion: str = "sigma"

    def __post_init__(self):
        object.__setattr__(self, "a", frozenset(self.a))
        object.__setattr__(self, "b", frozenset(self.b))
        object.__setattr__(self, "c", frozenset(self.c))
        if not self.a or not self.b:
            raise PreconditionError("A and B must be non-empty")
        if self.a & self.b or (self.a | self.b) & self.c:
            raise PreconditionError("A, B, C must be pairwise disjoint")
        if self.criterion not in ("sigma", "m", "d"):
            raise CriterionError("unknown criterion %r" % (self.criterion,))


def _ancestral_closure(g: Bdmg, c):
    """C together with all its ancestors."""
    out = set(c)
    stack = list(c)
    while stack:
        v = stack.pop()
        for p in g.parents(v):
            if p not in out:
                out.add(p)
                stack.append(p)
    return out


def _m_connected(g: Bdmg, a, b, c):
    """Collider-aware reachability for m-connection.

    States are (node, arrived-with-arrowhead); a walk through node v chains
    two edges, allowed iff v is a conditioned collider or an unconditioned
    non-collider.  Walk reachability coincides with path reachability for
    m-connection.
    """
    anc = _ancestral_closure(g, c)
    targets = set(b)
    seen = set()
    queue = []
    for s in a:
        for (u, _head_s, head_u, _kind) in g.edges_at(s):
            if u in targets:
                return True
            state = (u, head_u)
            if state not in seen:
                seen.add(state)
                queue.append(state)
    while queue:
        v, head_in = queue.pop()
        for (u, head_v, head_u, _kind) in g.edges_at(v):
            collider = head_in and head_v
            if collider:
                if v not in anc:
                    continue
            elif v in c:
                continue
            if u in targets:
                return True
            state = (u, head_u)
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return False


def m_separated(g: Bdmg, a, b, c=()):
    q = SeparationQuery(frozenset(a), frozenset(b), frozenset(c), "m")
    g.check_nodes(q.a | q.b | q.c)
    if not g.is_acyclic():
        raise CriterionError("m-separation requires an acyclic graph")
    return not _m_connected(g, q.a, q.b, q.c)


def d_separated(g: Bdmg, a, b, c=()):
    q = SeparationQuery(frozenset(a), frozenset(b), frozenset(c), "d")
    g.check_nodes(q.a | q.b | q.c)
    if g.arcs or not g.is_acyclic():
        raise CriterionError("d-separation requires a DAG")
    return not _m_connected(g, q.a, q.b, q.c)


def sigma_separated(g: Bdmg, a, b, c=()):
    q = SeparationQuery(frozenset(a), frozenset(b), frozenset(c), "sigma")
    g.check_nodes(q.a | q.b | q.c)
    return not _m_connected(acyclify(g), q.a, q.b, q.c)


def separated(g: Bdmg, query: SeparationQuery) -> bool:
    g.check_nodes(query.a | query.b | query.c)
    if query.criterion == "d":
        return d_separated(g, query.a, query.b, query.c)
    if query.criterion == "m":
        return m_separated(g, query.a, query.b, query.c)
    return sigma_separated(g, query.a, query.b, query.c)


# --- slow sigma oracle ----------------------------------------------------


def _edge_paths(g: Bdmg, a, b):
    """All simple paths a..b at edge resolution, with static sigma analysis.

    Each entry is (nodes, edges, inner) where inner holds, per inner node,
    (node, is_collider, sc_ok): sc_ok says the non-collider exemption holds
    regardless of C (every neighbour reached with an arrowhead lies in the
    node's strongly connected component).
    """
    key = ("edge_paths", a, b)
    if key in g._cache:
        return g._cache[key]
    results = []

    def extend(path_nodes, path_edges, visited):
        v = path_nodes[-1]
        for (u, head_v, head_u, kind) in g.edges_at(v):
            if u in visited:
                continue
            edge = (kind, v, u, head_v, head_u)
            if u == b:
                results.append((path_nodes + [u], path_edges + [edge]))
                continue
            extend(path_nodes + [u], path_edges + [edge], visited | {u})

    extend([a], [], {a})

    prepped = []
    for nodes, edges in results:
        inner = []
        for r in range(1, len(nodes) - 1):
            v = nodes[r]
            head_from_left = edges[r - 1][4]
            head_from_right = edges[r][3]
            collider = head_from_left and head_from_right
            sc_ok = True
            if not collider:
                # a conditioned non-collider stays passable only if every
                # path edge leaving it with a tail (an outgoing arrow)
                # points into its own strongly connected component
                sc = g.strong_component(v)
                if not head_from_left and edges[r - 1][1] not in sc:
                    sc_ok = False
                if not head_from_right and edges[r][2] not in sc:
                    sc_ok = False
            inner.append((v, collider, sc_ok))
        prepped.append((tuple(nodes), tuple(edges), tuple(inner)))
    g._cache[key] = prepped
    return prepped


def sigma_separated_oracle(g: Bdmg, a, b, c=()):
    """Direct path-enumeration rendering of sigma-separation (testing oracle)."""
    q = SeparationQuery(frozenset(a), frozenset(b), frozenset(c), "sigma")
    g.check_nodes(q.a | q.b | q.c)
    cset = set(q.c)
    for s in sorted(q.a, key=g.index):
        for t in sorted(q.b, key=g.index):
            for _nodes, _edges, inner in _edge_paths(g, s, t):
                if _sigma_path_open(g, inner, cset):
                    return False
    return True


def _sigma_path_open(g, inner, cset):
    for (v, collider, sc_ok) in inner:
        if collider:
            if v not in cset and not (g._reach_down(v) & cset):
                return False
        else:
            if v in cset and not sc_ok:
                return False
    return True


def connecting_path(g: Bdmg, a, b, c, criterion="sigma") -> Optional["Path"]:
    """First connecting path (lexicographic by node index), or None if separated.

    Used for witness output; the verdict always agrees with ``separated``.
    """
    q = SeparationQuery(frozenset(a), frozenset(b), frozenset(c), criterion)
    g.check_nodes(q.a | q.b | q.c)
    if criterion == "d" and (g.arcs or not g.is_acyclic()):
        raise CriterionError("d-separation requires a DAG")
    if criterion == "m" and not g.is_acyclic():
        raise CriterionError("m-separation requires an acyclic graph")
    cset = set(q.c)
    anc = _ancestral_closure(g, cset)
    best = None
    for s in sorted(q.a, key=g.index):
        for t in sorted(q.b, key=g.index):
            for nodes, edges, inner in _edge_paths(g, s, t):
                if criterion == "sigma":
                    open_ = _sigma_path_open(g, inner, cset)
                else:
                    open_ = all(
                        (v in anc) if collider else (v not in cset)
                        for (v, collider, _ok) in inner
                    )
                if open_:
                    cand = _path_from_edges(nodes, edges)
                    key = tuple(g.index(v) for v in cand.nodes)
                    if best is None or key < best[0]:
                        best = (key, cand)
    return best[1] if best else None


# --- paths ---------------------------------------------------------------


@dataclass(frozen=True)
class Path:
    """Node sequence with an edge mark ('->', '<-', '<->') per step."""

    nodes: tuple
    marks: tuple

    def __str__(self):
        out = [self.nodes[0]]
        for mark, node in zip(self.marks, self.nodes[1:]):
            out.append(" %s %s" % (mark, node))
        return "".join(out)


def _path_from_edges(nodes, edges):
    # edges store traversal order (u, v); '->' means u -> v along the path
    marks = []
    for (kind, u, v, head_u, head_v) in edges:
        if kind == ARC:
            marks.append("<->")
        elif head_v:
            marks.append("->")
        else:
            marks.append("<-")
    return Path(tuple(nodes), tuple(marks))


# --- primitive inducing paths ---------------------------------------------


def find_pips(g: Bdmg, i, j):
    """All primitive inducing paths between i and j, in deterministic order.

    A qualifying path has >= 3 nodes; every edge is an arc or an arrow whose
    endpoints share a strongly connected component, except that the first
    edge may be i -> q1 and the last may be j -> qr; and every inner node is
    an ancestor of {i, j}.
    """
    g.check_node(i)
    g.check_node(j)
    if i == j:
        raise PreconditionError("PIP endpoints must differ")
    an_ij = g.ancestors({i, j}) | {i, j}
    found = {}

    def edge_ok(u, v, first, last):
        # (u, v) traversal order along the path from i to j.
        if g.has_arc(u, v):
            return "<->"
        same_sc = g.strong_component(u) == g.strong_component(v)
        if (u, v) in g.arrows and (same_sc or first):
            return "->"
        if (v, u) in g.arrows and (same_sc or last):
            return "<-"
        return None

    def extend(nodes, marks, visited):
        v = nodes[-1]
        neighbours = set(g.children(v)) | set(g.parents(v)) | set(g.spouses(v))
        for u in g.sort_nodes(neighbours):
            if u in visited:
                continue
            if u != j and u not in an_ij:
                continue
            mark = edge_ok(v, u, first=(len(nodes) == 1), last=(u == j))
            if mark is None:
                continue
            if u == j:
                if len(nodes) >= 2:
                    found.setdefault(tuple(nodes + [u]), tuple(marks + [mark]))
                continue
            extend(nodes + [u], marks + [mark], visited | {u})

    extend([i], [], {i})
    paths = [Path(nodes, marks) for nodes, marks in found.items()]
    paths.sort(key=lambda p: tuple(g.index(v) for v in p.nodes))
    return tuple(paths)


# --- classification --------------------------------------------------------


@dataclass(frozen=True)
class GraphClassification:
    is_valid_bdmg: bool
    is_dag: bool
    is_admg: bool
    is_ancestral: bool
    is_maximal: bool
    inseparable_pairs: tuple
    valid_order: Optional[tuple]


def separable(g: Bdmg, i, j):
    """True iff some conditioning set sigma-separates the (non-adjacent) pair."""
    rest = [v for v in g.nodes if v not in (i, j)]
    for r in range(len(rest) + 1):
        for c in itertools.combinations(rest, r):
            if sigma_separated(g, {i}, {j}, c):
                return True
    return False


def inseparable_pairs(g: Bdmg):
    out = []
    for i, j in itertools.combinations(g.nodes, 2):
        if g.adjacent(i, j):
            continue
        if not separable(g, i, j):
            out.append((i, j))
    return tuple(out)


def classify(g: Bdmg) -> GraphClassification:
    acyclic = g.is_acyclic()
    bowless = not g.has_bows()
    is_admg = acyclic and bowless
    ancestral = is_admg and all(
        u not in g.ancestors({v}) and v not in g.ancestors({u}) for (u, v) in g.arcs
    )
    is_dag = is_admg and not g.arcs
    insep = inseparable_pairs(g)
    valid_order = None
    if ancestral:
        valid_order = tuple(
            sorted(((v, u) for (u, v) in g.arrows), key=lambda p: (g.index(p[0]), g.index(p[1])))
        )
    return GraphClassification(
        is_valid_bdmg=bowless,
        is_dag=is_dag,
        is_admg=is_admg,
        is_ancestral=ancestral,
        is_maximal=not insep,
        inseparable_pairs=insep,
        valid_order=valid_order,
    )


# --- Markov equivalence -----------------------------------------------------


def _set_triples(names):
    """All disjoint (A, B, C) with A, B non-empty, by 4-way labelling."""
    for labels in itertools.product(range(4), repeat=len(names)):
        a = frozenset(n for n, l in zip(names, labels) if l == 0)
        b = frozenset(n for n, l in zip(names, labels) if l == 1)
        c = frozenset(n for n, l in zip(names, labels) if l == 2)
        if a and b:
            yield a, b, c


def markov_equivalent(g1: Bdmg, g2: Bdmg, sets_mode=False) -> bool:
    """Same sigma-separations on both graphs.

    Default compares singleton (A, B) over all conditioning sets, which
    suffices for these compositional criteria; ``sets_mode`` audits every
    disjoint set triple.
    """
    if set(g1.nodes) != set(g2.nodes):
        raise PreconditionError("graphs must share a node set")
    if sets_mode:
        for a, b, c in _set_triples(g1.nodes):
            if sigma_separated(g1, a, b, c) != sigma_separated(g2, a, b, c):
                return False
        return True
    for i, j in itertools.combinations(g1.nodes, 2):
        rest = [v for v in g1.nodes if v not in (i, j)]
        for r in range(len(rest) + 1):
            for c in itertools.combinations(rest, r):
                if sigma_separated(g1, {i}, {j}, c) != sigma_separated(g2, {i}, {j}, c):
                    return False
    return True


# --- squeeze lemma -----------------------------------------------------------


def squeeze_separation_holds(g: Bdmg, i, j, conditioning) -> bool:
    """m-separation of a separable pair given any set between pa and an.

    Raises PreconditionError when the hypotheses fail; a False return would
    mean the lemma itself failed on a conforming input.
    """
    g.check_node(i)
    g.check_node(j)
    a = frozenset(conditioning)
    g.check_nodes(a)
    cls = classify(g)
    if not cls.is_ancestral:
        raise PreconditionError("graph is not ancestral")
    if {i, j} & a:
        raise PreconditionError("conditioning set overlaps the pair")
    pa = g.parents_of_set({i, j})
    an = g.ancestors({i, j})
    if not (pa <= a and a <= an):
        raise PreconditionError(
            "conditioning set not between pa(%r,%r)=%r and an=%r" % (i, j, set(pa), set(an))
        )
    if g.adjacent(i, j) or not separable(g, i, j):
        raise PreconditionError("pair (%r, %r) is not separable" % (i, j))
    return m_separated(g, {i}, {j}, a)
