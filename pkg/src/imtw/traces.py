"""Maximal-independent-set traces and the MWIS dynamic program.

The bag family construction: every maximal independent set I of the whole
graph meets a bag X in a set of the form J' minus N(Q), where J' is some
maximal independent set of the bag-induced subgraph and Q is a small subset
of the bag's outside neighborhood (at most k vertices when induced matchings
touching the bag have size at most k). Enumerating all such (J', Q) pairs
therefore covers every trace, with at most n^(3k) distinct outcomes.
"""

import logging
from fractions import Fraction

from .bits import bit, bits, popcount, to_tuple
from .errors import InvariantError, ResourceLimitError

logger = logging.getLogger(__name__)

DEFAULT_STATE_BUDGET = 10**7


def enumerate_maximal_independent_sets(graph, universe=None, limit=None):
    """All inclusion-maximal independent subsets of ``universe`` (default all).

    Pivoting recursion on the complement graph; each set is produced once.
    The result is sorted canonically. A limit overflow raises with the count
    produced so far.
    """
    if universe is None:
        universe = graph.vertex_mask()
    nonadj = [universe & ~graph.adj_mask(v) & ~bit(v) for v in range(graph.n)]
    out = []

    def expand(chosen, cand, excl):
        if cand == 0 and excl == 0:
            out.append(chosen)
            if limit is not None and len(out) > limit:
                raise ResourceLimitError(
                    f"maximal independent set limit {limit} exceeded", partial_count=len(out)
                )
            return
        pivot, coverage = -1, -1
        for u in bits(cand | excl):
            c = popcount(cand & nonadj[u])
            if c > coverage:
                pivot, coverage = u, c
        for v in bits(cand & ~nonadj[pivot]):
            expand(chosen | bit(v), cand & nonadj[v], excl & nonadj[v])
            cand &= ~bit(v)
            excl |= bit(v)

    expand(0, universe, 0)
    return sorted(out, key=to_tuple)


class TraceFamily:
    """Candidate traces of maximal independent sets at one bag."""

    __slots__ = ("node", "bag", "k", "members", "provenance")

    def __init__(self, node, bag, k, members, provenance=None):
        self.node = node
        self.bag = bag
        self.k = k
        self.members = tuple(members)
        self.provenance = provenance

    def __contains__(self, mask):
        return mask in self._member_set()

    def _member_set(self):
        return set(self.members)

    def __len__(self):
        return len(self.members)


def trace_family_for_bag(graph, bag, k, node=None, keep_provenance=False, limit=None):
    """The family of candidate traces at one bag, for matching bound ``k``.

    Coverage: if every induced matching touching the bag has size at most k,
    the trace of every maximal independent set of the graph is in the family.
    """
    maximal_in_bag = enumerate_maximal_independent_sets(graph, universe=bag, limit=limit)
    bag_size = popcount(bag)
    if bag_size and len(maximal_in_bag) > bag_size ** (2 * k):
        logger.warning(
            "bag %s has %d maximal independent sets, above the size-%d bound %d: "
            "an induced matching larger than k=%d must touch it",
            node if node is not None else f"{bag:#x}",
            len(maximal_in_bag),
            bag_size,
            bag_size ** (2 * k),
            k,
        )
        alekseev_ok = False
    else:
        alekseev_ok = True
    outside = graph.neighborhood_of_set(bag)
    # Distinct bag-side hit sets N(Q) over |Q| <= k, built level by level so
    # that subsets of the outside neighborhood never get enumerated directly.
    union_j = 0
    for j_prime in maximal_in_bag:
        union_j |= j_prime
    hits = {0: 0}  # hit mask -> some witness Q
    frontier = {0: 0}
    for _ in range(k):
        grown = {}
        for h, q_mask in frontier.items():
            for q in bits(outside):
                h2 = h | (graph.adj_mask(q) & union_j)
                if h2 not in hits and h2 not in grown:
                    grown[h2] = q_mask | bit(q)
        frontier = grown
        hits.update(grown)
        if not frontier:
            break
    members = {}
    for h, q_mask in hits.items():
        for j_prime in maximal_in_bag:
            trace = j_prime & ~h
            if trace not in members:
                members[trace] = (j_prime, q_mask)
            if limit is not None and len(members) > limit:
                raise ResourceLimitError(
                    f"trace family limit {limit} exceeded", partial_count=len(members)
                )
    ordered = sorted(members, key=to_tuple)
    if alekseev_ok and graph.n > 0 and len(ordered) > max(graph.n, 1) ** (3 * k):
        raise InvariantError(
            f"trace family has {len(ordered)} members, above the n^(3k) bound"
        )
    return TraceFamily(
        node, bag, k, ordered, provenance=members if keep_provenance else None
    )


def bag_trace_family(graph, td, t, k, keep_provenance=False, limit=None):
    return trace_family_for_bag(
        graph, td.bags[t], k, node=t, keep_provenance=keep_provenance, limit=limit
    )


def mwis_dp(graph, nice_td, weights, k, state_budget=DEFAULT_STATE_BUDGET, debug=False):
    """Max weight independent set over a nice decomposition with mu at most k.

    Table states at each node are the members of the node's trace family;
    anything outside a family is treated as minus infinity. Returns the exact
    optimum (weight, vertex mask); the result is re-validated before return.
    """
    families = [
        set(trace_family_for_bag(graph, node.bag, k, node=i).members)
        for i, node in enumerate(nice_td.nodes)
    ]
    tables = [None] * nice_td.size
    backptr = [None] * nice_td.size
    states_seen = 0

    for i, node in enumerate(nice_td.nodes):
        table = {}
        bp = {}

        def push(state, value, origin):
            nonlocal states_seen
            if state not in families[i]:
                return
            cur = table.get(state)
            if cur is None:
                states_seen += 1
                if states_seen > state_budget:
                    raise ResourceLimitError(f"MWIS state budget {state_budget} exceeded")
            if cur is None or value > cur or (value == cur and origin < bp[state]):
                table[state] = value
                bp[state] = origin

        if node.kind == "leaf":
            push(0, Fraction(0), ())
        elif node.kind == "introduce":
            v = node.vertex
            child = tables[node.children[0]]
            vb = bit(v)
            for state in sorted(child):
                value = child[state]
                push(state, value, (state,))
                if not graph.adj_mask(v) & state:
                    push(state | vb, value + weights[v], (state,))
        elif node.kind == "forget":
            v = node.vertex
            child = tables[node.children[0]]
            keep = ~bit(v)
            for state in sorted(child):
                push(state & keep, child[state], (state,))
        else:  # join
            left = tables[node.children[0]]
            right = tables[node.children[1]]
            for state in sorted(left):
                if state in right:
                    push(state, left[state] + right[state] - weights.of_set(state), (state, state))
        if debug:
            for state in table:
                if not graph.is_independent(state):
                    raise InvariantError(f"dependent state {state:#x} at node {i}")
        tables[i] = table
        backptr[i] = bp

    root = nice_td.root
    if 0 not in tables[root]:
        raise InvariantError("empty state missing at the root; families are broken")
    best = tables[root][0]

    solution = 0
    stack = [(root, 0)]
    while stack:
        i, state = stack.pop()
        node = nice_td.nodes[i]
        if node.kind == "leaf":
            continue
        origin = backptr[i][state]
        if node.kind == "introduce":
            if state & bit(node.vertex):
                solution |= bit(node.vertex)
            stack.append((node.children[0], origin[0]))
        elif node.kind == "forget":
            stack.append((node.children[0], origin[0]))
        else:
            stack.append((node.children[0], origin[0]))
            stack.append((node.children[1], origin[1]))

    if not graph.is_independent(solution):
        raise InvariantError("reconstructed MWIS solution is not independent")
    if weights.of_set(solution) != best:
        raise InvariantError(
            f"reconstructed weight {weights.of_set(solution)} differs from optimum {best}"
        )
    return best, solution
