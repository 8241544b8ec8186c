"""Tree decompositions: validation, nice form, exact bag metrics, heuristic
construction from elimination orderings, and the decomposition transfers
(blob graph, odd powers, closed neighborhoods, induced minors).

Bag metrics are computed exactly by branch and bound. ``alpha`` is the largest
independent set inside a single bag; ``mu`` is the largest induced matching
whose every edge touches a single bag (edges may have one endpoint outside).
Both searches share a node budget and fail loudly when it is exhausted, so a
caller never silently receives an under-approximated parameter.
"""

from dataclasses import dataclass

from .bits import bit, bits, mask_of, popcount, to_tuple
from .errors import InputError, InvariantError, ResourceLimitError
from .graphs import Graph, ball_mask

DEFAULT_SEARCH_BUDGET = 10**7


class TreeDecomposition:
    """A rooted tree of bags. Nodes are 0..size-1; bags are vertex masks."""

    __slots__ = ("graph_n", "bags", "tree_edges", "root", "_nbrs")

    def __init__(self, graph_n, bags, tree_edges, root=0):
        norm = []
        for b in bags:
            m = b if isinstance(b, int) else mask_of(b)
            if m < 0 or m >> graph_n:
                raise InputError(f"bag {m:#x} has members outside 0..{graph_n - 1}")
            norm.append(m)
        if not norm:
            raise InputError("a tree decomposition needs at least one node")
        size = len(norm)
        for u, v in tree_edges:
            if not (0 <= u < size and 0 <= v < size):
                raise InputError(f"tree edge ({u}, {v}) out of range")
        if not 0 <= root < size:
            raise InputError(f"root {root} out of range")
        self.graph_n = graph_n
        self.bags = tuple(norm)
        self.tree_edges = tuple(tuple(sorted(e)) for e in tree_edges)
        self.root = root
        nbrs = [[] for _ in range(size)]
        for u, v in self.tree_edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        self._nbrs = tuple(tuple(sorted(x)) for x in nbrs)

    @property
    def size(self):
        return len(self.bags)

    def node_neighbors(self, t):
        return self._nbrs[t]

    def children_of(self, t, parent):
        return [c for c in self._nbrs[t] if c != parent]

    def rooted_order(self):
        """(node, parent) pairs in a DFS preorder from the root."""
        out = []
        stack = [(self.root, -1)]
        seen = {self.root}
        while stack:
            t, p = stack.pop()
            out.append((t, p))
            for c in reversed(self._nbrs[t]):
                if c not in seen:
                    seen.add(c)
                    stack.append((c, t))
        return out

    def subtree_vertex_masks(self):
        """V_t for each node: union of bags in the subtree rooted there."""
        order = self.rooted_order()
        vt = list(self.bags)
        for t, p in reversed(order):
            if p >= 0:
                vt[p] |= vt[t]
        return vt

    def width(self):
        return max(popcount(b) for b in self.bags) - 1


def validate_decomposition(graph, td):
    """All violated axioms, with witnesses. Empty list means valid."""
    violations = []
    size = td.size
    if td.graph_n != graph.n:
        violations.append(f"decomposition is over n={td.graph_n}, graph has n={graph.n}")
        return violations
    # tree structure
    if len(set(td.tree_edges)) != len(td.tree_edges):
        violations.append("duplicate tree edges")
    if len(td.tree_edges) != size - 1:
        violations.append(f"{size} nodes need {size - 1} tree edges, found {len(td.tree_edges)}")
    stack = [0]
    seen = {0}
    while stack:
        t = stack.pop()
        for c in td.node_neighbors(t):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    if len(seen) != size:
        violations.append("tree is not connected")
    if violations:
        return violations
    # vertex and edge coverage
    union = 0
    for b in td.bags:
        union |= b
    for v in range(graph.n):
        if not union & bit(v):
            violations.append(f"vertex {v} is in no bag")
    for u, v in graph.edges:
        pair = bit(u) | bit(v)
        if not any(b & pair == pair for b in td.bags):
            violations.append(f"edge ({u}, {v}) is covered by no bag")
    # connected traces
    for v in range(graph.n):
        nodes = [t for t in range(size) if td.bags[t] & bit(v)]
        if not nodes:
            continue
        reached = {nodes[0]}
        stack = [nodes[0]]
        node_set = set(nodes)
        while stack:
            t = stack.pop()
            for c in td.node_neighbors(t):
                if c in node_set and c not in reached:
                    reached.add(c)
                    stack.append(c)
        if len(reached) != len(nodes):
            violations.append(f"trace of vertex {v} is disconnected")
    return violations


# ---------------------------------------------------------------------------
# Nice form

LEAF = "leaf"
INTRODUCE = "introduce"
FORGET = "forget"
JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    kind: str
    vertex: object  # vertex id for introduce/forget, None otherwise
    bag: int
    children: tuple


class NiceTreeDecomposition:
    """Nice decomposition with leaf/introduce/forget/join nodes.

    ``nodes`` is in bottom-up order: children precede their parent, the root
    is last. Leaf and root bags are empty.
    """

    __slots__ = ("graph_n", "nodes")

    def __init__(self, graph_n, nodes):
        self.graph_n = graph_n
        self.nodes = tuple(nodes)

    @property
    def size(self):
        return len(self.nodes)

    @property
    def root(self):
        return len(self.nodes) - 1

    def subtree_vertex_masks(self):
        vt = []
        for node in self.nodes:
            m = node.bag
            for c in node.children:
                m |= vt[c]
            vt.append(m)
        return vt

    def to_tree_decomposition(self):
        edges = []
        for i, node in enumerate(self.nodes):
            for c in node.children:
                edges.append((c, i))
        return TreeDecomposition(self.graph_n, [nd.bag for nd in self.nodes], edges, root=self.root)


def make_nice(graph, td):
    """Convert a valid decomposition to nice form.

    Every produced bag is a subset of some original bag, so neither metric can
    increase. Chains introduce/forget vertices in ascending id order.
    """
    problems = validate_decomposition(graph, td)
    if problems:
        raise InputError("cannot normalize an invalid decomposition: " + "; ".join(problems[:3]))
    nodes = []

    def emit(kind, vertex, bag, children):
        nodes.append(NiceNode(kind, vertex, bag, tuple(children)))
        return len(nodes) - 1

    def chain(from_id, from_bag, to_bag):
        """Forget then introduce, one vertex at a time, to reach to_bag."""
        cur_id, cur = from_id, from_bag
        for v in to_tuple(from_bag & ~to_bag):
            cur &= ~bit(v)
            cur_id = emit(FORGET, v, cur, (cur_id,))
        for v in to_tuple(to_bag & ~from_bag):
            cur |= bit(v)
            cur_id = emit(INTRODUCE, v, cur, (cur_id,))
        return cur_id

    def fresh_top(bag):
        cur_id = emit(LEAF, None, 0, ())
        return chain(cur_id, 0, bag)

    order = td.rooted_order()
    children_map = {t: [] for t in range(td.size)}
    for t, p in order:
        if p >= 0:
            children_map[p].append(t)
    top_of = {}
    for t, p in reversed(order):
        bag = td.bags[t]
        child_tops = []
        for c in children_map[t]:
            child_tops.append(chain(top_of[c], td.bags[c], bag))
        if not child_tops:
            top_of[t] = fresh_top(bag)
        else:
            cur = child_tops[0]
            for other in child_tops[1:]:
                cur = emit(JOIN, None, bag, (cur, other))
            top_of[t] = cur
    chain(top_of[td.root], td.bags[td.root], 0)
    return NiceTreeDecomposition(graph.n, nodes)


# ---------------------------------------------------------------------------
# Exact bag metrics


class _Budget:
    __slots__ = ("left", "what")

    def __init__(self, limit, what):
        self.left = limit
        self.what = what

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise ResourceLimitError(f"search budget exhausted while {self.what}")


def _max_independent_set(adj, candidates, budget):
    """Exact maximum independent set over the ``candidates`` mask.

    adj maps vertex -> adjacency mask. Returns (size, witness mask).
    """
    best_size = 0
    best_set = 0

    def rec(chosen, size, pool):
        # the exclude branch loops in place, so recursion depth stays at the
        # number of included vertices
        nonlocal best_size, best_set
        while True:
            budget.spend()
            if size + popcount(pool) <= best_size:
                return
            if pool == 0:
                if size > best_size:
                    best_size, best_set = size, chosen
                return
            pick, pick_deg = -1, -1
            for v in bits(pool):
                d = popcount(adj[v] & pool)
                if d > pick_deg:
                    pick, pick_deg = v, d
            if pick_deg == 0:
                total = size + popcount(pool)
                if total > best_size:
                    best_size, best_set = total, chosen | pool
                return
            rec(chosen | bit(pick), size + 1, pool & ~(adj[pick] | bit(pick)))
            pool &= ~bit(pick)

    rec(0, 0, candidates)
    return best_size, best_set


def max_independent_set_in_bag(graph, bag, budget=None):
    budget = budget or _Budget(DEFAULT_SEARCH_BUDGET, "bag independent set")
    masked = [graph.adj_mask(v) & bag for v in range(graph.n)]
    return _max_independent_set(masked, bag, budget)


def max_induced_matching_touching(graph, bag, budget=None):
    """Largest induced matching all of whose edges touch ``bag``.

    Reduces to a maximum independent set among the touching edges, where two
    edges conflict when their four endpoints induce a connected subgraph.
    Returns (size, tuple of edges).
    """
    budget = budget or _Budget(DEFAULT_SEARCH_BUDGET, "bag induced matching")
    cands = [e for e in graph.edges if (bit(e[0]) | bit(e[1])) & bag]
    k = len(cands)
    conflict = [0] * k
    masks = [bit(u) | bit(v) for u, v in cands]
    for i in range(k):
        cover_i = graph.neighborhood_of_set(masks[i]) | masks[i]
        for j in range(i + 1, k):
            if cover_i & masks[j]:
                conflict[i] |= bit(j)
                conflict[j] |= bit(i)
    size, chosen = _max_independent_set(conflict, (1 << k) - 1, budget)
    return size, tuple(cands[i] for i in bits(chosen))


@dataclass(frozen=True)
class DecompositionMetrics:
    alpha: int
    mu: int
    alpha_witness: tuple  # (node, vertex mask)
    mu_witness: tuple  # (node, edge tuple)


def decomposition_metrics(graph, td, budget_limit=DEFAULT_SEARCH_BUDGET):
    """Exact alpha and mu of a decomposition, with witnesses.

    Raises ResourceLimitError naming the bag when a per-bag search blows the
    budget.
    """
    bags = td.bags if isinstance(td, TreeDecomposition) else [nd.bag for nd in td.nodes]
    alpha, mu = 0, 0
    alpha_witness, mu_witness = (0, 0), (0, ())
    for t, bag in enumerate(bags):
        try:
            a, a_set = max_independent_set_in_bag(graph, bag, _Budget(budget_limit, f"alpha of bag {t}"))
            m, m_edges = max_induced_matching_touching(graph, bag, _Budget(budget_limit, f"mu of bag {t}"))
        except ResourceLimitError as exc:
            raise ResourceLimitError(f"bag {t} too large for exact search: {exc}") from exc
        if a > alpha:
            alpha, alpha_witness = a, (t, a_set)
        if m > mu:
            mu, mu_witness = m, (t, m_edges)
    if mu > alpha:
        raise InvariantError(f"mu={mu} exceeds alpha={alpha}, searches disagree")
    return DecompositionMetrics(alpha, mu, alpha_witness, mu_witness)


# ---------------------------------------------------------------------------
# Heuristic construction


def _elimination_order(graph, strategy):
    work = [graph.adj_mask(v) for v in range(graph.n)]
    alive = graph.vertex_mask()
    order = []
    while alive:
        best_v, best_cost = -1, None
        for v in bits(alive):
            nbrs = work[v] & alive
            if strategy == "min-degree":
                cost = popcount(nbrs)
            else:  # min-fill
                fill = 0
                nbr_list = to_tuple(nbrs)
                for i, u in enumerate(nbr_list):
                    fill += len(nbr_list) - 1 - i - popcount(work[u] & nbrs & ~((bit(u) << 1) - 1))
                cost = fill
            if best_cost is None or cost < best_cost:
                best_v, best_cost = v, cost
        v = best_v
        nbrs = work[v] & alive
        for u in bits(nbrs):
            work[u] |= nbrs & ~bit(u)
        order.append(v)
        alive &= ~bit(v)
    return order, work


def heuristic_decomposition(graph, strategy="min-fill"):
    """Decomposition from a greedy elimination ordering.

    Bag i holds vertex order[i] plus its not-yet-eliminated fill neighbors;
    node i hangs below the node of its earliest-eliminated such neighbor.
    Ties in the greedy choice go to the lowest vertex id.
    """
    if strategy not in ("min-degree", "min-fill"):
        raise InputError(f"unknown strategy {strategy!r}")
    if graph.n == 0:
        raise InputError("cannot decompose the null graph")
    order, fill_adj = _elimination_order(graph, strategy)
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    edges = []
    for i, v in enumerate(order):
        later = [u for u in bits(fill_adj[v]) if pos[u] > i]
        bags.append(bit(v) | mask_of(later))
        if later:
            edges.append((i, min(pos[u] for u in later)))
        elif i + 1 < len(order):
            edges.append((i, i + 1))
    return TreeDecomposition(graph.n, bags, edges, root=0)


def single_bag_decomposition(graph):
    return TreeDecomposition(graph.n, [graph.vertex_mask()], [], root=0)


# ---------------------------------------------------------------------------
# Transfers


def closed_neighborhood_expansion(graph, td):
    """Replace every bag X by N[X]; stays a valid decomposition."""
    bags = [graph.closed_neighborhood_of_set(b) for b in td.bags]
    return TreeDecomposition(graph.n, bags, td.tree_edges, td.root)


def blob_decomposition(graph, td, family):
    """Transfer a decomposition of the graph to its blob graph.

    Bag t of the result holds the indices of members meeting bag t. When the
    family has no duplicates the mu metric cannot grow; when every member has
    at least two vertices the alpha of the result is at most the original mu.
    """
    family.require_valid_members(graph)
    bags = []
    for b in td.bags:
        bags.append(mask_of(j for j, member in enumerate(family.members) if member.vertices & b))
    return TreeDecomposition(len(family.members), bags, td.tree_edges, td.root)


def odd_power_decomposition(graph, td, r):
    """Decomposition of the r-th power (odd r) with alpha bounded by mu.

    Bags of non-isolated vertices grow to their distance-(r-1)/2 balls around
    the old bags; every isolated vertex moves to a private bag hung off the
    root, which keeps the alpha bound intact on graphs that have an edge.
    """
    if r < 1 or r % 2 == 0:
        raise InputError(
            f"power transfer needs odd r, got {r}: even powers admit no such transfer"
        )
    d = (r - 1) // 2
    isolated = mask_of(v for v in range(graph.n) if graph.degree(v) == 0)
    ball = [ball_mask(graph, v, d) for v in range(graph.n)]
    bags = []
    for b in td.bags:
        grown = 0
        for u in bits(b & ~isolated):
            grown |= ball[u]
        # a ball around a non-isolated vertex stays inside its component,
        # so no isolated vertex can enter this way
        bags.append(grown)
    edges = list(td.tree_edges)
    for w in bits(isolated):
        bags.append(bit(w))
        edges.append((td.root, len(bags) - 1))
    return TreeDecomposition(graph.n, bags, edges, td.root)


def induced_minor_decomposition(graph, td, op):
    """Apply a vertex deletion or edge contraction to graph and decomposition.

    op is ("delete", v) or ("contract", u, v) with uv an edge. Returns the new
    graph, its decomposition on the same tree, and the old->new vertex map
    (contractions map both endpoints to the merged vertex, placed last).
    """
    if op[0] == "delete":
        v = op[1]
        if not 0 <= v < graph.n:
            raise InputError(f"vertex {v} out of range")
        keep = [u for u in range(graph.n) if u != v]
        mapping = {old: new for new, old in enumerate(keep)}
        edges = [(mapping[a], mapping[b]) for a, b in graph.edges if v not in (a, b)]
        new_graph = Graph(graph.n - 1, edges)
        bags = [mask_of(mapping[u] for u in to_tuple(b) if u != v) for b in td.bags]
    elif op[0] == "contract":
        u, v = op[1], op[2]
        if not graph.has_edge(u, v):
            raise InputError(f"cannot contract non-edge ({u}, {v})")
        keep = [w for w in range(graph.n) if w not in (u, v)]
        mapping = {old: new for new, old in enumerate(keep)}
        z = graph.n - 2
        mapping[u] = mapping[v] = z
        edges = []
        for a, b in graph.edges:
            na, nb = mapping[a], mapping[b]
            if na != nb:
                edges.append((na, nb))
        new_graph = Graph(graph.n - 1, edges)
        bags = []
        for b in td.bags:
            members = {mapping[w] for w in to_tuple(b)}
            bags.append(mask_of(members))
    else:
        raise InputError(f"unknown induced-minor operation {op!r}")
    return new_graph, TreeDecomposition(new_graph.n, bags, td.tree_edges, td.root), mapping


def find_bag_dominated_vertex(graph, td):
    """Some (vertex, node) with N[v] inside the node's bag.

    Every valid decomposition has one; scanning order makes the witness
    deterministic (lowest node, then lowest vertex).
    """
    if graph.n == 0:
        raise InputError("null graph has no vertices")
    for t, bag in enumerate(td.bags):
        for v in bits(bag):
            if graph.closed_mask(v) & ~bag == 0:
                return v, t
    raise InvariantError("no bag contains a closed neighborhood; decomposition must be invalid")


# ---------------------------------------------------------------------------
# PACE-style text format


def parse_td(text):
    """Parse the ``s td`` format; bag ids are 1-based, root is bag 1."""
    header = None
    bags = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if header is not None:
                raise InputError("duplicate header", line=lineno)
            if len(parts) != 5 or parts[1] != "td":
                raise InputError(f"malformed header {line!r}", line=lineno)
            try:
                header = (int(parts[2]), int(parts[3]), int(parts[4]))
            except ValueError:
                raise InputError(f"malformed header {line!r}", line=lineno) from None
        elif parts[0] == "b":
            if header is None:
                raise InputError("bag line before header", line=lineno)
            try:
                bag_id = int(parts[1])
                members = [int(x) for x in parts[2:]]
            except ValueError:
                raise InputError(f"malformed bag line {line!r}", line=lineno) from None
            if bag_id in bags:
                raise InputError(f"duplicate bag id {bag_id}", line=lineno)
            if not 1 <= bag_id <= header[0]:
                raise InputError(f"bag id {bag_id} out of range", line=lineno)
            for v in members:
                if not 1 <= v <= header[2]:
                    raise InputError(f"bag member {v} out of range", line=lineno)
            bags[bag_id] = mask_of(v - 1 for v in members)
        else:
            if header is None:
                raise InputError("edge line before header", line=lineno)
            if len(parts) != 2:
                raise InputError(f"malformed tree edge {line!r}", line=lineno)
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise InputError(f"malformed tree edge {line!r}", line=lineno) from None
            if not (1 <= a <= header[0] and 1 <= b <= header[0]):
                raise InputError(f"tree edge endpoint out of range in {line!r}", line=lineno)
            edges.append((a - 1, b - 1))
    if header is None:
        raise InputError("missing 's td' header")
    count = header[0]
    bag_list = [bags.get(i + 1, 0) for i in range(count)]
    if len(bags) != count:
        raise InputError(f"header declares {count} bags, found {len(bags)}")
    return TreeDecomposition(header[2], bag_list, edges, root=0)


def serialize_td(td):
    width = max(popcount(b) for b in td.bags)
    lines = [f"s td {td.size} {width} {td.graph_n}"]
    for i, b in enumerate(td.bags):
        members = " ".join(str(v + 1) for v in to_tuple(b))
        lines.append(f"b {i + 1} {members}".rstrip())
    for u, v in td.tree_edges:
        lines.append(f"{u + 1} {v + 1}")
    return "\n".join(lines) + "\n"
