"""Shared helpers: independent brute-force recomputations used as oracles."""

from fractions import Fraction
from random import Random

from imtw.bits import bits, popcount, submasks, to_tuple
from imtw.graphs import Graph, random_graph


def brute_subsets_mwis(graph, weights):
    """Plain subset scan, independent of the package's branchy oracle."""
    best = Fraction(0)
    for m in submasks(graph.vertex_mask()):
        if graph.is_independent(m):
            best = max(best, weights.of_set(m))
    return best


def induced_on(graph, mask):
    verts = to_tuple(mask)
    idx = {v: i for i, v in enumerate(verts)}
    edges = [(idx[u], idx[v]) for u, v in graph.edges if u in idx and v in idx]
    return Graph(len(verts), edges)


def has_cycle_within(graph, mask):
    """DFS cycle test, independent of the edge-count formula in the package."""
    seen = set()
    for start in bits(mask):
        if start in seen:
            continue
        stack = [(start, -1)]
        seen.add(start)
        while stack:
            v, parent = stack.pop()
            for u in bits(graph.adj_mask(v) & mask):
                if u == parent:
                    continue
                if u in seen:
                    return True
                seen.add(u)
                stack.append((u, v))
    return False


def is_bipartite_within(graph, mask):
    color = {}
    for start in bits(mask):
        if start in color:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            v = queue.pop()
            for u in bits(graph.adj_mask(v) & mask):
                if u not in color:
                    color[u] = color[v] ^ 1
                    queue.append(u)
                elif color[u] == color[v]:
                    return False
    return True


def max_degree_within(graph, mask):
    return max((popcount(graph.adj_mask(v) & mask) for v in bits(mask)), default=0)


def chordal_completion(graph, rng=None):
    """Greedy min-fill completion; the result is chordal by construction."""
    adj = {v: set(graph.neighbors(v)) for v in range(graph.n)}
    alive = set(range(graph.n))
    extra = []
    while alive:
        def fill_cost(v):
            nbrs = [u for u in adj[v] if u in alive]
            return sum(
                1
                for i, a in enumerate(nbrs)
                for b in nbrs[i + 1 :]
                if b not in adj[a]
            )
        v = min(sorted(alive), key=fill_cost)
        nbrs = [u for u in adj[v] if u in alive]
        for i, a in enumerate(nbrs):
            for b in nbrs[i + 1 :]:
                if b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
                    extra.append((a, b))
        alive.remove(v)
    return Graph(graph.n, list(graph.edges) + extra)


def seeded_graphs(seed, count, n_lo, n_hi, ps=(0.2, 0.5)):
    rng = Random(seed)
    out = []
    for i in range(count):
        n = n_lo + (i % (n_hi - n_lo + 1))
        out.append(random_graph(n, ps[i % len(ps)], seed=rng.randrange(2**32)))
    return out
