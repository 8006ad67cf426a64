"""Exact maximum clique search and maximum intersecting sets.

The clique engine is a bitset branch-and-bound in the MCQ/BBMC style:
vertices are renumbered in descending-degeneracy order, candidate sets are
Python integers used as bitsets, and every node recomputes a greedy
sequential colouring whose colour count bounds the clique that can still be
added.

Intersecting sets are cliques in the complement of the derangement graph.
Because that graph is a Cayley graph, some maximum clique contains the
identity; conjugating by a suitable element additionally moves a chosen
second member to its class representative.  :func:`max_intersecting_set`
therefore searches one small neighbourhood per non-derangement class.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .action import Action, is_intersecting_set

BITSET_LIMIT = 32_768
# below this many branch vertices in total, a worker pool costs more than it saves
PARALLEL_MIN_VERTICES = 400
CHECK_EVERY = 512


class SearchTimeout(Exception):
    pass


class GraphTooLargeError(MemoryError):
    """Bitset adjacency would exceed the vertex cap."""


def _bits(mask: np.ndarray) -> int:
    """Bool array -> Python int with bit i set iff mask[i]."""
    packed = np.packbits(np.asarray(mask, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _members(bits: int) -> list[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


@dataclass(eq=False)
class GraphView:
    """Undirected graph on ``labels`` with bitset adjacency rows."""

    labels: list[int]
    adj: list[int]

    def __post_init__(self):
        if len(self.adj) != len(self.labels):
            raise ValueError("adjacency size does not match labels")

    @classmethod
    def from_matrix(cls, M: np.ndarray, labels: Sequence[int] | None = None) -> GraphView:
        M = np.asarray(M, dtype=bool)
        n = len(M)
        if n > BITSET_LIMIT:
            raise GraphTooLargeError(f"{n} vertices exceed the bitset cap of {BITSET_LIMIT}")
        if not np.array_equal(M, M.T):
            raise ValueError("adjacency matrix is not symmetric")
        M = M & ~np.eye(n, dtype=bool)
        return cls(list(labels) if labels is not None else list(range(n)), [_bits(r) for r in M])

    @classmethod
    def from_edges(cls, n: int, edges) -> GraphView:
        M = np.zeros((n, n), dtype=bool)
        for a, b in edges:
            M[a, b] = M[b, a] = True
        return cls.from_matrix(M)

    @property
    def n(self) -> int:
        return len(self.labels)

    def adjacent(self, a: int, b: int) -> bool:
        return bool(self.adj[a] >> b & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def is_clique(self, verts: Sequence[int]) -> bool:
        vs = list(verts)
        return all(self.adjacent(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])


@dataclass
class CliqueResult:
    size: int
    certificate: list[int]  # labels (group element indices for intersecting sets)
    optimal: bool
    elapsed: float = 0.0
    nodes: int = 0
    proof: str = "search"  # "search" (exhausted), "bound" (met an upper bound), "timeout"
    detail: dict = field(default_factory=dict)

    def to_dict(self, group=None) -> dict:
        d = {"size": self.size, "optimal": self.optimal, "proof": self.proof,
             "elapsed": round(self.elapsed, 3), "nodes": self.nodes,
             "certificate": list(map(int, self.certificate))}
        if group is not None:
            d["certificate"] = [list(map(int, group.table[i])) for i in self.certificate]
        d.update(self.detail)
        return d


def degeneracy_order(adj: list[int], tiebreak: Sequence[float] | None = None) -> list[int]:
    """Vertices in descending degeneracy order (last removed first)."""
    n = len(adj)
    deg = [a.bit_count() for a in adj]
    tie = list(range(n)) if tiebreak is None else list(tiebreak)
    alive = (1 << n) - 1
    removed = []
    for _ in range(n):
        v = min(_members(alive), key=lambda u: (deg[u], tie[u]))
        removed.append(v)
        alive &= ~(1 << v)
        for u in _members(adj[v] & alive):
            deg[u] -= 1
    return removed[::-1]


class _Solver:
    def __init__(self, adj: list[int], lower: int, upper: int | None, deadline: float | None):
        self.adj = adj
        self.best: list[int] = []
        self.best_size = lower
        self.upper = upper
        self.deadline = deadline
        self.nodes = 0
        self.hit_bound = False

    def colour_sort(self, P: int):
        adj = self.adj
        order, colours = [], []
        U, k = P, 0
        while U:
            k += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~adj[v]
                Q ^= low
                U ^= low
                order.append(v)
                colours.append(k)
        return order, colours

    def expand(self, C: list[int], P: int):
        self.nodes += 1
        if self.deadline is not None and self.nodes % CHECK_EVERY == 0 and time.monotonic() > self.deadline:
            raise SearchTimeout
        order, colours = self.colour_sort(P)
        adj = self.adj
        for i in range(len(order) - 1, -1, -1):
            if len(C) + colours[i] <= self.best_size:
                return
            v = order[i]
            C.append(v)
            newP = P & adj[v]
            if newP:
                self.expand(C, newP)
            elif len(C) > self.best_size:
                self.best = list(C)
                self.best_size = len(C)
                if self.upper is not None and self.best_size >= self.upper:
                    self.hit_bound = True
                    raise SearchTimeout
            C.pop()
            P &= ~(1 << v)


def max_clique(Gv: GraphView, seed: int = 0, time_limit: float | None = None,
               upper_bound: int | None = None, initial: Sequence[int] | None = None) -> CliqueResult:
    """Exact maximum clique (labels in the certificate).

    ``initial`` is a known clique (vertex positions) used as incumbent;
    ``upper_bound`` stops the search as soon as it is met.  ``seed`` only
    breaks ties in the branching order and never changes the value.
    """
    t0 = time.monotonic()
    n = Gv.n
    if n == 0:
        return CliqueResult(0, [], True, 0.0, 0)
    tiebreak = np.random.default_rng(seed).permutation(n) if seed else None
    order, adj = _renumber(Gv, tiebreak)
    pos = {v: i for i, v in enumerate(order)}
    init = [pos[v] for v in initial] if initial else []
    if init and not Gv.is_clique(initial):
        raise ValueError("initial vertices do not form a clique")
    solver = _Solver(adj, len(init), upper_bound, None if time_limit is None else t0 + time_limit)
    solver.best = init
    if upper_bound is not None and len(init) >= upper_bound:
        solver.hit_bound = True
        timed_out = False
    else:
        try:
            solver.expand([], (1 << n) - 1)
            timed_out = False
        except SearchTimeout:
            timed_out = not solver.hit_bound
    cert = [Gv.labels[order[i]] for i in solver.best]
    if not Gv.is_clique([order[i] for i in solver.best]):
        raise AssertionError("solver returned a non-clique")
    proof = "timeout" if timed_out else ("bound" if solver.hit_bound else "search")
    return CliqueResult(len(cert), sorted(cert), not timed_out, time.monotonic() - t0, solver.nodes, proof)


# --- intersecting sets ---------------------------------------------------------------

def compatibility_graph(A: Action, vertices: np.ndarray) -> GraphView:
    """Graph on group elements ``vertices``; g ~ h iff g h^-1 fixes a domain item."""
    G = A.group
    vertices = np.asarray(vertices, dtype=np.int64)
    if len(vertices) > BITSET_LIMIT:
        raise GraphTooLargeError(f"{len(vertices)} vertices exceed the bitset cap of {BITSET_LIMIT}")
    flags = A.derangements.flags
    inv = G.inverse_index[vertices]
    rows = []
    for a, g in enumerate(vertices):
        ok = ~flags[G.left_products(int(g), inv)]
        ok[a] = False
        rows.append(_bits(ok))
    return GraphView([int(v) for v in vertices], rows)


def _branch_vertices(A: Action, rep: int, allowed: np.ndarray) -> np.ndarray:
    """Allowed elements compatible with both the identity and ``rep``."""
    G = A.group
    flags = A.derangements.flags
    cand = allowed[allowed != rep]
    ok = ~flags[G.left_products(rep, G.inverse_index[cand])]
    return cand[ok]


def _run_branch(args):
    A, rep, cand, lower, upper, time_limit = args
    return _branch_search(compatibility_graph(A, cand), lower, upper, time_limit)


def max_intersecting_set(A: Action, time_limit: float | None = 300.0, upper_bound: int | None = None,
                         initial: Sequence[int] | None = None, reduction: str = "classes",
                         threads: int = 1) -> CliqueResult:
    """Maximum intersecting set of the (transitive) action, with certificate.

    reduction: "none" (whole group), "identity" (identity neighbourhood) or
    "classes" (identity plus one class representative per branch).
    """
    if not A.transitive:
        from .action import IntransitiveError
        raise IntransitiveError(f"{A.describe()} is not transitive; restrict to an orbit")
    t0 = time.monotonic()
    deadline = None if time_limit is None else t0 + time_limit
    G = A.group
    flags = A.derangements.flags
    compat = np.flatnonzero(~flags)  # includes the identity
    incumbent = sorted(int(i) for i in initial) if initial else [0]
    if initial and not is_intersecting_set(incumbent, A):
        raise ValueError("initial set is not intersecting")
    if initial and 0 not in incumbent:
        # translate so the identity is a member: S h^-1
        h_inv = int(G.inverse_index[incumbent[0]])
        incumbent = sorted(int(x) for x in G.right_products(np.array(incumbent), h_inv))

    def finish(best, optimal, proof, nodes, detail):
        if not is_intersecting_set(best, A):
            raise AssertionError("certificate failed independent re-validation")
        return CliqueResult(len(best), sorted(best), optimal, time.monotonic() - t0, nodes, proof,
                            {"reduction": reduction, **detail})

    if upper_bound is not None and len(incumbent) >= upper_bound:
        return finish(incumbent, True, "bound", 0, {})
    if reduction == "none":
        Gv = compatibility_graph(A, np.arange(G.order))
        pos = {v: i for i, v in enumerate(Gv.labels)}
        res = max_clique(Gv, time_limit=time_limit, upper_bound=upper_bound,
                         initial=[pos[v] for v in incumbent])
        return finish(res.certificate, res.optimal, res.proof, res.nodes, {"vertices": Gv.n})
    if reduction == "identity":
        nbhd = compat[compat != 0]
        Gv = compatibility_graph(A, nbhd)
        pos = {v: i for i, v in enumerate(Gv.labels)}
        res = max_clique(Gv, time_limit=time_limit,
                         upper_bound=None if upper_bound is None else upper_bound - 1,
                         initial=[pos[v] for v in incumbent if v != 0])
        best = [0] + res.certificate if len(res.certificate) + 1 >= len(incumbent) else incumbent
        return finish(best, res.optimal, res.proof, res.nodes, {"vertices": Gv.n})
    if reduction != "classes":
        raise ValueError(f"unknown reduction {reduction!r}")

    # class-representative branching: branch c holds the identity, rep(c), and
    # elements from classes after c (in the order below) only
    P = G.classes
    fix_classes = A.derangements.fixing_classes()
    fix_classes.sort(key=lambda c: (-P.sizes[c], c))
    rank = {c: i for i, c in enumerate(fix_classes)}
    nb = compat[compat != 0]
    nb_rank = np.array([rank[int(P.class_of[v])] for v in nb], dtype=np.int64)
    best = list(incumbent)
    nodes = 0
    optimal = True
    hit_bound = False
    branches = []
    for c in fix_classes:
        rep = int(P.representatives[c])
        allowed = nb[nb_rank >= rank[c]]
        branches.append((c, rep, _branch_vertices(A, rep, allowed)))
    sizes = {c: len(v) for c, _, v in branches}
    if threads > 1 and len(branches) > 1 and sum(sizes.values()) >= PARALLEL_MIN_VERTICES:
        remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
        # every worker starts from the same incumbent, so the value cannot
        # depend on scheduling
        jobs = [(A, rep, cand, len(best) - 2, upper_bound, remaining) for _, rep, cand in branches]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_branch, jobs))
        for (_, rep, _), res in zip(branches, results):
            nodes += res.nodes
            optimal &= res.optimal
            if res.certificate and res.size + 2 > len(best):
                best = [0, rep] + res.certificate
        hit_bound = upper_bound is not None and len(best) >= upper_bound
    else:
        for c, rep, cand in branches:
            if 2 + len(cand) <= len(best):
                continue
            remaining = None if deadline is None else deadline - time.monotonic()
            if remaining is not None and remaining <= 0:
                optimal = False
                break
            Gv = compatibility_graph(A, cand)
            res = _branch_search(Gv, len(best) - 2, upper_bound, remaining)
            nodes += res.nodes
            if res.proof == "timeout":
                optimal = False
            if res.size + 2 > len(best) and res.certificate:
                best = [0, rep] + res.certificate
            if upper_bound is not None and len(best) >= upper_bound:
                hit_bound = True
                break
    proof = "bound" if hit_bound else ("search" if optimal else "timeout")
    return finish(best, optimal or hit_bound, proof, nodes,
                  {"branches": len(branches), "branch_sizes": [sizes[c] for c in fix_classes]})


def _renumber(Gv: GraphView, tiebreak=None) -> tuple[list[int], list[int]]:
    """Relabel vertices so bit i is the i-th vertex of the degeneracy order."""
    order = degeneracy_order(Gv.adj, tiebreak)
    pos = {v: i for i, v in enumerate(order)}
    adj = [0] * Gv.n
    for v in range(Gv.n):
        row = 0
        for u in _members(Gv.adj[v]):
            row |= 1 << pos[u]
        adj[pos[v]] = row
    return order, adj


def _branch_search(Gv: GraphView, lower: int, upper_bound: int | None, time_limit: float | None) -> CliqueResult:
    """Clique of size > lower in one branch graph (empty certificate if none)."""
    t0 = time.monotonic()
    n = Gv.n
    order, adj = _renumber(Gv)
    solver = _Solver(adj, max(lower, 0), None if upper_bound is None else upper_bound - 2,
                     None if time_limit is None else t0 + time_limit)
    timed_out = False
    if n:
        try:
            solver.expand([], (1 << n) - 1)
        except SearchTimeout:
            timed_out = not solver.hit_bound
    cert = [Gv.labels[order[i]] for i in solver.best]
    return CliqueResult(len(cert), cert, not timed_out, time.monotonic() - t0, solver.nodes,
                        "timeout" if timed_out else "search")


def default_threads() -> int:
    env = os.environ.get("KNESER_DENSITY_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)
