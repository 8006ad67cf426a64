"""Group actions on points, k-subsets, or a single orbit of k-subsets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .perm import DTYPE, Group, Perm
from .perm import stabilizer as _stabilizer

# above this many (element, domain item) pairs, derangements are found per class
FULL_SCAN_LIMIT = 10**7


class IntransitiveError(ValueError):
    """A density was requested for an action with more than one orbit."""


@dataclass(eq=False)
class Action:
    """G acting on ``domain``, an array of sorted k-subsets (one row each).

    ``kind`` is ``"points"`` (k = 1), ``"ksets"`` (all k-subsets) or
    ``"orbit"`` (one orbit of k-subsets, ``which`` gives its position among
    the orbits ordered by least member).
    """

    group: Group
    domain: np.ndarray
    kind: str = "ksets"
    which: int | None = None

    def __post_init__(self):
        self.domain = np.ascontiguousarray(self.domain, dtype=DTYPE)
        self._keys = _encode(self.domain, self.group.n)
        order = np.argsort(self._keys)
        if not np.all(order == np.arange(len(order))):
            raise ValueError("domain rows must be in lexicographic order")

    @property
    def k(self) -> int:
        return self.domain.shape[1]

    @property
    def N(self) -> int:
        return len(self.domain)

    def __repr__(self):
        return f"Action({self.describe()})"

    def describe(self) -> str:
        if self.kind == "points":
            what = "points"
        elif self.kind == "ksets":
            what = f"{self.k}-sets"
        else:
            what = f"{self.k}-sets orbit {self.which}"
        return f"{self.group.name} on {what} (N={self.N})"

    def rank(self, subsets: np.ndarray) -> np.ndarray:
        """Domain positions of sorted k-subset rows (-1 when outside the domain)."""
        keys = _encode(np.atleast_2d(subsets), self.group.n)
        pos = np.searchsorted(self._keys, keys)
        pos = np.minimum(pos, self.N - 1)
        return np.where(self._keys[pos] == keys, pos, -1)

    def image_of(self, g: np.ndarray | Perm) -> np.ndarray:
        """The domain permutation induced by one group element."""
        g = np.asarray(g.images if isinstance(g, Perm) else g, dtype=DTYPE)
        ranks = self.rank(np.sort(g[self.domain], axis=1))
        if np.any(ranks < 0):
            raise ValueError("element does not preserve the domain")
        return ranks

    @cached_property
    def generator_images(self) -> np.ndarray:
        return np.array([self.image_of(g) for g in self.group.generators], dtype=np.int64)

    @cached_property
    def orbit_labels(self) -> np.ndarray:
        N = self.N
        src = np.tile(np.arange(N), len(self.generator_images))
        dst = self.generator_images.ravel()
        graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(N, N))
        _, labels = connected_components(graph, directed=True, connection="weak")
        return labels

    @property
    def transitive(self) -> bool:
        return bool(np.all(self.orbit_labels == self.orbit_labels[0]))

    def orbit_positions(self) -> list[np.ndarray]:
        labels = self.orbit_labels
        out = [np.flatnonzero(labels == lab) for lab in np.unique(labels)]
        out.sort(key=lambda pos: pos[0])
        return out

    def fixes_some(self, rows: np.ndarray) -> np.ndarray:
        """For each element row, whether it fixes at least one domain item."""
        rows = np.asarray(rows, dtype=DTYPE)
        out = np.zeros(len(rows), dtype=bool)
        chunk = max(1, 2_000_000 // max(1, self.N * self.k))
        for s in range(0, len(rows), chunk):
            block = rows[s:s + chunk]
            img = np.sort(block[:, self.domain], axis=2)
            out[s:s + chunk] = np.any(np.all(img == self.domain[None], axis=2), axis=1)
        return out

    @cached_property
    def derangements(self) -> DerangementData:
        return derangement_set(self)

    def stabilizer_order(self, item: int = 0) -> int:
        pts = self.domain[item]
        img = np.sort(self.group.table[:, pts], axis=1)
        return int(np.count_nonzero(np.all(img == pts, axis=1)))


def _encode(rows: np.ndarray, n: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    key = np.zeros(len(rows), dtype=np.int64)
    for j in range(rows.shape[1]):
        key = key * n + rows[:, j]
    return key


def point_action(G: Group) -> Action:
    return Action(G, np.arange(G.n)[:, None], kind="points")


def induce_ksets(G: Group, k: int) -> Action:
    """G on all C(n,k) k-subsets in lexicographic order."""
    if not 1 <= k < G.n:
        raise ValueError(f"k={k} out of range for degree {G.n}")
    domain = np.array(list(itertools.combinations(range(G.n), k)), dtype=DTYPE)
    assert len(domain) == comb(G.n, k)
    return Action(G, domain, kind="ksets" if k > 1 else "points")


def restrict_to_orbit(A: Action, which: int) -> Action:
    orbs = A.orbit_positions()
    if not 0 <= which < len(orbs):
        raise ValueError(f"orbit {which} does not exist; the action has {len(orbs)} orbits")
    return Action(A.group, A.domain[orbs[which]], kind="orbit", which=which)


def point_stabilizer(A: Action, item) -> Group:
    """Stabilizer of a domain item (its position, or the subset itself)."""
    if isinstance(item, (int, np.integer)):
        if not 0 <= item < A.N:
            raise ValueError(f"domain position {item} out of range")
        pts = tuple(int(v) for v in A.domain[item])
    else:
        pts = tuple(sorted(int(v) for v in np.atleast_1d(item)))
        if A.rank(np.array([pts]))[0] < 0:
            raise ValueError(f"{pts} is not in the domain")
    return _stabilizer(A.group, pts if len(pts) > 1 else pts[0])


@dataclass(eq=False)
class DerangementData:
    flags: np.ndarray  # per element: True if fixed-point-free on the domain
    class_flags: list[bool]
    method: str  # "full" or "class"

    @property
    def count(self) -> int:
        return int(self.flags.sum())

    def derangement_classes(self) -> list[int]:
        return [c for c, f in enumerate(self.class_flags) if f]

    def fixing_classes(self) -> list[int]:
        """Non-identity classes whose elements fix some domain item."""
        return [c for c, f in enumerate(self.class_flags) if not f and c != 0]


def derangement_set(A: Action) -> DerangementData:
    """Flag every element that fixes no domain item."""
    G = A.group
    P = G.classes
    if G.order * A.N <= FULL_SCAN_LIMIT:
        flags = ~A.fixes_some(G.table)
        class_flags = []
        for members in P.classes:
            vals = flags[members]
            if vals.min() != vals.max():
                raise AssertionError("derangement flags not constant on a conjugacy class")
            class_flags.append(bool(vals[0]))
        method = "full"
    else:
        reps = np.array(P.representatives)
        class_flags = [bool(f) for f in ~A.fixes_some(G.table[reps])]
        flags = np.array(class_flags, dtype=bool)[P.class_of]
        method = "class"
    if flags[0]:
        raise AssertionError("identity flagged as a derangement")
    return DerangementData(flags, class_flags, method)


def split_3set_orbits(q: int) -> tuple[Action, Action]:
    """PSL(2,q), q = 1 mod 4, on its two 3-set orbits: (square D, nonsquare D)."""
    from .pgl import build_psl2, proj_line, triple_sign

    if q % 2 == 0 or q % 4 != 1:
        raise ValueError(f"q={q}: the 3-set orbit split needs q = 1 mod 4")
    G = build_psl2(q)
    full = induce_ksets(G, 3)
    L = proj_line(q)
    signs = np.array([triple_sign(L.spec, *map(int, row)) == "square" for row in full.domain])
    parts = []
    for want in (True, False):
        dom = full.domain[signs == want]
        act = Action(G, dom, kind="orbit", which=0 if want else 1)
        if not act.transitive:
            raise AssertionError("triple sign class is not a single PSL orbit")
        parts.append(act)
    return parts[0], parts[1]


def _indices(A: Action, S: Iterable) -> np.ndarray:
    G = A.group
    out = []
    for s in S:
        if isinstance(s, (int, np.integer)):
            if not 0 <= s < G.order:
                raise ValueError(f"element index {s} out of range")
            out.append(int(s))
        else:
            out.append(G.index_of(s))
    return np.array(out, dtype=np.int64)


def is_intersecting_set(S: Sequence, A: Action) -> bool:
    """True iff every pair g, h in S has g h^-1 fixing some domain item.

    Elements are Perms, image sequences, or element indices of ``A.group``.
    """
    idx = _indices(A, S)
    G = A.group
    flags = A.derangements.flags
    inv = G.inverse_index
    for a, i in enumerate(idx):
        rest = idx[a + 1:]
        if len(rest) == 0:
            break
        prods = G.left_products(int(i), inv[rest])
        if flags[prods].any():
            return False
    return True


def is_intersecting_subgroup(H: Group, A: Action) -> bool:
    """True iff the subgroup H of A.group contains no derangement."""
    if not H.is_subgroup_of(A.group):
        raise ValueError(f"{H.name} is not a subgroup of {A.group.name}")
    idx = A.group.indices_of_rows(H.table)
    return not A.derangements.flags[idx].any()


def subgroup_indices(H: Group, G: Group) -> np.ndarray:
    return G.indices_of_rows(H.table)
