"""Permutations and fully enumerated permutation groups.

Composition is the left action: ``(g * h)(v) == g(h(v))``.  Points are
0-indexed.  A :class:`Group` stores every element as a row of an integer
table sorted lexicographically by image array, so element indices are
reproducible across runs; row 0 is always the identity.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

DTYPE = np.int16
DEFAULT_CAP = 10**6


class GroupOverflowError(RuntimeError):
    """Closure grew beyond the configured element cap."""


class Perm:
    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(int(v) for v in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> Perm:
        return cls(range(n))

    @classmethod
    def from_cycles(cls, text: str, n: int, one_based: bool = True) -> Perm:
        """Parse cycle notation such as ``"(1,2,3)(4,5)"``."""
        images = list(range(n))
        shift = 1 if one_based else 0
        for body in re.findall(r"\(([^()]*)\)", text):
            pts = [int(t) - shift for t in re.split(r"[,\s]+", body.strip()) if t]
            for a, b in zip(pts, pts[1:] + pts[:1]):
                if not 0 <= a < n:
                    raise ValueError(f"point {a + shift} outside degree {n}")
                images[a] = b
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, v: int) -> int:
        return self.images[v]

    def __mul__(self, other: Perm) -> Perm:
        return perm_compose(self, other)

    def inverse(self) -> Perm:
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images):
            inv[v] = i
        return Perm(inv)

    def __pow__(self, e: int) -> Perm:
        if e < 0:
            return self.inverse() ** (-e)
        result, base = Perm.identity(self.degree), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(len(self.images)):
            if start in seen:
                continue
            cyc, v = [], start
            while v not in seen:
                seen.add(v)
                cyc.append(v)
                v = self.images[v]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    @property
    def order(self) -> int:
        return math.lcm(*self.cycle_type())

    def fixed_points(self) -> list[int]:
        return [i for i, v in enumerate(self.images) if i == v]

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.images))

    def cycle_string(self, one_based: bool = True) -> str:
        shift = 1 if one_based else 0
        parts = ["(" + ",".join(str(v + shift) for v in c) + ")" for c in self.cycles() if len(c) > 1]
        return "".join(parts) or "()"

    def __eq__(self, other):
        return isinstance(other, Perm) and self.images == other.images

    def __lt__(self, other: Perm):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Perm({self.cycle_string()})"


def perm_compose(g: Perm, h: Perm) -> Perm:
    """Return g∘h, i.e. v -> g(h(v))."""
    if g.degree != h.degree:
        raise ValueError(f"degree mismatch: {g.degree} vs {h.degree}")
    gi = g.images
    return Perm(gi[v] for v in h.images)


@dataclass(eq=False)
class Group:
    """A permutation group with every element materialized.

    ``table[i]`` is the image array of element ``i``; the table is sorted
    lexicographically so ``table[0]`` is the identity.
    """

    n: int
    generators: list[Perm]
    table: np.ndarray
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.table = np.ascontiguousarray(self.table, dtype=DTYPE)
        self.table.setflags(write=False)

    def __repr__(self):
        return f"Group({self.name or '?'}, degree={self.n}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self):
        return len(self.table)

    @cached_property
    def _index(self) -> dict[bytes, int]:
        w = self.n * self.table.itemsize
        buf = self.table.tobytes()
        return {buf[i * w:(i + 1) * w]: i for i in range(self.order)}

    @cached_property
    def elements(self) -> list[Perm]:
        return [Perm(row) for row in self.table.tolist()]

    def element(self, i: int) -> Perm:
        return Perm(self.table[i].tolist())

    def index_of(self, g: Perm | Sequence[int]) -> int:
        images = g.images if isinstance(g, Perm) else g
        key = np.asarray(images, dtype=DTYPE).tobytes()
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(f"{g} is not an element of {self.name or 'the group'}") from None

    def __contains__(self, g) -> bool:
        images = g.images if isinstance(g, Perm) else g
        return np.asarray(images, dtype=DTYPE).tobytes() in self._index

    def indices_of_rows(self, rows: np.ndarray) -> np.ndarray:
        """Element indices of many image rows at once (KeyError if absent)."""
        rows = np.ascontiguousarray(rows, dtype=DTYPE)
        w = self.n * rows.itemsize
        buf = rows.tobytes()
        idx = self._index
        return np.fromiter((idx[buf[i * w:(i + 1) * w]] for i in range(len(rows))),
                           dtype=np.int64, count=len(rows))

    @cached_property
    def inverse_index(self) -> np.ndarray:
        inv = np.empty_like(self.table)
        rows = np.arange(self.order)[:, None]
        inv[rows, self.table] = np.arange(self.n, dtype=DTYPE)[None, :]
        return self.indices_of_rows(inv)

    def multiply_index(self, i: int, j: int) -> int:
        """Index of element_i ∘ element_j."""
        return self._index[self.table[i][self.table[j]].tobytes()]

    def left_products(self, i: int, js: np.ndarray) -> np.ndarray:
        """Indices of element_i ∘ element_j for every j in ``js``."""
        return self.indices_of_rows(self.table[i][self.table[js]])

    def right_products(self, js: np.ndarray, i: int) -> np.ndarray:
        """Indices of element_j ∘ element_i for every j in ``js``."""
        return self.indices_of_rows(self.table[js][:, self.table[i]])

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.ones(self.order, dtype=np.int64)
        cur = self.table.copy()
        ident = np.arange(self.n, dtype=DTYPE)
        done = np.all(cur == ident, axis=1)
        e = 1
        while not done.all():
            e += 1
            cur = cur[np.arange(self.order)[:, None], self.table]
            newly = ~done & np.all(cur == ident, axis=1)
            orders[newly] = e
            done |= newly
        return orders

    @cached_property
    def classes(self) -> ClassPartition:
        return conjugacy_classes(self)

    def subgroup(self, indices: Iterable[int], name: str = "") -> Group:
        """Wrap a closed subset of elements (given by index) as a Group."""
        idx = np.unique(np.fromiter(indices, dtype=np.int64))
        table = self.table[idx]
        try:
            gens = _greedy_generators(table)
        except GroupOverflowError:
            raise ValueError("element subset is not closed under composition") from None
        sub = Group(self.n, gens, table, name=name)
        if sub.order > 1 and not _is_closed(sub):
            raise ValueError("element subset is not closed under composition")
        return sub

    def is_subgroup_of(self, other: Group) -> bool:
        return self.n == other.n and all(row.tobytes() in other._index for row in self.table)

    def to_dict(self, annotations: dict | None = None) -> dict:
        d = {"name": self.name, "degree": self.n,
             "generators": [list(g.images) for g in self.generators]}
        if annotations:
            d["annotations"] = dict(annotations)
        return d


def _is_closed(G: Group) -> bool:
    for g in G.generators:
        prod = np.asarray(g.images, dtype=DTYPE)[G.table]
        if not all(r.tobytes() in G._index for r in prod):
            return False
    return True


def _greedy_generators(table: np.ndarray) -> list[Perm]:
    """Pick elements in table order until they generate everything in ``table``."""
    n = table.shape[1]
    target = len(table)
    gens: list[Perm] = []
    span = {np.arange(n, dtype=DTYPE).tobytes()}
    for row in table:
        if row.tobytes() in span:
            continue
        gens.append(Perm(row.tolist()))
        span = {r.tobytes() for r in _closure_rows(gens, n, cap=target)}
        if len(span) == target:
            break
    return gens


def _closure_rows(generators: Sequence[Perm], n: int, cap: int) -> list[np.ndarray]:
    gens = [np.asarray(g.images, dtype=DTYPE) for g in generators]
    ident = np.arange(n, dtype=DTYPE)
    seen = {ident.tobytes()}
    rows = [ident]
    frontier = ident[None, :]
    while len(frontier):
        fresh = []
        for g in gens:
            for row in g[frontier]:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    fresh.append(row)
                    if len(seen) > cap:
                        raise GroupOverflowError(f"closure exceeds cap of {cap} elements")
        rows.extend(fresh)
        frontier = np.array(fresh, dtype=DTYPE) if fresh else np.empty((0, n), dtype=DTYPE)
    return rows


def group_closure(generators: Sequence[Perm], cap: int = DEFAULT_CAP, name: str = "",
                  meta: dict | None = None) -> Group:
    """Breadth-first closure of ``generators`` with lexicographically sorted elements."""
    if not generators:
        raise ValueError("need at least one generator")
    n = generators[0].degree
    if any(g.degree != n for g in generators):
        raise ValueError("generators have different degrees")
    rows = np.array(_closure_rows(generators, n, cap), dtype=DTYPE)
    rows = rows[np.lexsort(rows.T[::-1])]
    return Group(n, list(generators), rows, name=name, meta=dict(meta or {}))


@dataclass(eq=False)
class ClassPartition:
    classes: list[np.ndarray]  # sorted element indices per class
    class_of: np.ndarray  # element index -> class index
    inverse_class_map: list[int]
    rational_class_of: list[int]  # class -> index of its rational class

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    @property
    def representatives(self) -> list[int]:
        return [int(c[0]) for c in self.classes]

    def __len__(self):
        return len(self.classes)

    @property
    def rational_classes(self) -> list[list[int]]:
        """Groups of classes whose elements generate the same cyclic subgroups."""
        out: dict[int, list[int]] = {}
        for c, r in enumerate(self.rational_class_of):
            out.setdefault(r, []).append(c)
        return [out[r] for r in sorted(out)]


def conjugacy_classes(G: Group) -> ClassPartition:
    """Classes as orbits of conjugation by the generators; class 0 is {identity}."""
    m = G.order
    src, dst = [], []
    for s in G.generators:
        s_arr = np.asarray(s.images, dtype=DTYPE)
        s_inv = np.asarray(s.inverse().images, dtype=DTYPE)
        conj = G.indices_of_rows(s_arr[G.table[:, s_inv]])
        src.append(np.arange(m))
        dst.append(conj)
    src, dst = np.concatenate(src), np.concatenate(dst)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(m, m))
    _, labels = connected_components(graph, directed=True, connection="weak")
    # relabel by smallest member so the identity (index 0) is class 0
    first = np.full(labels.max() + 1, m, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(m))
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(len(order))
    class_of = relabel[labels]
    classes = [np.flatnonzero(class_of == c) for c in range(len(order))]

    inv = G.inverse_index
    inverse_class_map = [int(class_of[inv[c[0]]]) for c in classes]

    # rational classes: class of g^j for j coprime to ord(g)
    orders = G.element_orders
    rational = list(range(len(classes)))

    def find(a):
        while rational[a] != a:
            rational[a] = rational[rational[a]]
            a = rational[a]
        return a

    for c, members in enumerate(classes):
        rep = G.element(int(members[0]))
        o = int(orders[members[0]])
        for j in range(2, o):
            if math.gcd(j, o) == 1:
                other = int(class_of[G.index_of(rep**j)])
                a, b = find(c), find(other)
                if a != b:
                    rational[max(a, b)] = min(a, b)
    roots = [find(c) for c in range(len(classes))]
    renum = {r: i for i, r in enumerate(sorted(set(roots)))}
    return ClassPartition(classes, class_of, inverse_class_map, [renum[r] for r in roots])


def orbits(G: Group, domain: Sequence[Hashable], act: Callable[[Perm, Hashable], Hashable] | None = None
           ) -> list[list[Hashable]]:
    """Partition ``domain`` into orbits of G, each sorted, ordered by least member.

    ``act`` defaults to the natural action on points and on sorted tuples of
    points (k-subsets).
    """
    act = act or act_on_points_or_sets
    pos = {x: i for i, x in enumerate(domain)}
    parent = list(range(len(domain)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for g in G.generators:
        for i, x in enumerate(domain):
            j = pos[act(g, x)]
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list] = {}
    for i, x in enumerate(domain):
        groups.setdefault(find(i), []).append(x)
    out = [sorted(v) for v in groups.values()]
    out.sort(key=lambda orb: orb[0])
    return out


def act_on_points_or_sets(g: Perm, x):
    if isinstance(x, int):
        return g.images[x]
    return tuple(sorted(g.images[v] for v in x))


def stabilizer(G: Group, x, act: Callable[[Perm, Hashable], Hashable] | None = None) -> Group:
    """Subgroup of G fixing ``x`` (a point or a sorted tuple of points)."""
    if act is None:
        pts = np.atleast_1d(np.asarray(x, dtype=DTYPE))
        img = np.sort(G.table[:, pts], axis=1)
        keep = np.flatnonzero(np.all(img == np.sort(pts), axis=1))
    else:
        keep = [i for i, g in enumerate(G.elements) if act(g, x) == x]
    return G.subgroup(keep, name=f"Stab({x})")


def symmetric_group(n: int) -> Group:
    gens = [Perm.from_cycles("(" + ",".join(map(str, range(1, n + 1))) + ")", n),
            Perm.from_cycles("(1,2)", n)]
    return group_closure(gens, name=f"Sym({n})")


def alternating_group(n: int) -> Group:
    gens = [Perm.from_cycles(f"(1,2,{i})", n) for i in range(3, n + 1)]
    return group_closure(gens, name=f"Alt({n})")


def cyclic_group(n: int) -> Group:
    return group_closure([Perm([(i + 1) % n for i in range(n)])], name=f"C{n}")


# --- group files ---------------------------------------------------------------------
#
# {"name": str, "degree": int, "generators": [[images...] | "(1,2,3)(4,5)", ...],
#  "annotations": {...}}
# Image lists are 0-indexed; cycle strings are 1-indexed.


@dataclass
class GroupFile:
    name: str
    degree: int
    generators: list[Perm]
    annotations: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> GroupFile:
        try:
            degree = int(d["degree"])
            raw = d["generators"]
        except KeyError as exc:
            raise ValueError(f"group file is missing {exc.args[0]!r}") from None
        gens = []
        for g in raw:
            p = Perm.from_cycles(g, degree) if isinstance(g, str) else Perm(g)
            if p.degree != degree:
                raise ValueError(f"generator {g!r} does not have degree {degree}")
            gens.append(p)
        if not gens:
            raise ValueError("group file lists no generators")
        return cls(str(d.get("name", "")), degree, gens, dict(d.get("annotations", {})))

    def to_dict(self) -> dict:
        d = {"name": self.name, "degree": self.degree,
             "generators": [list(g.images) for g in self.generators]}
        if self.annotations:
            d["annotations"] = dict(self.annotations)
        return d

    def build(self, cap: int = DEFAULT_CAP) -> Group:
        meta = {k: self.annotations[k] for k in ("family", "q") if k in self.annotations}
        return group_closure(self.generators, cap=cap, name=self.name, meta=meta)


def load_group(path) -> GroupFile:
    return GroupFile.from_dict(json.loads(Path(path).read_text()))


def save_group(G: Group | GroupFile, path, annotations: dict | None = None) -> None:
    d = G.to_dict(annotations) if isinstance(G, Group) else G.to_dict()
    Path(path).write_text(json.dumps(d, indent=1) + "\n")
