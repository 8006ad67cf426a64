"""PGL(2,q), PSL(2,q) and friends as permutation groups on the projective line.

Points are homogeneous column vectors ``(u1, u2)``; the canonical list is
``(1, y)`` for ``y`` in the field (by integer code) followed by ``(0, 1)``.
A matrix ``[[a, b], [c, d]]`` sends ``(u1, u2)`` to ``(a u1 + b u2, c u1 + d u2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .gf import FieldElement, FieldSpec, ff_is_square, field_of_order, prime_power
from .perm import Group, Perm, group_closure


class NotApplicableError(ValueError):
    """A construction was requested outside its congruence conditions."""


class ProjLine:
    """The q+1 points of PG(1,q) with integer field arithmetic tables."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        q = self.q = spec.q
        els = spec.elements()
        self.add = np.array([[int(a + b) for b in els] for a in els], dtype=np.int64)
        self.mul = np.array([[int(a * b) for b in els] for a in els], dtype=np.int64)
        self.neg = np.array([int(-a) for a in els], dtype=np.int64)
        self.inv = np.array([0] + [int(a.inverse()) for a in els[1:]], dtype=np.int64)
        self.points: list[tuple[int, int]] = [(1, y) for y in range(q)] + [(0, 1)]

    def __len__(self):
        return self.q + 1

    def sub(self, a: int, b: int) -> int:
        return int(self.add[a, self.neg[b]])

    def normalize(self, u1: int, u2: int) -> int:
        """Index of the point spanned by a nonzero vector."""
        if u1:
            return int(self.mul[u2, self.inv[u1]])
        if not u2:
            raise ValueError("zero vector is not a projective point")
        return self.q

    def image(self, m: tuple[int, int, int, int], idx: int) -> int:
        a, b, c, d = m
        u1, u2 = self.points[idx]
        v1 = int(self.add[self.mul[a, u1], self.mul[b, u2]])
        v2 = int(self.add[self.mul[c, u1], self.mul[d, u2]])
        return self.normalize(v1, v2)

    def det(self, m: tuple[int, int, int, int]) -> int:
        a, b, c, d = m
        return self.sub(int(self.mul[a, d]), int(self.mul[b, c]))

    def matrix_perm(self, m, frobenius_power: int = 0) -> Perm:
        """Permutation of ``x -> M x^(p^j)`` (componentwise Frobenius first)."""
        m = tuple(int(e) for e in m)
        if not self.det(m):
            raise ValueError("singular matrix")
        frob = self.frobenius_table(frobenius_power)
        images = []
        for u1, u2 in self.points:
            w = self.normalize(int(frob[u1]), int(frob[u2]))
            images.append(self.image(m, w))
        return Perm(images)

    def frobenius_table(self, j: int) -> np.ndarray:
        p = self.spec.p
        return np.array([int(self.spec.from_int(a) ** (p**j)) for a in range(self.q)], dtype=np.int64)

    @cached_property
    def primitive(self) -> int:
        return int(self.spec.primitive_element)

    def element(self, code: int) -> FieldElement:
        return self.spec.from_int(code)


@lru_cache(maxsize=None)
def proj_line(q: int) -> ProjLine:
    return ProjLine(field_of_order(q))


def _check_q(q: int) -> tuple[int, int]:
    p, k = prime_power(q)
    if q < 4:
        raise ValueError(f"q={q} too small; need q >= 4")
    return p, k


def _translation_gens(L: ProjLine) -> list[tuple[int, int, int, int]]:
    p, k = L.spec.p, L.spec.k
    return [(1, 0, p**i, 1) for i in range(k)]


@lru_cache(maxsize=None)
def build_pgl2(q: int) -> Group:
    """PGL(2,q) on the q+1 projective points, order (q-1)q(q+1)."""
    _check_q(q)
    L = proj_line(q)
    g = L.primitive
    mats = _translation_gens(L) + [(1, 0, 0, g), (0, 1, 1, 0)]
    G = group_closure([L.matrix_perm(m) for m in mats], name=f"PGL(2,{q})",
                      meta={"family": "pgl2", "q": q})
    assert G.order == (q - 1) * q * (q + 1), G.order
    return G


@lru_cache(maxsize=None)
def build_psl2(q: int) -> Group:
    """PSL(2,q): images of the determinant-one matrices."""
    _check_q(q)
    L = proj_line(q)
    g = L.primitive
    mats = _translation_gens(L) + [(int(L.inv[g]), 0, 0, g), (0, int(L.neg[1]), 1, 0)]
    G = group_closure([L.matrix_perm(m) for m in mats], name=f"PSL(2,{q})",
                      meta={"family": "psl2", "q": q})
    assert G.order == (q - 1) * q * (q + 1) // math.gcd(2, q - 1), G.order
    return G


@lru_cache(maxsize=None)
def build_psl_sigma(q: int) -> Group:
    """PSL(2,q) extended by x -> diag(g,1) x^(p^(k/2)), g primitive (q = p^k, k even)."""
    p, k = _check_q(q)
    if p == 2 or k % 2:
        raise NotApplicableError(f"q={q}: the twisted extension needs p odd and k even")
    L = proj_line(q)
    sigma = L.matrix_perm((L.primitive, 0, 0, 1), frobenius_power=k // 2)
    psl = build_psl2(q)
    G = group_closure(psl.generators + [sigma], name=f"PSL(2,{q})<sigma>",
                      meta={"family": "psl_sigma", "q": q})
    assert G.order == 2 * psl.order, G.order
    return G


@lru_cache(maxsize=None)
def build_pgammal2(q: int) -> Group:
    """PΓL(2,q): PGL(2,q) with the Frobenius automorphism.  Used for catalogs."""
    _check_q(q)
    L = proj_line(q)
    frob = L.matrix_perm((1, 0, 0, 1), frobenius_power=1)
    G = group_closure(build_pgl2(q).generators + [frob], name=f"PGammaL(2,{q})",
                      meta={"family": "pgammal2", "q": q})
    assert G.order == (q - 1) * q * (q + 1) * L.spec.k, G.order
    return G


# --- named subgroups ------------------------------------------------------------

NAMED_KINDS = ("unipotent", "unipotent_c3", "unipotent_pm", "a4", "a5")


def _cube_root_of_unity(L: ProjLine) -> int:
    for x in range(2, L.q):
        if x != 1 and int(L.element(x) ** 3) == 1:
            return x
    raise NotApplicableError(f"GF({L.q}) has no primitive cube root of unity")


def _matrices_group(L: ProjLine, mats, name: str, meta: dict) -> Group:
    return group_closure([L.matrix_perm(m) for m in mats], name=name, meta=meta)


def build_named_subgroup(kind: str, q: int) -> Group:
    """Intersecting subgroups used as lower-bound constructions.

    unipotent     (1 a; 0 1)                            order q
    unipotent_c3  q = 4^l: (1 a; 0 1), (x a; 0 x^2), (x^2 a; 0 x), x^3 = 1   order 3q
    unipotent_pm  q = 9^l: (1 a; 0 1), (1 a; 0 -1)      order 2q
    a4            q odd: Alt(4) inside PSL(2,q)
    a5            q^2 = 1 mod 5: Alt(5) inside PSL(2,q)
    """
    p, k = _check_q(q)
    L = proj_line(q)
    meta = {"family": kind, "q": q}
    if kind == "unipotent":
        mats = [(1, a, 0, 1) for a in range(q)]
        H = _matrices_group(L, mats, f"U({q})", meta)
        expected = q
    elif kind == "unipotent_c3":
        if p != 2 or k % 2:
            raise NotApplicableError("unipotent_c3 needs q = 2^(2l)")
        x = _cube_root_of_unity(L)
        x2 = int(L.mul[x, x])
        mats = [(1, a, 0, 1) for a in range(q)] + [(x, a, 0, x2) for a in range(q)]
        mats += [(x2, a, 0, x) for a in range(q)]
        H = _matrices_group(L, mats, f"U({q}):C3", meta)
        expected = 3 * q
    elif kind == "unipotent_pm":
        if p != 3 or k % 2:
            raise NotApplicableError("unipotent_pm needs q = 3^(2l)")
        minus = int(L.neg[1])
        mats = [(1, a, 0, 1) for a in range(q)] + [(1, a, 0, minus) for a in range(q)]
        H = _matrices_group(L, mats, f"U({q}):C2", meta)
        expected = 2 * q
    elif kind == "a4":
        if p == 2:
            raise NotApplicableError("a4 construction needs q odd")
        H = _presentation_search(build_psl2(q), 3, f"Alt(4)<PSL(2,{q})", meta)
        expected = 12
    elif kind == "a5":
        if (q * q) % 5 != 1:
            raise NotApplicableError("a5 needs q^2 = 1 mod 5")
        H = _presentation_search(build_psl2(q), 5, f"Alt(5)<PSL(2,{q})", meta)
        expected = 60
    else:
        raise ValueError(f"unknown subgroup kind {kind!r}; expected one of {NAMED_KINDS}")
    if H.order != expected:
        raise AssertionError(f"{kind} for q={q} has order {H.order}, expected {expected}")
    return H


def _presentation_search(G: Group, m: int, name: str, meta: dict) -> Group:
    """First (r, t) with r^3 = t^2 = (rt)^m = 1 over order-3 class reps r and involutions t."""
    P = G.classes
    orders = G.element_orders
    involutions = np.flatnonzero(orders == 2)
    target = {3: 12, 5: 60}[m]
    for rep in P.representatives:
        if orders[rep] != 3:
            continue
        prods = G.left_products(rep, involutions)
        for t, rt in zip(involutions, prods):
            if orders[rt] == m:
                H = group_closure([G.element(rep), G.element(int(t))], name=name, meta=meta)
                if H.order == target:
                    return H
    raise AssertionError(f"no ({3},{2},{m}) generating pair found in {G.name}")


# --- triple sign ----------------------------------------------------------------

def _as_pair(L: ProjLine, u) -> tuple[int, int]:
    if isinstance(u, (int, np.integer)):
        return L.points[int(u)]
    a, b = u
    return int(a), int(b)


def triple_value(L: ProjLine, u, v, w) -> int:
    """Integer code of D(u,v) D(v,w) D(w,u)."""
    u, v, w = (_as_pair(L, t) for t in (u, v, w))

    def d(x, y):
        return L.sub(int(L.mul[x[0], y[1]]), int(L.mul[x[1], y[0]]))

    return int(L.mul[L.mul[d(u, v), d(v, w)], d(w, u)])


def triple_sign(spec_or_q, u, v, w) -> str:
    """Classify D(u,v,w) as 'square' or 'nonsquare' (q odd, distinct points).

    Points are projective-line indices or homogeneous pairs of field codes.
    """
    q = spec_or_q.q if isinstance(spec_or_q, FieldSpec) else int(spec_or_q)
    L = proj_line(q)
    if L.spec.p == 2:
        raise ValueError("triple sign is only defined for odd q")
    val = triple_value(L, u, v, w)
    if val == 0:
        raise ValueError("points must be pairwise distinct")
    return "square" if ff_is_square(L.spec, L.element(val)) else "nonsquare"


@dataclass(frozen=True)
class ProjMatrix:
    """A 2x2 matrix over GF(q) acting on PG(1,q)."""

    a: FieldElement
    b: FieldElement
    c: FieldElement
    d: FieldElement

    def __post_init__(self):
        if not self.det():
            raise ValueError("singular matrix")

    def det(self) -> FieldElement:
        return self.a * self.d - self.b * self.c

    def perm(self) -> Perm:
        L = proj_line(self.a.spec.q)
        return L.matrix_perm(tuple(int(e) for e in (self.a, self.b, self.c, self.d)))
