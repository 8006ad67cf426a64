"""Conjugacy-class scheme: structure constants and eigenvalues of class unions.

For classes C_0..C_d the class sums satisfy K_i K_j = sum_k a_ijk K_k.  The
matrices (B_i)_{jk} = a_ijk commute, and each common eigenvector normalized to
w_0 = 1 is the row (ω_0, ..., ω_d) of central character values
ω_i = |C_i| χ(c_i) / χ(1); ω_i is the eigenvalue of the class matrix A_i on
the χ-isotypic block, which has dimension χ(1)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .perm import ClassPartition, Group

SNAP_TOL = 1e-9
IMAG_TOL = 1e-9
EIG_SEED = 20240531


class SpectrumError(RuntimeError):
    """Numerical eigen-data failed an integrality or reality check."""


@dataclass(eq=False)
class CollapsedAlgebra:
    a: np.ndarray  # a[i, j, k], int64
    sizes: list[int]
    order: int

    @property
    def d(self) -> int:
        return len(self.sizes) - 1

    def matrix(self, i: int) -> np.ndarray:
        return self.a[i].astype(float)


def class_constants(G: Group, P: ClassPartition | None = None) -> CollapsedAlgebra:
    """a_ijk = #{x in C_i : x^-1 c_k in C_j} for a fixed c_k in C_k."""
    P = P or G.classes
    r = len(P)
    cls = P.class_of
    inv_rows = G.table[G.inverse_index]
    a = np.zeros((r, r, r), dtype=np.int64)
    for kk, rep in enumerate(P.representatives):
        # row x: x^-1 ∘ c_k
        prods = G.indices_of_rows(inv_rows[:, G.table[rep]])
        np.add.at(a[:, :, kk], (cls, cls[prods]), 1)
    return CollapsedAlgebra(a, P.sizes, G.order)


@dataclass(eq=False)
class EigenTable:
    omega: np.ndarray  # rows x classes, complex
    multiplicities: list[int]
    sizes: list[int]
    order: int
    inverse_class_map: list[int] | None = None
    rational_class_of: list[int] | None = None

    @property
    def nrows(self) -> int:
        return len(self.multiplicities)

    def to_dict(self) -> dict:
        def enc(z):
            z = complex(z)
            return [z.real, z.imag]

        return {"order": self.order, "class_sizes": list(self.sizes),
                "multiplicities": list(self.multiplicities),
                "rows": [[enc(z) for z in row] for row in self.omega]}


def snap(x: float, max_den: int, tol: float = SNAP_TOL) -> Fraction | None:
    r = Fraction(x).limit_denominator(max_den)
    return r if abs(float(r) - x) <= tol else None


def eigenrows(CA: CollapsedAlgebra, sizes: list[int] | None = None, seed: int = EIG_SEED,
              P: ClassPartition | None = None) -> EigenTable:
    """Simultaneously diagonalize the collapsed matrices."""
    sizes = list(sizes or CA.sizes)
    r = len(sizes)
    B = CA.a.astype(float)
    for i in range(r):
        for j in range(i + 1, r):
            if not np.array_equal(CA.a[i] @ CA.a[j], CA.a[j] @ CA.a[i]):
                raise SpectrumError("collapsed class matrices do not commute")
    rng = np.random.default_rng(seed)
    for _attempt in range(8):
        coeffs = rng.standard_normal(r)
        # scale so every class contributes comparably
        coeffs /= np.maximum(np.array(sizes, dtype=float), 1.0)
        R = np.tensordot(coeffs, B, axes=1)
        vals, vecs = np.linalg.eig(R)
        gaps = np.abs(vals[:, None] - vals[None, :]) + np.eye(r) * 1e300
        if gaps.min() > 1e-7 * max(1.0, np.abs(vals).max()):
            break
    else:
        raise SpectrumError("could not separate the common eigenspaces")
    rows = []
    for t in range(r):
        v = vecs[:, t] / vecs[0, t]
        # polish with inverse iteration on the same combination
        shift = vals[t] + 1e-12 * max(1.0, abs(vals[t]))
        try:
            for _ in range(2):
                y = np.linalg.solve(R - shift * np.eye(r), v)
                v = y / y[0]
        except np.linalg.LinAlgError:
            pass
        rows.append(v)
    omega = np.array(rows, dtype=complex)
    # residual check: every B_i must act by scalar ω_i on each row
    for t in range(r):
        w = omega[t]
        res = np.tensordot(B, w, axes=([2], [0])) - w[:, None] * w[None, :]
        scale = max(1.0, np.abs(w).max()) ** 2
        if np.abs(res).max() > 1e-6 * scale:
            raise SpectrumError(f"eigenrow {t} is not a common eigenvector (residual {np.abs(res).max():.3g})")
    sz = np.array(sizes, dtype=float)
    norms = (np.abs(omega) ** 2 / sz[None, :]).sum(axis=1)
    mult_f = CA.order / norms
    mult = np.rint(mult_f).astype(np.int64)
    if np.abs(mult_f - mult).max() > 1e-6 or mult.sum() != CA.order:
        raise SpectrumError(f"multiplicities not integral: {mult_f}")
    # snap to nearby rationals (central character values are algebraic integers)
    max_den = max(1, math.isqrt(CA.order))
    clean = np.empty_like(omega)
    for t in range(r):
        for i in range(r):
            z = omega[t, i]
            re = snap(z.real, max_den)
            im = snap(z.imag, max_den)
            clean[t, i] = complex(float(re) if re is not None else z.real,
                                  float(im) if im is not None else z.imag)
    # canonical row order: trivial row first, then by multiplicity and values
    triv = int(np.argmin(np.abs(clean - np.array(sizes)[None, :]).sum(axis=1)))
    others = [t for t in range(r) if t != triv]
    others.sort(key=lambda t: (int(mult[t]), tuple(np.round(clean[t].real, 6)), tuple(np.round(clean[t].imag, 6))))
    perm = [triv] + others
    return EigenTable(clean[perm], [int(m) for m in mult[perm]], sizes, CA.order,
                      inverse_class_map=list(P.inverse_class_map) if P else None,
                      rational_class_of=list(P.rational_class_of) if P else None)


def eigen_table(G: Group) -> EigenTable:
    """Eigen-rows of G's class scheme (cached on the group)."""
    cached = getattr(G, "_eigen_table", None)
    if cached is None:
        P = G.classes
        cached = eigenrows(class_constants(G, P), P.sizes, P=P)
        G._eigen_table = cached
    return cached


def check_inverse_closed(ET: EigenTable, T: Iterable[int]) -> set[int]:
    T = set(int(t) for t in T)
    if 0 in T:
        raise ValueError("the identity class cannot be in a connection set")
    if ET.inverse_class_map is not None:
        missing = {ET.inverse_class_map[t] for t in T} - T
        if missing:
            raise ValueError(f"class selection not closed under inverses (missing {sorted(missing)})")
    return T


def row_values(ET: EigenTable, weights: dict[int, float | Fraction]) -> np.ndarray:
    """Per-row eigenvalue of sum_i w_i A_i (real; complex residue is an error)."""
    vals = np.zeros(ET.nrows, dtype=complex)
    for i, w in weights.items():
        vals += float(w) * ET.omega[:, i]
    if np.abs(vals.imag).max(initial=0.0) > IMAG_TOL * max(1.0, np.abs(vals).max()):
        raise SpectrumError("weighted class union has non-real eigenvalues")
    return vals.real


def exact_row_values(ET: EigenTable, weights: dict[int, float | Fraction]) -> list[Fraction] | None:
    """Row eigenvalues as rationals when every one snaps, else None."""
    vals = row_values(ET, weights)
    den = 1
    for w in weights.values():
        if isinstance(w, Fraction):
            den = math.lcm(den, w.denominator)
        elif isinstance(w, int):
            continue
        else:
            return None
    max_den = max(1, math.isqrt(ET.order)) * den
    out = []
    for v in vals:
        s = snap(float(v), max_den, tol=SNAP_TOL * max(1.0, abs(v)))
        if s is None:
            return None
        out.append(s)
    return out


def union_spectrum(ET: EigenTable, T: Iterable[int]) -> list[tuple[Fraction | float, int]]:
    """Eigenvalues of the Cayley graph on the union of classes T, with multiplicities."""
    T = check_inverse_closed(ET, T)
    weights = {i: 1 for i in T}
    exact = exact_row_values(ET, weights)
    vals = exact if exact is not None else list(row_values(ET, weights))
    merged: dict = {}
    for v, m in zip(vals, ET.multiplicities):
        key = v if exact is not None else round(float(v), 9)
        merged[key] = merged.get(key, 0) + m
    return sorted(merged.items(), key=lambda kv: -float(kv[0]))


def dense_cayley_spectrum(G: Group, T: Iterable[int]) -> np.ndarray:
    """Oracle: eigenvalues of the explicit |G| x |G| Cayley adjacency matrix."""
    T = set(T)
    P = G.classes
    member = np.isin(P.class_of, list(T))
    inv = G.inverse_index
    m = G.order
    A = np.zeros((m, m))
    for g in range(m):
        prods = G.left_products(g, inv)
        A[g] = member[prods]
    if not np.array_equal(A, A.T):
        raise ValueError("class union is not inverse-closed")
    return np.sort(np.linalg.eigvalsh(A))
