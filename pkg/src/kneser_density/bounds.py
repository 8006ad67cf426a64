"""Ratio and LP bounds for cocliques/cliques of graphs in the class scheme.

LP variables are attached to rational classes (classes whose elements
generate conjugate cyclic subgroups).  The LPs are invariant under the Galois
action permuting the classes inside a rational class, so averaging any
feasible point over that action keeps it feasible with the same objective;
restricting to constant weights per rational class loses nothing and makes
every coefficient an integer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .scheme import EigenTable, check_inverse_closed, exact_row_values, row_values

FLOOR_EPS = 1e-9


class BoundError(RuntimeError):
    """The requested bound is vacuous or the LP is unbounded."""


@dataclass
class BoundResult:
    kind: str  # "ratio", "ratio_weighted", "lp"
    value: Fraction | float
    exact: bool
    d: Fraction | float | None = None
    tau: Fraction | float | None = None
    optimizer: dict[int, Fraction | float] = field(default_factory=dict)
    variables: dict[int, list[int]] = field(default_factory=dict)
    binding_rows: list[int] = field(default_factory=list)
    note: str = ""

    @property
    def floor(self) -> int:
        if self.exact:
            return math.floor(self.value)
        return math.floor(float(self.value) + FLOOR_EPS)

    def to_dict(self) -> dict:
        return {"method": self.kind, "value": fmt_number(self.value), "floor": self.floor,
                "exact": self.exact,
                "d": None if self.d is None else fmt_number(self.d),
                "tau": None if self.tau is None else fmt_number(self.tau),
                "optimizer": {str(k): fmt_number(v) for k, v in self.optimizer.items()},
                "variables": {str(k): v for k, v in self.variables.items()},
                "binding_rows": list(self.binding_rows), "note": self.note}


def fmt_number(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return f"{v}/1"
    return f"float:{float(v)!r}"


# --- exact linear algebra / LP ----------------------------------------------------

def solve_exact(M: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve a square system over Q; None when singular."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [x / pv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


@dataclass
class LPSolution:
    value: Fraction | float
    x: list[Fraction] | list[float]
    binding: list[int]
    exact: bool


def _dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x))


def lp_max_vertex_enumeration(c: Sequence[Fraction], rows: Sequence[Sequence[Fraction]],
                              rhs: Sequence[Fraction]) -> LPSolution:
    """max c.x s.t. rows[r].x >= rhs[r], exactly, by enumerating bases (small n)."""
    n = len(c)
    best = None
    for basis in itertools.combinations(range(len(rows)), n):
        x = solve_exact([rows[r] for r in basis], [rhs[r] for r in basis])
        if x is None or any(_dot(rows[r], x) < rhs[r] for r in range(len(rows))):
            continue
        val = _dot(c, x)
        if best is None or val > best[0]:
            best = (val, x)
    if best is None:
        raise BoundError("LP has no vertex (constraint matrix rank-deficient)")
    # bounded iff some basis is dual feasible: c = sum_r mu_r a_r with mu <= 0
    dual_ok = False
    for basis in itertools.combinations(range(len(rows)), n):
        At = [[rows[r][j] for r in basis] for j in range(n)]
        mu = solve_exact(At, c)
        if mu is not None and all(m <= 0 for m in mu):
            dual_ok = True
            break
    if not dual_ok:
        raise BoundError("LP is unbounded")
    val, x = best
    binding = [r for r in range(len(rows)) if _dot(rows[r], x) == rhs[r]]
    return LPSolution(val, x, binding, True)


def lp_max_certified(c: Sequence[Fraction], rows: Sequence[Sequence[Fraction]],
                     rhs: Sequence[Fraction], tol: float = 1e-7) -> LPSolution:
    """Float simplex (HiGHS) followed by an exact optimality check on the active set."""
    n = len(c)
    A = np.array([[float(v) for v in r] for r in rows])
    b = np.array([float(v) for v in rhs])
    res = linprog(-np.array([float(v) for v in c]), A_ub=-A, b_ub=-b,
                  bounds=[(None, None)] * n, method="highs")
    if res.status == 3:
        raise BoundError("LP is unbounded")
    if res.status != 0:
        raise BoundError(f"LP solver failed: {res.message}")
    xf = res.x
    slack = A @ xf - b
    active = [r for r in np.argsort(slack) if slack[r] <= tol * max(1.0, abs(b[r]))]
    for basis in itertools.islice(itertools.combinations(active, n), 2000):
        x = solve_exact([rows[r] for r in basis], [rhs[r] for r in basis])
        if x is None or any(_dot(rows[r], x) < rhs[r] for r in range(len(rows))):
            continue
        At = [[rows[r][j] for r in basis] for j in range(n)]
        mu = solve_exact(At, c)
        if mu is not None and all(m <= 0 for m in mu):
            binding = [r for r in range(len(rows)) if _dot(rows[r], x) == rhs[r]]
            return LPSolution(_dot(c, x), x, binding, True)
    binding = [int(r) for r in active]
    return LPSolution(float(-res.fun), [float(v) for v in xf], binding, False)


def lp_max(c, rows, rhs) -> LPSolution:
    if len(c) <= 3:
        return lp_max_vertex_enumeration(c, rows, rhs)
    return lp_max_certified(c, rows, rhs)


# --- class-variable helpers -------------------------------------------------------

def class_variables(ET: EigenTable, T: Iterable[int]) -> dict[int, list[int]]:
    """Group the classes of T into rational classes (fallback: inverse pairs)."""
    T = check_inverse_closed(ET, T)
    groups: dict[int, list[int]] = {}
    if ET.rational_class_of is not None:
        for t in sorted(T):
            groups.setdefault(ET.rational_class_of[t], []).append(t)
        full = all(sorted(g) == sorted(c for c, r in enumerate(ET.rational_class_of) if r == key)
                   for key, g in groups.items())
        if full:
            return {min(g): g for g in groups.values()}
    groups = {}
    inv = ET.inverse_class_map or list(range(len(ET.sizes)))
    for t in sorted(T):
        key = min(t, inv[t])
        groups.setdefault(key, [])
        if t not in groups[key]:
            groups[key].append(t)
    return groups


def _variable_rows(ET: EigenTable, variables: dict[int, list[int]]):
    """Exact eigenvalue of each variable's class union on every row."""
    cols = {}
    for key, members in variables.items():
        vals = exact_row_values(ET, {i: 1 for i in members})
        if vals is None:
            raise BoundError(f"eigenvalues of class union {members} are not rational")
        cols[key] = vals
    keys = sorted(cols)
    table = [[cols[k][r] for k in keys] for r in range(ET.nrows)]
    sizes = [Fraction(sum(ET.sizes[i] for i in variables[k])) for k in keys]
    return keys, table, sizes


def _dedupe(rows):
    seen, out_rows, origin = {}, [], []
    for r, row in enumerate(rows):
        key = tuple(row)
        if key not in seen:
            seen[key] = len(out_rows)
            out_rows.append(list(row))
            origin.append(r)
    return out_rows, origin


# --- bounds ---------------------------------------------------------------------------

def _validate_weights(ET: EigenTable, T: set[int], w: dict[int, float | Fraction]) -> dict:
    w = {int(i): v for i, v in w.items() if v != 0}
    if not w:
        raise BoundError("all-zero weighting")
    if any(v < 0 for v in w.values()):
        raise ValueError("weights must be non-negative")
    if not set(w) <= T:
        raise ValueError("weights outside the class selection")
    inv = ET.inverse_class_map
    if inv is not None and any(w.get(inv[i], 0) != v for i, v in w.items()):
        raise ValueError("weights must agree on inverse-paired classes")
    return w


def ratio_bound(ET: EigenTable, T: Iterable[int], w: dict[int, float | Fraction] | None,
                nverts: int, kind: str = "ratio") -> BoundResult:
    """nverts / (1 - d/tau) for the weighted union sum_i w_i A_i."""
    T = check_inverse_closed(ET, T)
    weights = _validate_weights(ET, T, w if w is not None else {i: 1 for i in T})
    exact_vals = exact_row_values(ET, weights)
    if exact_vals is not None:
        d, tau = exact_vals[0], min(exact_vals)
        if d <= 0:
            raise BoundError("weighted graph has no edges (d = 0)")
        if tau >= 0:
            raise BoundError("least eigenvalue is non-negative: no ratio bound")
        value = Fraction(nverts) / (1 - d / tau)
        return BoundResult(kind, value, True, d=d, tau=tau, optimizer=dict(weights))
    vals = row_values(ET, weights)
    d, tau = float(vals[0]), float(vals.min())
    if d <= 0:
        raise BoundError("weighted graph has no edges (d = 0)")
    if tau >= -1e-12:
        raise BoundError("least eigenvalue is non-negative: no ratio bound")
    return BoundResult(kind, nverts / (1 - d / tau), False, d=d, tau=tau, optimizer=dict(weights),
                       note="float eigenvalues")


def weight_search(ET: EigenTable, T: Iterable[int], nverts: int) -> BoundResult:
    """Best weighted ratio bound: max d subject to every eigenvalue >= -1, w >= 0."""
    variables = class_variables(ET, T)
    keys, table, sizes = _variable_rows(ET, variables)
    n = len(keys)
    rows = [list(r) for r in table[1:]]
    rhs = [Fraction(-1)] * len(rows)
    for j in range(n):
        rows.append([Fraction(int(i == j)) for i in range(n)])
        rhs.append(Fraction(0))
    rows, origin = _dedupe(rows)
    rhs = [Fraction(-1) if o < ET.nrows - 1 else Fraction(0) for o in origin]
    sol = lp_max(sizes, rows, rhs)
    weights = {}
    for key, xv in zip(keys, sol.x):
        for i in variables[key]:
            weights[i] = xv
    weights = {i: v for i, v in weights.items() if v != 0}
    if not weights:
        raise BoundError("no positive weighting gives a ratio bound")
    res = ratio_bound(ET, T, weights, nverts, kind="ratio_weighted")
    res.variables = {k: variables[k] for k in keys}
    res.note = ("exact LP" if sol.exact else "float LP") + "; weights per rational class"
    return res


def clique_lp_bound(ET: EigenTable, T: Iterable[int]) -> BoundResult:
    """max 1 + sum x_v |C_v| s.t. 1 + sum x_v ω_v(row) >= 0 on every row."""
    variables = class_variables(ET, T)
    keys, table, sizes = _variable_rows(ET, variables)
    rows, origin = _dedupe(table)
    rhs = [Fraction(-1)] * len(rows)
    sol = lp_max(sizes, rows, rhs)
    value = 1 + sol.value
    binding = sorted({origin[r] for r in sol.binding})
    return BoundResult("lp", value if sol.exact else float(value), sol.exact,
                       optimizer=dict(zip(keys, sol.x)),
                       variables={k: variables[k] for k in keys}, binding_rows=binding,
                       note="vertex enumeration" if len(keys) <= 3 else "simplex + exact check")


def coclique_bound(ET: EigenTable, T_edges: Iterable[int], nverts: int,
                   methods: Iterable[str] = ("ratio", "lp")) -> tuple[BoundResult | None, list[BoundResult]]:
    """Upper bounds on cocliques of Cay(G, union T_edges); returns (best, all)."""
    T_edges = check_inverse_closed(ET, T_edges)
    complement = [i for i in range(1, len(ET.sizes)) if i not in T_edges]
    results: list[BoundResult] = []
    methods = set(methods)
    if not T_edges:
        # no edges: the whole group is a coclique
        return BoundResult("trivial", Fraction(nverts), True, note="empty graph"), []
    if not complement:
        return BoundResult("trivial", Fraction(1), True, note="complete graph"), []
    if "ratio" in methods:
        try:
            results.append(ratio_bound(ET, T_edges, None, nverts))
        except BoundError as exc:
            results.append(BoundResult("ratio", float("inf"), False, note=str(exc)))
    if "lp" in methods:
        try:
            results.append(clique_lp_bound(ET, complement))
        except BoundError as exc:
            results.append(BoundResult("lp", float("inf"), False, note=str(exc)))
    if "weighted" in methods:
        try:
            results.append(weight_search(ET, T_edges, nverts))
        except BoundError as exc:
            results.append(BoundResult("ratio_weighted", float("inf"), False, note=str(exc)))
    finite = [r for r in results if r.value != float("inf")]
    best = min(finite, key=lambda r: (r.floor, not r.exact)) if finite else None
    return best, results
