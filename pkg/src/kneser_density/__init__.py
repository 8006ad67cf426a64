"""Intersection densities of permutation groups acting on k-subsets.

Build PGL(2,q), PSL(2,q) and related groups on the projective line, bound
their maximum intersecting sets with ratio and LP bounds over the
conjugacy-class scheme, and certify exact values by clique search.
"""

from .action import Action, induce_ksets, is_intersecting_set, point_action, restrict_to_orbit
from .bounds import BoundResult, clique_lp_bound, coclique_bound, ratio_bound, weight_search
from .density import (CASES, DensityArray, DensityReport, compute_density, density_array, load_catalog,
                      verify_paper_case)
from .gf import FieldElement, FieldSpec, ff_arith, ff_frobenius, ff_is_square, ff_make
from .perm import Group, GroupFile, Perm, conjugacy_classes, group_closure, load_group, perm_compose
from .pgl import build_named_subgroup, build_pgammal2, build_pgl2, build_psl2, build_psl_sigma, triple_sign
from .scheme import EigenTable, eigen_table, union_spectrum
from .search import CliqueResult, GraphView, max_clique, max_intersecting_set

__version__ = "0.1.0"

__all__ = [
    "Action", "BoundResult", "CASES", "CliqueResult", "DensityArray", "DensityReport", "EigenTable",
    "FieldElement", "FieldSpec", "GraphView", "Group", "GroupFile", "Perm", "build_named_subgroup",
    "build_pgammal2", "build_pgl2", "build_psl2", "build_psl_sigma", "clique_lp_bound", "coclique_bound",
    "compute_density", "conjugacy_classes", "density_array", "eigen_table", "ff_arith", "ff_frobenius",
    "ff_is_square", "ff_make", "group_closure", "induce_ksets", "is_intersecting_set", "load_catalog",
    "load_group", "max_clique", "max_intersecting_set", "perm_compose", "point_action", "ratio_bound",
    "restrict_to_orbit", "triple_sign", "union_spectrum", "verify_paper_case", "weight_search",
]
