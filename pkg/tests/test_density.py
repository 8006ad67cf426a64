import csv
import io
import json
from fractions import Fraction

import pytest

from kneser_density.action import IntransitiveError, induce_ksets, is_intersecting_set, point_action, restrict_to_orbit
from kneser_density.density import (CASES, builtin_catalogs, compute_density, constructions_for, density_array,
                                    frac_str, load_catalog, parse_fraction, report_row, to_csv, to_markdown,
                                    verify_paper_case)
from kneser_density.perm import cyclic_group
from kneser_density.pgl import build_pgl2, build_psl2


def test_fraction_helpers():
    assert frac_str(Fraction(3)) == "3/1"
    assert parse_fraction("4/3") == Fraction(4, 3)
    assert parse_fraction(2) == 2


@pytest.mark.parametrize("G,k,rho", [(build_pgl2(8), 3, Fraction(4, 3)), (build_pgl2(9), 3, Fraction(3)),
                                     (build_pgl2(7), 3, Fraction(1)), (build_psl2(7), 3, Fraction(4, 3))],
                         ids=lambda x: getattr(x, "name", str(x)))
def test_compute_density(G, k, rho):
    rep = compute_density(induce_ksets(G, k), time_limit=120)
    assert rep.status == "exact" and rep.rho == rho
    assert is_intersecting_set(rep.exact.certificate, rep.action)
    assert rep.rho >= 1


def test_regular_action_has_density_one():
    rep = compute_density(point_action(cyclic_group(7)))
    assert rep.rho == 1 and rep.lower == 1


def test_intransitive_rejected():
    with pytest.raises(IntransitiveError):
        compute_density(induce_ksets(build_psl2(9), 3))
    with pytest.raises(ValueError):
        compute_density(induce_ksets(build_pgl2(5), 3), methods="bogus")


def test_interval_status():
    rep = compute_density(induce_ksets(build_pgl2(8), 3), methods="ratio")
    assert rep.status == "interval" and rep.exact is None
    assert rep.lower <= 8 <= rep.upper == 10
    d = rep.to_dict()
    assert d["status"] == "interval" and d["rho_interval"][1] == frac_str(Fraction(10 * 84, 504))


def test_constructions_are_intersecting():
    A = induce_ksets(build_pgl2(8), 3)
    cons = constructions_for(A)
    assert cons[0].size == 8
    assert any(c.name.startswith("subgroup:") for c in cons)
    A2 = induce_ksets(build_psl2(7), 2)
    names = [c.name for c in constructions_for(A2)]
    assert "subgroup:a4" in names


def test_report_schema_and_emitters():
    rep = compute_density(induce_ksets(build_pgl2(9), 3), case="x")
    d = rep.to_dict(deterministic=True)
    for key in ("case", "group", "action", "N", "order", "stabilizer", "construction", "bounds", "exact", "rho",
                "status"):
        assert key in d
    assert "timings" not in d and "elapsed" not in d["exact"]
    assert d["rho"] == "3/1" and d["N"] == 120 and d["order"] == 720 and d["stabilizer"] == 6
    json.dumps(d)
    row = report_row(rep)
    text = to_csv([row])
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert parsed[0]["rho"] == "3/1"
    md = to_markdown([row])
    assert md.splitlines()[0].startswith("| case |") and md.count("\n") == 3


def test_catalogs():
    assert builtin_catalogs() == ["K10_3", "K7_3", "K8_3", "K9_3"]
    cat = load_catalog("K8_3")
    assert cat.n == 8 and cat.k == 3
    arr = density_array(cat, time_limit=120)
    assert arr.values == [1, Fraction(4, 3)]
    comp = [g for g in arr.per_group if g["provenance"] == "computed"]
    assert comp and all(parse_fraction(g["rho"]) >= 1 for g in comp)
    with pytest.raises(FileNotFoundError):
        load_catalog("nope")


def test_subgroup_monotonicity():
    for q in (7, 11):
        big = compute_density(induce_ksets(build_pgl2(q), 3)).lower
        small = compute_density(induce_ksets(build_psl2(q), 3)).lower
        assert small <= big


def test_case_registry_fast_cases():
    assert "qeven-8" in CASES and "table4-q25" in CASES
    res = verify_paper_case("qeven-8", time_limit=60)
    assert res.passed
    with pytest.raises(KeyError):
        verify_paper_case("nope")


def test_orbit_density():
    rep = compute_density(restrict_to_orbit(induce_ksets(build_psl2(9), 3), 1))
    assert rep.lower == 15 and rep.rho == Fraction(5, 2)
