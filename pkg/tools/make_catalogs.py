"""Regenerate the shipped K(n,3) group catalogs.

Each catalog lists the subgroups of Sym(n) (up to conjugacy) that are
transitive on 3-subsets.  Groups that are too large to search at desk scale
(the alternating and symmetric groups) carry a ``known_density`` annotation
and are not computed; every other group is built from its generators and
computed by ``kneser_density array``.

Usage: python tools/make_catalogs.py [output_dir]
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from kneser_density.action import induce_ksets
from kneser_density.gf import field_of_order
from kneser_density.perm import Perm, group_closure
from kneser_density.pgl import build_pgammal2, build_pgl2, build_psl2, build_psl_sigma

LITERATURE = ("alternating and symmetric groups have the EKR property on k-sets "
              "(Erdős–Ko–Rado theorem for permutation groups)")


def symmetric_entry(n: int) -> dict:
    return {"name": f"Sym({n})", "degree": n,
            "generators": ["(" + ",".join(map(str, range(1, n + 1))) + ")", "(1,2)"],
            "annotations": {"known_density": "1", "source": LITERATURE}}


def alternating_entry(n: int) -> dict:
    gens = ["(1,2,3)", "(" + ",".join(map(str, range(2 if n % 2 == 0 else 1, n + 1))) + ")"]
    return {"name": f"Alt({n})", "degree": n, "generators": gens,
            "annotations": {"known_density": "1", "source": LITERATURE}}


def affine_groups_8():
    """AGL(1,8), AΓL(1,8), AGL(3,2) on the 8 elements of GF(8) (integer codes)."""
    F = field_of_order(8)
    els = F.elements()
    g = F.primitive_element
    translate = Perm([int(x + F.one) for x in els])
    scale = Perm([int(g * x) for x in els])
    frob = Perm([int(x * x) for x in els])
    # v -> v + v_0 e_1 on coordinate vectors (c0, c1, c2)
    transvection = Perm([c ^ ((c & 1) << 1) for c in range(8)])
    return [
        group_closure([translate, scale], name="AGL(1,8)", meta={"family": "agl1", "n": 8}),
        group_closure([translate, scale, frob], name="AGammaL(1,8)", meta={"family": "agammal1", "n": 8}),
        group_closure([translate, scale, transvection], name="AGL(3,2)", meta={"family": "agl", "n": 8}),
    ]


def entry(G) -> dict:
    d = G.to_dict()
    d["annotations"] = {k: v for k, v in G.meta.items() if k in ("family", "q")}
    if not d["annotations"]:
        del d["annotations"]
    return d


def catalog(n: int, groups, big) -> dict:
    out = []
    for G in groups:
        assert G.n == n
        if not induce_ksets(G, 3).transitive:
            print(f"  skip {G.name}: not transitive on 3-sets", file=sys.stderr)
            continue
        out.append(entry(G))
    out += big
    return {"name": f"K({n},3)", "degree": n, "k": 3, "groups": out}


def main(outdir: Path):
    outdir.mkdir(parents=True, exist_ok=True)
    cats = {
        "K7_3": catalog(7, [], [alternating_entry(7), symmetric_entry(7)]),
        "K8_3": catalog(8, affine_groups_8() + [build_psl2(7), build_pgl2(7)],
                        [alternating_entry(8), symmetric_entry(8)]),
        "K9_3": catalog(9, [build_pgl2(8), build_pgammal2(8)], [alternating_entry(9), symmetric_entry(9)]),
        "K10_3": catalog(10, [build_psl2(9), build_pgl2(9), build_psl_sigma(9), build_pgammal2(9)],
                         [alternating_entry(10), symmetric_entry(10)]),
    }
    for name, cat in cats.items():
        (outdir / f"{name}.json").write_text(json.dumps(cat, indent=1) + "\n")
        print(name, [g["name"] for g in cat["groups"]])


if __name__ == "__main__":
    default = Path(__file__).resolve().parents[1] / "src" / "kneser_density" / "catalogs"
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else default)
