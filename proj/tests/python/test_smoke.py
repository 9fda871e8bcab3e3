import json
import math
from fractions import Fraction

import pytest

import mtype


def test_dyadic_carleson_growth():
    for d in range(2, 7):
        assert mtype.carleson(mtype.Tree.dyadic(d)) == 1 + Fraction(d - 1, 2)
        assert mtype.carleson(mtype.Tree.dyadic(d), naive=True) == 1 + Fraction(d - 1, 2)


def test_chain_tree_is_disjoint():
    t = mtype.Tree.chain(6, "1/3")
    assert mtype.carleson(t) == 1
    assert mtype.gg_build(t)["reason"].startswith("condensation NotFound")


def test_tree_json_round_trip():
    t = mtype.Tree.random(4, 3, 9)
    back = mtype.Tree.from_json(t.to_json())
    assert back.to_json() == t.to_json()
    assert back.size == t.size


def test_bad_tree_raises():
    spec = {"p": "1", "children": [{"p": "1/2"}, {"p": "1/3"}]}
    with pytest.raises(ValueError):
        mtype.Tree.from_json(json.dumps(spec))


def test_sample_counts_and_variation():
    t = mtype.Tree.dyadic(2)
    assert mtype.collection_sizes(t) == {"E": 3, "B": 3, "C": 3}
    assert mtype.generation_decay_violations(mtype.Tree.random(5, 4, 3)) == []
    f = {"level": 2, "values": {"0/0": ["1"], "0/1": ["-1"], "1/0": ["1/2"], "1/1": ["0"]}}
    out = mtype.mdiff(t, f)
    assert out["mean"] == ["1/8"]
    assert out["round_trip"]


def test_protohaar_on_dyadic_root():
    cert = mtype.protohaar(mtype.Tree.dyadic(10), "", "1/4", 3)
    assert cert["admissible"] and cert["all_ok"]
    assert cert["monotone_projections"]["ok"]
    assert mtype.protohaar(mtype.Tree.chain(5, "1/2"), "", "1/4", 3)["admissible"] is False


def test_disjointify_and_condense():
    d = mtype.disjointify(mtype.Tree.dyadic(6))
    assert d["ok"] and d["m"] <= d["bound"]
    c = mtype.condense(mtype.Tree.dyadic(14), "1/2", 2, 2)
    assert c["found"] and c["verified"]
    assert not mtype.condense(mtype.Tree.dyadic(8), "1/2", 2, 2)["found"]


def test_parseval_and_type_bound():
    t = mtype.Tree.random(5, 3, 4)
    assert abs(mtype.type_estimate(t, 2.0, "real", 200)["empirical_constant"] - 1) < 1e-12
    est = mtype.type_estimate(mtype.Tree.chain(6, "1/3"), 1.5, "lq:inf:3", 200)
    assert est["empirical_constant"] <= est["tp_bound"] + 1e-9


def test_rzeszut_and_dichotomy():
    r = mtype.rzeszut(6, random=5)
    assert r["variation"] == Fraction(35, 16)
    assert float(r["variation"]) >= math.sqrt(3)
    assert r["upper_ok"]
    csv = mtype.dichotomy("dyadic", [2, 3], budget=30)
    assert csv.splitlines()[0] == "depth,carleson,empirical_constant,tp_bound,max_probe_id"


def test_gg_system_on_deep_dyadic():
    g = mtype.gg_build(mtype.Tree.dyadic(14))
    assert g["feasible"] and g["all"] and g["K"] == 6 and g["distribution_match"]
