"""Smoke test for the colog extension module.

Build and stage the module next to this script first:

    cargo build -p colog-py --release --features extension-module
    cp target/release/libcolog.so crates/python/python/colog.so
"""

import os
import sys
from fractions import Fraction

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, HERE)

import colog  # noqa: E402

FIXTURES = os.path.join(HERE, "..", "..", "core", "fixtures")


def main():
    out = colog.eval_signs([10, 40, 50], [20, 10, 70], [20, 40, 40], [30, 40, 30], "+-+", "--+")
    assert out["sn_weight"] == ["60"], out
    assert out["cc_weight"] == ["-20"], out

    assert colog.effector_k([("Wind", "+", 1), ("Tornado", "-", 2)]) == "2211.1"
    assert colog.classify_trio("1", "2", "0.5", "0.5") == "non-chaotic"
    classes = sorted(c for _, c in colog.spider())
    assert classes.count("semi-tangible") == 4 and classes.count("tangible") == 1

    s = colog.Scenario.load(os.path.join(FIXTURES, "sample1.scn"))
    assert "S1" in s.shippers
    path, length = s.shortest_path("S1", "C4")
    assert path[-1] == "C4" and Fraction(length) > 0

    plan = s.plan(from_macro="1")
    assert plan.csv() == s.plan(from_macro="1").csv()
    assert plan.csv().startswith("table,row,column,value")
    lengths = {k: Fraction(v) for k, v in plan.triplengths.items()}
    assert lengths["FC"] + lengths["PC"] < lengths["NC"], lengths

    try:
        s.plan(intents=["x"])
    except ValueError:
        pass
    else:
        raise AssertionError("bad intent accepted")

    for name in colog.fixture_names():
        passed, report = colog.run_fixture(name)
        assert passed, report

    print("smoke test ok")


if __name__ == "__main__":
    main()
