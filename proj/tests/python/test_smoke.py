import json
import math
import os

import pytest

import cantorlab


def test_interval_closed_forms():
    t = cantorlab.Tower(variant="interval")
    assert cantorlab.as_float(t.capacity(0)) == pytest.approx(0.5, abs=1e-15)
    assert cantorlab.as_float(t.green("2")) == pytest.approx(math.acosh(2.0), abs=1e-12)
    j = t.jacobi(0, 20, m=64)
    a = cantorlab.as_float(j["a"])
    assert a[0] == pytest.approx(math.sqrt(0.5), abs=1e-14)
    assert all(abs(x - 0.5) < 1e-14 for x in a[1:])


def test_cantor_tower():
    t = cantorlab.Tower("1/8", 6)
    assert t.levels == 6
    assert len(t.level_set(3)) == 8
    assert cantorlab.as_float(t.capacity_limit()) == pytest.approx(0.125, abs=1e-12)
    j = t.jacobi(5, 16)
    assert all(abs(x - 0.5) < 1e-12 for x in cantorlab.as_float(j["b"][: j["trusted_n"]]))
    c = t.chebyshev(2, 4)
    assert c["alternation"] >= 5
    assert t.equilibrium_cdf("-1") == "0"


def test_invalid_gamma_raises():
    with pytest.raises(cantorlab.LabError, match=r"gamma\[1\]"):
        cantorlab.Tower("3/10", 2)


def test_run_and_compare(tmp_path):
    config = {"gamma": "1/8", "levels": 4, "m": 8, "N": 16, "products": ["jacobi", "capacity"]}
    a = cantorlab.run(config, str(tmp_path / "a"))
    b = cantorlab.run(json.dumps(config), str(tmp_path / "b"))
    assert a["exit_code"] == 0 and b["exit_code"] == 0
    assert "manifest.json" in a["files"]
    with open(os.path.join(a["directory"], "jacobi.csv")) as fa, open(os.path.join(b["directory"], "jacobi.csv")) as fb:
        assert fa.read() == fb.read()
    report = cantorlab.compare(
        os.path.join(a["directory"], "manifest.json"), os.path.join(b["directory"], "manifest.json"), ["jacobi"]
    )
    rows = [line.split(",") for line in report.splitlines()[1:]]
    assert rows and all(float(r[3]) == 0 for r in rows)
    bad = cantorlab.run({"gamma": 0.3, "levels": 2}, str(tmp_path / "c"))
    assert bad["exit_code"] == 2
