import math
import os
import subprocess

import pytest

import bulksurf


def test_polynomial_roundtrip():
    p = bulksurf.parse_expression("u1^3 - u2^3", ["u1", "u2"])
    assert p.evaluate([2.0, 1.0]) == 7.0
    assert p.total_degree() == 3
    q = bulksurf.parse_expression(p.to_string(["u1", "u2"]), ["u1", "u2"])
    assert q == p
    assert (p - q).is_zero()


def test_parse_error_is_value_error():
    with pytest.raises(ValueError, match="v9"):
        bulksurf.parse_expression("u1 + v9", ["u1", "u2"])


def test_energy_helpers():
    assert bulksurf.multinomial(6, [2, 2, 2]) == 90
    assert len(bulksurf.enumerate_multi_indices(3, 4)) == 15
    assert bulksurf.eval_Hp([1.0, 1.0], 2, [2.0, 1.0]) == 21.0
    assert bulksurf.dHp_dt([1.0, 2.0], [0.0, 0.0], 3, [1.1, 1.0]) == 0.0


def test_check_presets():
    membrane = bulksurf.check_model(bulksurf.export_preset("membrane"), samples=2000)
    assert membrane["theorem"] == "theorem=1.1 uniform_in_time=true"
    assert membrane["conservation"]
    cubic = bulksurf.check_model(bulksurf.export_preset("cubic"), samples=2000)
    assert cubic["theorem"] == "theorem_1_1=fail theorem_1_3=pass(a=4,b=6)"
    assert (cubic["p_omega"], cubic["p_M"], cubic["mu_M"]) == (3.0, 2.0, 3.0)
    assert "membrane" in bulksurf.preset_names()


def test_simulate_linear_decay():
    text = bulksurf.export_preset("linear_decay")
    text = text.replace("nr = 16", "nr = 6").replace("ntheta = 64", "ntheta = 16")
    result = bulksurf.simulate_model(text)
    assert not result["blowup"]
    rows = result["csv"].strip().splitlines()
    header = rows[0].split(",")
    last = dict(zip(header, map(float, rows[-1].split(","))))
    assert last["t"] == pytest.approx(1.0)
    assert last["sup_u1"] == pytest.approx(math.exp(-1.0), rel=0.01)


def test_verify_suite():
    (result,) = bulksurf.verify("multinomial", 1, 100)
    assert result["passed"]
    assert result["max_residual"] < 1e-12


@pytest.mark.skipif("BULKSURF_CLI" not in os.environ, reason="command-line binary not configured")
def test_cli_models_list():
    out = subprocess.run([os.environ["BULKSURF_CLI"], "models", "list"], capture_output=True, text=True, check=True)
    assert "cdc42" in out.stdout
