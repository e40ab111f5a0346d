import math

import pytest

import dcqkd


def test_working_point():
    p = dcqkd.ProtocolParams()
    assert dcqkd.bob_snr(p)["x"] == pytest.approx(10.7965, rel=1e-5)
    assert dcqkd.monitor_variances(p)["y"] == pytest.approx(0.928, abs=1e-12)
    assert dcqkd.required_tap_ratio(0.2, 0.9, 0.928) == pytest.approx(0.1)
    assert dcqkd.correlation_after_tap(p) == pytest.approx(5.528, abs=1e-3)


def test_attacks_and_key_rate():
    p = dcqkd.ProtocolParams(gamma=0.05, eta=1e-4)
    assert dcqkd.key_rate("single-tap", p) == pytest.approx(-2.58, abs=0.01)
    mix = dcqkd.evaluate_attack("partial-mix", dcqkd.ProtocolParams())
    assert mix["bob_snr_x"] == pytest.approx(0.1499, abs=1e-4)
    assert "unphysical-regime" in mix["flags"]
    ir = dcqkd.evaluate_attack("intercept-resend", dcqkd.ProtocolParams())
    assert math.isnan(ir["snr_ex"]) and ir["detected"]
    with pytest.raises(ValueError):
        dcqkd.key_rate("nobody", p)


def test_thresholds():
    r = dcqkd.security_threshold(0.05, "single-tap")
    assert r["verdict"] == "root"
    assert r["eta_star"] == pytest.approx(0.3249, abs=1e-3)
    assert dcqkd.security_threshold(1.0, "dual-tap")["eta_star"] == pytest.approx(0.5, abs=1e-8)


def test_sweep():
    rows = dcqkd.run_sweep(sweep="eta:0.01:0.99:0.01", gamma=0.05, attack="single-tap")
    assert len(rows) == 99
    assert set(rows[0]) == set(dcqkd.csv_header().split(","))
    both = dcqkd.run_sweep(attack=["single-tap", "dual-tap"])
    assert [r["attack"] for r in both] == ["single-tap", "dual-tap"]
    with pytest.raises(ValueError):
        dcqkd.run_sweep(eta=1.5)


def test_simulation_is_seeded():
    p = dcqkd.ProtocolParams()
    a = dcqkd.simulate_session(p, 20000, 3)
    b = dcqkd.simulate_session(p, 20000, 3)
    assert a["digest"] == b["digest"]
    assert a["snr_bx"] == pytest.approx(10.8, rel=0.1)
    assert dcqkd.mutual_info(3.0) == pytest.approx(1.0)
