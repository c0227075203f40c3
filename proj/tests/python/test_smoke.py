import math

import numpy as np
import pytest

import phasepath as pp


def test_reference_arithmetic():
    t = pp.PropagationTriple.make(0.5249, 0.6445, 0.1092)
    assert pp.defect_probability(t) == pytest.approx(0.0602, abs=1e-4)
    assert pp.minimal_joint_probability(0.5249, 0.6445) == pytest.approx(0.1694, abs=1e-4)
    q = pp.quasi_from_marginals(0.5249, 0.6445, 0.0309)
    assert q.sum() == pytest.approx(1.0)
    assert q.w_inter == pytest.approx(0.143, abs=1e-3)
    w_inter, overlap = pp.quasi_from_envelope(1.718)
    assert w_inter == pytest.approx(0.141)
    total, state, inter = pp.predict_PM(pp.QuasiProbabilities(0.355, 0.493, 0.152), 0.3617 / 2)
    assert inter == pytest.approx(0.054978, abs=1e-6)
    assert total == pytest.approx(state + inter)


def test_errors_are_typed():
    with pytest.raises(pp.OverlapOutOfRange):
        pp.quasi_from_marginals(0.5, 0.5, 1.0)
    with pytest.raises(pp.AreaOutOfRange):
        pp.quasi_from_envelope(3.0)
    with pytest.raises(pp.ConfigError):
        pp.RunConfig.parse("[state]\nbogus = 1\n")
    assert issubclass(pp.ConfigError, pp.PhasepathError)


def test_lab_units():
    lab = pp.LabParams()
    assert lab.sigma == pytest.approx(0.0309, abs=5e-5)
    assert lab.first_minimum == pytest.approx(1620e-6, rel=1e-9)
    u = lab.natural()
    assert u.B * u.t_M == pytest.approx(u.L)


def test_config_round_trip():
    c = pp.RunConfig()
    c.state = "pure"
    c.seed = 42
    back = pp.RunConfig.parse(c.to_toml())
    assert back.state == "pure"
    assert back.seed == 42


def test_densities_normalized():
    d = pp.plane_densities(pp.RunConfig())
    assert set(d) == set(pp.PLANES)
    for x, rho in d.values():
        assert np.sum(rho) * (x[1] - x[0]) == pytest.approx(1.0, abs=1e-3)


def test_wigner_of_pure_state():
    c = pp.RunConfig()
    c.state = "pure"
    x, p, w, regions = pp.wigner(c)
    assert w.shape == (p.size, x.size)
    cell = (x[1] - x[0]) * (p[1] - p[0])
    assert w.sum() * cell == pytest.approx(1.0, abs=1e-6)
    assert w.min() < 0.0
    assert regions.W_out < 0.0
    defect = regions.P_L + regions.P_B - 1.0 - regions.P_M
    assert defect == pytest.approx(-(regions.W_out + regions.W_diag), abs=1e-9)


def test_simulate_and_analyze(tmp_path):
    c = pp.RunConfig()
    c.seed = 3
    for plane in pp.PLANES:
        assert pp.simulate(c, plane, tmp_path) == 0
    scans = [tmp_path / f"scan_{p}.csv" for p in pp.PLANES]
    report = pp.analyze(c, scans)
    assert report["identities_hold"]
    assert report["defect"]["value"] > 0.0
    assert pp.analyze_files(c, scans, tmp_path) == 0
    assert (tmp_path / "analysis.json").exists()
    with pytest.raises(pp.MissingPlane):
        pp.analyze(c, scans[:1] * 3)


def test_acceptance_subset():
    results = pp.acceptance(which=[2, 3, 8])
    assert [r["criterion"] for r in results] == [2, 3, 8]
    assert all(r["pass"] for r in results)
    assert not math.isnan(results[0]["seconds"])
