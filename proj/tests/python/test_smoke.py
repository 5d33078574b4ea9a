import math

import pytest

import squeeze_forge as sf


def test_janszky_adam_law():
    for n in (1, 2, 3):
        p = sf.build_janszky_adam(1.0, 2.0, n)
        end = sf.propagate(p, [p.duration])[-1]
        q = sf.qstar_husimi(end, 1.0, p.omega_at(p.duration))
        assert math.exp(2 * sf.r_from_qstar(q)) == pytest.approx(2.0**n, rel=1e-10)


def test_sudden_jump_chain():
    cov = sf.CovarianceTriple(0.5, 0.5, 0.0)
    assert sf.qstar_from_cov(cov, 2.0) == pytest.approx(1.25, abs=1e-12)
    dec = sf.decompose(cov, 2.0)
    assert dec.r == pytest.approx(math.log(2) / 2, abs=1e-12)
    assert sf.wirr_from_r(dec.r, 2.0) == pytest.approx(0.25, abs=1e-12)
    assert sf.work_quantities(1.25, 1.0, 2.0)[2] == pytest.approx(0.25, abs=1e-12)


def test_estimator_round_trip():
    dist = sf.fock_populations(1.0)
    est = sf.estimate_r(dist)
    assert est.r == pytest.approx(1.0, abs=1e-8)
    sampled = sf.sample_populations(dist, 1000, 7)
    assert sampled.populations == sf.sample_populations(dist, 1000, 7).populations


def test_optimizer_and_stationarity():
    problem = sf.ControlProblem.preset("x2", 3)
    ja = sf.build_janszky_adam(1.0, 2.0, 3)
    report = sf.verify_stationarity(ja, problem)
    assert report["stationary"]
    res = sf.solve_bangbang(problem, 3, init="uniform")
    assert res.achieved_qstar >= 0.95 * 4.0625


def test_protocol_json_and_errors():
    p = sf.build_linear_ramp(1.0, 2.0, 10.0)
    q = sf.FrequencyProtocol.from_json(p.to_json())
    assert q.omega_at(5.0) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        p.omega_at(11.0)
    with pytest.raises(ValueError):
        sf.build_sinusoidal(1.0, 4.0, 1.0)
