import math

import numpy as np
import pytest

import maxslope as ms


def test_alpha():
    assert ms.alpha(2.0, 2.0) == 0.0
    assert ms.alpha(2.0, 4.0) == pytest.approx(2.0 / 3.0)
    assert ms.alpha(2.0, 1.5) == pytest.approx(-1.0)


def test_functionals_and_prox():
    q = ms.Functional.quadratic()
    assert q(3.0) == pytest.approx(4.5)
    assert q.slope([3.0]) == pytest.approx(3.0)
    assert q.prox(2.0, 1.0, 2.0) == pytest.approx([1.0])
    assert q.moreau_envelope(2.0, 1.0, 2.0) == pytest.approx(1.0)

    n = ms.Functional.norm_like()
    assert n.prox(2.0, 0.5, 2.0) == pytest.approx([1.5])
    assert n.moreau_envelope(2.0, 0.5, 2.0) == pytest.approx(1.75)

    nq = ms.Functional.from_dict({"functional": "negative_quadratic", "space": "euclidean", "dim": 1})
    assert nq.prox(2.0, 0.25, 1.0) == pytest.approx([4.0 / 3.0])
    with pytest.raises(ms.HypothesisError):
        nq.prox(2.0, 1.0, 1.0)


def test_tripod():
    d = ms.Functional.distance_to_point(1, 2.0)
    assert d.space == "tripod"
    assert d.distance((0, 2.0), (1, 3.0)) == pytest.approx(5.0)
    assert d((0, 1.0)) == pytest.approx(3.0)
    with pytest.raises(ms.Error):
        d((0, -1.0))


def test_solver_tracks_the_exact_flow():
    q = ms.Functional.quadratic()
    c = ms.solve(q, 2.0, 1.0, tau=1e-3, horizon=5.0)
    assert len(c) == 5001
    x = np.array([p[0] for p in c.points])
    assert np.max(np.abs(x - np.exp(-c.times))) <= 5e-3
    assert np.all(np.diff(c.f_values) <= 1e-12)


def test_transform_decay_to_p4():
    q = ms.Functional.quadratic()
    c = ms.oracle(q, 2.0, 1.0, ms.linspace(30.0, 30001))
    r = ms.transform(c, q, 2.0, 4.0)
    assert r.case == "D"
    assert r.S_star == pytest.approx(1.5, rel=1e-3)
    s = r.transformed.times
    x = np.array([p[0] for p in r.transformed.points])
    assert np.max(np.abs(x - np.clip(1.0 - 2.0 * s / 3.0, 0.0, None) ** 1.5)) <= 1e-4
    assert ms.verify_duality(c, r, q)["passed"]


def test_blowup_is_blocked_and_refusal_raises():
    nq = ms.Functional.negative_quadratic()
    c = ms.oracle(nq, 2.0, 1.0, ms.linspace(10.0, 10001))
    r = ms.transform(c, nq, 2.0, 1.5)
    assert r.blocked
    assert r.S_star == pytest.approx(1.0, rel=1e-3)
    assert math.isinf(r.t_star)
    with pytest.raises(ms.HypothesisError):
        ms.transform(c, nq, 2.0, 3.0)


def test_horizon_and_curve_round_trip(tmp_path):
    n = ms.Functional.norm_like()
    c = ms.oracle(n, 2.0, 1.0, ms.linspace(2.0, 201))
    h = ms.positivity_horizon(c, n)
    assert h["t_star"] == pytest.approx(1.0)
    assert h["stopped"]
    assert np.allclose(ms.metric_derivative(c)[:50], 1.0)
    back = ms.Curve.from_dict(c.to_dict())
    assert np.array_equal(back.times, c.times)
    c.write(n, str(tmp_path / "c.csv"))
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == "t,x0,f,slope,metric_derivative"


def test_run_experiment(tmp_path):
    config = {
        "name": "smoke",
        "functional": {"functional": "quadratic", "space": "euclidean", "dim": 1},
        "p": 2.0,
        "p_prime": [4.0],
        "initial_point": {"space": "euclidean", "coords": [1.0]},
        "solver": {"tau": 1e-3, "horizon": 20.0},
        "output_dir": str(tmp_path),
    }
    report = ms.run_experiment(config)
    assert report["exit_code"] == 0
    assert report["status"] == "pass"
    assert (tmp_path / "reports.json").exists()
    with pytest.raises(ms.Error):
        ms.run_experiment({**config, "unknown_key": 1})
    with pytest.raises(ms.Error):
        ms.reproduce("no_such_example", str(tmp_path / "x"))
    assert "quadratic_family" in ms.example_names()
