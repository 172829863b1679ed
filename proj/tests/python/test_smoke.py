import math

import pytest

import cliplab

MINIMAL = """
[experiment]
id = py_smoke
algorithm = smd
seeds = 8
T = 64
T_grid = 16, 32, 64, 128

[problem]
kind = quadratic
dim = 2

[noise]
kind = two_point
p = 1.5
sigma = 0.5
q = 0.1

[schedule]
mode = smd_known_T
delta = 0.1
"""


def test_clip_and_geometry():
    assert cliplab.clip([3, 4], 2.5) == pytest.approx([1.5, 2.0])
    assert cliplab.clip([0, 0], 0.1) == [0, 0]
    g = cliplab.Geometry.simplex(2)
    assert g.mirror_step([0.5, 0.5], [1, 0], math.log(2)) == pytest.approx([1 / 3, 2 / 3])
    assert g.bregman([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2))
    b = cliplab.Geometry.ball(1.0, [0, 0])
    assert b.mirror_step([0.8, 0], [-1, 0], 1.0) == pytest.approx([1, 0])


def test_errors_map_to_value_error():
    with pytest.raises(ValueError, match="p-th moment would be infinite"):
        cliplab.make_radial_pareto(1.5, 1.0, 1.5)
    with pytest.raises(ValueError, match="noise.p"):
        cliplab.parse_config(MINIMAL, ["noise.p=2.5"])


def test_noise_calibration():
    assert cliplab.make_two_point(1.5, 1.0, 0.01).scale == pytest.approx(100 ** (2 / 3))
    est = cliplab.moment_check(cliplab.make_two_point(2.0, 2.0, 1.0), 2, 1000)
    assert est.moment == 4.0


def test_schedule_example_and_bound():
    inp = cliplab.ScheduleInputs()
    inp.p, inp.sigma, inp.T, inp.delta = 2.0, 1.0, 26, 0.5
    s = cliplab.Schedule("smd_known_T", inp)
    assert s.params(1).lam == 26.0
    assert s.params(1).eta == pytest.approx(1 / 624)
    assert cliplab.theorem_bound(s, 26) == pytest.approx(48.0)
    assert cliplab.verify_proposition_conditions(s, 26).all_passed()


def test_run_is_reproducible():
    problem = cliplab.make_quadratic(2, [1, 1], [0, 0])
    noise = cliplab.make_two_point(1.5, 1.0, 0.05)
    inp = cliplab.ScheduleInputs()
    inp.p, inp.sigma, inp.T, inp.R1 = 1.5, 1.0, 200, 1.0
    sched = cliplab.Schedule("smd_known_T", inp)
    a = cliplab.run("smd", cliplab.Oracle(problem, noise, 3), sched, 200, [1, 0])
    b = cliplab.run("smd", cliplab.Oracle(problem, noise, 3), sched, 200, [1, 0])
    assert a.summary == b.summary
    assert a.final_iterate == b.final_iterate
    assert len(a.rows) == 200


def test_vanilla_matches_unclipped_without_noise():
    problem = cliplab.make_nonconvex_ratio(2)
    v = cliplab.run_vanilla_sgd(cliplab.Oracle(problem, cliplab.make_no_noise(), 1), 0.3, 50, [1, -1])
    c = cliplab.run("sgd", cliplab.Oracle(problem, cliplab.make_no_noise(), 1), cliplab.constant_steps(0.3), 50,
                    [1, -1])
    assert v.final_iterate == c.final_iterate


def test_config_round_trip_and_trials():
    cfg = cliplab.parse_config(MINIMAL)
    assert cliplab.parse_config(cliplab.serialize_config(cfg)) == cfg
    summary = cliplab.run_trials(cfg)
    assert summary.N == 8
    assert 0.0 <= summary.failure_rate <= 1.0
    assert summary.to_csv().startswith("# schema=1\r\n")
    fit = cliplab.fit_rate(cfg)
    assert fit.theoretical == pytest.approx(-1 / 3)
    assert math.isfinite(fit.slope)


def test_power_law_and_anytime_series():
    T = [10.0, 100.0, 1000.0, 10000.0]
    fit = cliplab.fit_power_law(T, [7 * t ** -0.5 for t in T])
    assert fit.slope == pytest.approx(-0.5)
    assert fit.r_squared == pytest.approx(1.0)
    assert cliplab.check_fact1(1) == 0.5
    assert cliplab.check_fact1(10 ** 6) < 1.0
    assert cliplab.p_label(1.25) == "p125"
