from dataclasses import replace

import numpy as np
import pytest

import emsched.comm_delay as cd
from emsched import (
    BoundViolated,
    InstanceError,
    ModelFlags,
    RoundedAssignment,
    Schedule,
    ScheduleError,
    ScheduleSegment,
    beta,
    compress_to_m,
    integral_solution_to_schedule,
    large_delay_schedule,
    residuals,
    round_indicators,
    schedule_to_program4,
    small_delay_m,
    small_delay_unlimited,
    solve_program1,
    solve_program4_relaxed,
    unlimited_schedule,
    validate_schedule,
)
from emsched.comm_delay import compression_bound, rounded_schedule, scaled_instance, stretch_delays
from emsched.generate import random_instance
from emsched.solver import Program4Solution

from conftest import make_instance

Seg = ScheduleSegment


def test_beta_values():
    assert beta(1.0) == pytest.approx(4 / 3)
    assert beta(2.0) == pytest.approx(6 / 5)
    assert beta(1e9) == pytest.approx(1.0)


@pytest.mark.parametrize("x, expected", [(0.6, 1), (0.5, 0), (0.2, 0), (1.0, 1), (0.0, 0)])
def test_rounding_threshold(x, expected):
    sol = Program4Solution(1.0, [0.0, 0.5], [0.5, 0.5], {(0, 1): x})
    assert round_indicators(sol).xhat == {(0, 1): expected}


def test_rounded_assignment_uniqueness():
    with pytest.raises(ValueError, match="two rounded indicators"):
        RoundedAssignment({(0, 1): 1, (0, 2): 1})
    with pytest.raises(ValueError, match="two rounded indicators"):
        RoundedAssignment({(0, 2): 1, (1, 2): 1})
    a = RoundedAssignment({(0, 1): 1, (1, 2): 0, (2, 3): 1})
    assert a.successor(0) == 1 and a.predecessor(1) == 0
    assert a.successor(1) is None and a.predecessor(3) == 2


# -- integral conversions ----------------------------------------------------


def test_integral_edge_kept_on_processor():
    inst = make_instance(2, [(0, 1, 0.5)], m=2, E=2.0, rho=1.0)
    s = integral_solution_to_schedule(Program4Solution(2.0, [0.0, 1.0], [1.0, 1.0], {(0, 1): 1.0}), inst)
    assert s.processor(0) == s.processor(1)
    assert s.start(1) == s.finish(0)
    assert validate_schedule(inst, s).feasible


def test_integral_edge_split_pays_delay():
    inst = make_instance(2, [(0, 1, 0.5)], m=2, E=2.0, rho=1.0)
    s = integral_solution_to_schedule(Program4Solution(2.5, [0.0, 1.5], [1.0, 1.0], {(0, 1): 0.0}), inst)
    assert s.processor(0) != s.processor(1)
    assert s.start(1) >= s.finish(0) + 0.5
    assert validate_schedule(inst, s).feasible


def test_integral_chain_processor_count():
    xs = [1.0, 0.0, 1.0, 0.0]
    inst = make_instance(5, [(j, j + 1, 0.25) for j in range(4)], m=5, E=50.0, rho=1.0)
    t, now = [], 0.0
    for j in range(5):
        t.append(now)
        now += 1.0 + (0.25 if j < 4 and xs[j] == 0.0 else 0.0)
    sol = Program4Solution(now, t, [1.0] * 5, {(j, j + 1): xs[j] for j in range(4)})
    s = integral_solution_to_schedule(sol, inst)
    assert s.processors_used == xs.count(0.0) + 1
    assert validate_schedule(inst, s).feasible


def test_integral_rejects_fractions():
    inst = make_instance(2, [(0, 1, 0.5)], E=2.0, rho=1.0)
    with pytest.raises(ValueError):
        integral_solution_to_schedule(Program4Solution(2.0, [0.0, 1.0], [1.0, 1.0], {(0, 1): 0.5}), inst)


def test_schedule_to_indicators():
    inst = make_instance(3, [(0, 1, 0.5), (0, 2, 0.5)], m=3, E=50.0, rho=1.0)
    s = Schedule((Seg(0, 0, 0.0, 1.0), Seg(1, 0, 1.2, 2.2), Seg(2, 1, 1.5, 2.5)))
    sol = schedule_to_program4(inst, s)
    # 1.2 < 1 + 0.5 on the same processor; 1.5 is exactly the delay on another
    assert sol.x == {(0, 1): 1.0, (0, 2): 0.0}
    assert sol.mu == 2.5
    assert max(residuals(sol, inst).values()) <= 1e-12


def test_schedule_to_indicators_errors():
    inst = make_instance(2, [(0, 1, 0.5)], m=2, E=50.0, rho=1.0)
    preempted = Schedule(
        (Seg(0, 0, 0.0, 0.5), Seg(0, 0, 0.6, 1.1), Seg(1, 0, 1.1, 2.1)), ModelFlags(True, False, True)
    )
    with pytest.raises(ScheduleError, match="preempted"):
        schedule_to_program4(inst, preempted)
    with pytest.raises(InstanceError, match="rho"):
        schedule_to_program4(replace(inst, rho=None), Schedule((Seg(0, 0, 0, 1), Seg(1, 0, 1, 2))))
    with pytest.raises(ScheduleError, match="infeasible"):
        schedule_to_program4(inst, Schedule((Seg(0, 0, 0, 1), Seg(1, 1, 1, 2))))


def test_integral_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        inst = random_instance(rng, n, m=n, max_delay=0.3, rho=1.0)
        relaxed = solve_program4_relaxed(inst)
        # any rounded, re-timed schedule is a feasible integral point
        s = rounded_schedule(inst, relaxed)
        sol = schedule_to_program4(inst, s)
        assert sol.is_integral()
        assert max(residuals(sol, inst).values()) <= 1e-9
        again = integral_solution_to_schedule(sol, inst)
        assert validate_schedule(inst, again).feasible
        assert again.makespan == pytest.approx(sol.mu, rel=1e-12)


# -- small delays ------------------------------------------------------------


def test_small_delay_single_edge_is_exact():
    inst = make_instance(2, [(0, 1, 1.0)], m=2, E=2.0, rho=1.0)
    s, cert = small_delay_unlimited(inst)
    assert s.processor(0) == s.processor(1)
    assert s.start(1) == pytest.approx(s.finish(0))
    assert cert.ratio == pytest.approx(1.0, rel=1e-5)
    assert cert.factor == pytest.approx(4 / 3)


def test_small_delay_zero_delays_matches_unlimited():
    inst = random_instance(np.random.default_rng(2), 6, m=2, rho=3.0)
    s, _ = small_delay_unlimited(inst)
    ref = unlimited_schedule(solve_program1(inst))
    assert s.makespan == pytest.approx(ref.makespan, rel=1e-5)


def test_small_delay_per_task_bound():
    rng = np.random.default_rng(3)
    for rho in (1.0, 2.0, 5.0):
        for _ in range(5):
            inst = random_instance(rng, 7, m=7, max_delay=0.4, rho=rho)
            relaxed = solve_program4_relaxed(inst)
            s, cert = small_delay_unlimited(inst, relaxation=relaxed)
            assert validate_schedule(inst, s).feasible
            b = beta(rho)
            for j in range(inst.n):
                assert s.start(j) <= b * relaxed.t[j] + 1e-6
            assert cert.holds
            assert np.allclose(s.durations(inst.n), relaxed.d, rtol=1e-12)


def test_small_delay_needs_rho():
    with pytest.raises(InstanceError):
        small_delay_unlimited(make_instance(2, [(0, 1, 0.5)], E=2.0))
    s, cert = small_delay_unlimited(make_instance(2, [(0, 1, 0.5)], E=2.0), rho=1.0)
    assert cert.holds


# -- compression -------------------------------------------------------------


def test_compress_fitting_schedule_unchanged():
    inst = make_instance(2, m=2, E=100.0)
    s = Schedule((Seg(0, 0, 0.0, 1.0), Seg(1, 1, 0.0, 1.0)))
    assert compress_to_m(inst, s) is s


def test_compress_independent_unit_tasks():
    n, m = 5, 2
    inst = make_instance(n, m=m, E=100.0, rho=1.0)
    wide = Schedule(tuple(Seg(j, j, 0.0, 1.0) for j in range(n)))
    out = compress_to_m(inst, wide, m)
    assert out.processors_used == m
    assert out.makespan == 3.0  # ceil(5 / 2)
    assert out.makespan <= n / m + (1 - 1 / m) * 1.0
    assert compression_bound(inst, wide, m) == pytest.approx(3.0)


def test_compress_raises_when_target_missed(monkeypatch):
    inst = make_instance(3, m=2, E=100.0, rho=1.0)
    wide = Schedule(tuple(Seg(j, j, 0.0, 1.0) for j in range(3)))
    serial = Schedule(tuple(Seg(j, 0, float(j), j + 1.0) for j in range(3)))
    monkeypatch.setattr(cd, "_greedy_compress", lambda *a, **k: serial)
    with pytest.raises(BoundViolated):
        compress_to_m(inst, wide, 2)


def test_compress_random_keeps_durations():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = int(rng.choice([2, 3]))
        inst = random_instance(rng, 8, m=m, max_delay=0.3, rho=1.0)
        wide, _ = small_delay_unlimited(inst)
        out = compress_to_m(inst, wide, m)
        assert out.processors_used <= m
        assert validate_schedule(inst, out).feasible
        assert np.allclose(out.durations(inst.n), wide.durations(inst.n), rtol=1e-12)
        assert out.makespan <= compression_bound(inst, wide, m) + 1e-6


def test_small_delay_m_factors():
    inst = make_instance(3, [(0, 1, 0.2), (0, 2, 0.2)], m=3, E=9.0, rho=1.0)
    _, cert = small_delay_m(inst)
    assert cert.factor == pytest.approx(4 / 3)  # m >= n: no compression
    wide_inst = make_instance(6, m=2, E=6.0, rho=1.0)
    s, cert = small_delay_m(wide_inst)
    assert cert.factor == pytest.approx(5 / 3)
    assert s.processors_used <= 2
    assert cert.holds
    assert cert.algorithm == "small_delay_m"
    assert cert.to_dict() == {
        "lower_bound": cert.lower_bound,
        "factor": cert.factor,
        "achieved": cert.achieved,
        "algorithm": "small_delay_m",
    }


# -- large delays ------------------------------------------------------------


def test_scaled_instance_divides_delays():
    inst = make_instance(2, [(0, 1, 10.0)], E=2.0, R=5.0)
    small = scaled_instance(inst, 5.0)
    assert small.edges[0].delay == 2.0
    assert small.rho == 1.0


def test_large_delay_r1_matches_small_delay():
    inst = random_instance(np.random.default_rng(5), 6, m=6, max_delay=0.3, R=1.0)
    s_large, c_large = large_delay_schedule(inst)
    s_small, c_small = small_delay_unlimited(replace(inst, rho=1.0, R=None))
    assert s_large.segments == s_small.segments
    assert c_large.factor == pytest.approx(4 / 3)
    assert c_large.lower_bound == pytest.approx(c_small.lower_bound)


def test_large_delay_bound_and_monotone_reexpansion():
    rng = np.random.default_rng(6)
    for R in (2.0, 5.0):
        for _ in range(5):
            inst = random_instance(rng, 6, m=6, max_delay=1.5, R=R)
            small = scaled_instance(inst, R)
            sigma1, _ = small_delay_unlimited(small)
            sigma2 = stretch_delays(inst, sigma1)
            for j in range(inst.n):
                assert sigma2.start(j) >= sigma1.start(j) - 1e-12
                assert sigma2.processor(j) == sigma1.processor(j)
            s, cert = large_delay_schedule(inst)
            assert s.segments == sigma2.segments
            assert validate_schedule(inst, s).feasible
            assert cert.factor == pytest.approx(2 * (R + 1) / 3)
            assert cert.holds


def test_large_delay_needs_r():
    with pytest.raises(InstanceError):
        large_delay_schedule(make_instance(2, [(0, 1, 0.5)], E=2.0))
