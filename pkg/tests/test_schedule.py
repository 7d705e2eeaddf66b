import json

import pytest

from emsched import ModelFlags, Schedule, ScheduleError, ScheduleSegment, parse_schedule, validate_schedule
from emsched.schedule import schedule_from_dict

from conftest import make_instance

Seg = ScheduleSegment


def sched(*segs, preempt=False, migrate=False, delays=True):
    return Schedule(tuple(Seg(*s) for s in segs), ModelFlags(preempt, migrate, delays))


def test_single_binding_task():
    inst = make_instance(1, m=1, E=1.0)
    rep = validate_schedule(inst, sched((0, 0, 0.0, 1.0)))
    assert rep.feasible
    assert rep.makespan == 1.0
    assert rep.total_energy == pytest.approx(1.0)
    assert rep.violations == ()


def test_precedence_violation():
    inst = make_instance(2, [(0, 1)], E=100.0)
    rep = validate_schedule(inst, sched((0, 0, 0.0, 1.0), (1, 1, 0.5, 1.5)))
    assert not rep.feasible
    assert rep.tags() == {"precedence"}


def test_delay_violation():
    inst = make_instance(2, [(0, 1, 1.0)], E=100.0)
    rep = validate_schedule(inst, sched((0, 0, 0.0, 1.0), (1, 1, 1.5, 2.5)))
    assert rep.tags() == {"delay"}
    assert "1.5 < 1 + 1" in rep.violations[0][1]
    # paying the full delay, or staying on the processor, is fine
    assert validate_schedule(inst, sched((0, 0, 0.0, 1.0), (1, 1, 2.0, 3.0))).feasible
    assert validate_schedule(inst, sched((0, 0, 0.0, 1.0), (1, 0, 1.0, 2.0))).feasible
    # and delays are ignored when the flags say so
    assert validate_schedule(inst, sched((0, 0, 0.0, 1.0), (1, 1, 1.5, 2.5), delays=False)).feasible


def test_co_occurrence_is_open_interval():
    inst = make_instance(2, E=100.0)
    touching = sched((0, 0, 0.0, 1.0), (1, 0, 1.0, 2.0))
    assert validate_schedule(inst, touching).feasible
    overlapping = sched((0, 0, 0.0, 1.0), (1, 0, 0.9, 2.0))
    assert validate_schedule(inst, overlapping).tags() == {"co-occurrence"}


def test_energy_violation():
    inst = make_instance(2, E=1.5)
    rep = validate_schedule(inst, sched((0, 0, 0.0, 1.0), (1, 1, 0.0, 1.0)))
    assert rep.tags() == {"energy"}
    assert rep.total_energy == pytest.approx(2.0)
    # the budget tolerance is absolute 1e-6
    assert validate_schedule(make_instance(2, E=2.0 - 5e-7), sched((0, 0, 0, 1), (1, 1, 0, 1))).feasible


def test_rho_bound_violation():
    inst = make_instance(2, [(0, 1, 0.5)], E=100.0, rho=4.0)
    rep = validate_schedule(inst, sched((0, 0, 0.0, 1.0), (1, 0, 1.0, 3.0)))
    assert rep.tags() == {"rho-bound"}
    assert "task 0" in rep.violations[0][1]


def test_model_and_coverage_tags():
    inst = make_instance(2, E=100.0)
    split = sched((0, 0, 0.0, 1.0), (0, 0, 2.0, 3.0), (1, 1, 0.0, 1.0))
    assert validate_schedule(inst, split).tags() == {"model"}
    moved = sched((0, 0, 0.0, 1.0), (0, 1, 2.0, 3.0), (1, 1, 0.0, 1.0), preempt=True)
    assert validate_schedule(inst, moved).tags() == {"model"}
    ok = sched((0, 0, 0.0, 1.0), (0, 1, 2.0, 3.0), (1, 1, 0.0, 1.0), preempt=True, migrate=True)
    assert validate_schedule(inst, ok).feasible
    assert validate_schedule(inst, sched((0, 0, 0.0, 1.0))).tags() == {"coverage"}


def test_unknown_task_raises():
    with pytest.raises(ScheduleError):
        validate_schedule(make_instance(1, E=1.0), sched((3, 0, 0.0, 1.0)))


def test_segment_must_have_positive_length():
    with pytest.raises(ScheduleError):
        sched((0, 0, 1.0, 1.0))


def test_empty_schedule():
    s = Schedule()
    assert s.makespan == 0.0
    rep = validate_schedule(make_instance(0, E=0.0), s)
    assert rep.feasible and rep.makespan == 0.0 and rep.total_energy == 0.0


def test_energy_invariant_under_split():
    inst = make_instance(1, E=10.0)
    whole = sched((0, 0, 0.0, 2.0))
    halves = sched((0, 0, 0.0, 0.7), (0, 0, 0.7, 2.0), preempt=True)
    assert whole.energy(inst) == pytest.approx(halves.energy(inst), rel=1e-15)


def test_json_round_trip():
    s = sched((0, 0, 0.0, 1.0), (1, 1, 0.25, 2.0), preempt=True)
    inst = make_instance(2, E=10.0)
    doc = json.loads(s.dumps(inst))
    assert set(doc) == {"segments", "flags", "makespan", "energy"}
    assert doc["flags"] == {"preemption": True, "migration": False, "delays": True}
    # stored makespan and energy are ignored on reading
    doc["makespan"] = 99.0
    assert schedule_from_dict(doc) == s
    assert parse_schedule(json.dumps(doc)) == s


def test_bad_schedule_text():
    with pytest.raises(ScheduleError, match="syntax error"):
        parse_schedule("{")
    with pytest.raises(ScheduleError, match="malformed"):
        parse_schedule('{"segments": [{"task": 0}]}')


def test_report_formats():
    inst = make_instance(2, [(0, 1)], E=100.0)
    rep = validate_schedule(inst, sched((0, 0, 0.0, 1.0), (1, 1, 0.5, 1.5)))
    text = str(rep)
    assert text.startswith("feasible: no")
    assert "violation [precedence]" in text
    assert rep.to_dict()["violations"][0]["constraint"] == "precedence"
