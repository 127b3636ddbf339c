"""Three-beam lattice geometry invariants and scale checks."""

import json
import math

import numpy as np
import pytest

from magictrap.lattice import (
    COS_THETA0,
    BeamConfig,
    LatticePlan,
    SeparationOfScalesError,
    plan_paper_lattice,
    plan_to_json,
    validate_plan,
)

NU_A = 275e12          # ~1090 nm
DELTAS = (80e6, 160e6)
F_MOT = 25e3


def canonical():
    return plan_paper_lattice(NU_A, DELTAS[0], DELTAS[1], F_MOT)


def test_canonical_plan_is_valid():
    assert validate_plan(canonical()) == []


def test_magic_tilt_exact():
    for b in canonical().beams:
        assert abs(abs(b.eps[2]) - 1.0 / math.sqrt(3.0)) <= 1e-15


def test_transversality_and_units():
    for b in canonical().beams:
        assert abs(np.dot(b.k, b.eps)) <= 1e-15
        assert np.dot(b.k, b.k) == pytest.approx(1.0, abs=1e-15)
        assert np.dot(b.eps, b.eps) == pytest.approx(1.0, abs=1e-15)


def test_k_vectors_mutually_orthogonal():
    beams = canonical().beams
    for i in range(3):
        for j in range(i + 1, 3):
            assert abs(np.dot(beams[i].k, beams[j].k)) <= 1e-15


def test_frequency_offsets():
    plan = canonical()
    a, b, c = plan.beams
    assert a.delta_hz == 0.0
    assert b.nu_hz - a.nu_hz == pytest.approx(DELTAS[0], rel=1e-15)
    assert c.nu_hz - a.nu_hz == pytest.approx(DELTAS[1], rel=1e-15)


def test_equal_offsets_rejected():
    with pytest.raises(SeparationOfScalesError) as exc:
        plan_paper_lattice(NU_A, 80e6, 80e6, F_MOT)
    assert "delta_b - delta_c" in str(exc.value) or "beat" in str(exc.value)


def test_offsets_too_close_rejected():
    # |delta_b - delta_c| = 1 MHz < 100 x 25 kHz
    with pytest.raises(SeparationOfScalesError):
        plan_paper_lattice(NU_A, 80e6, 81e6, F_MOT)


def test_slow_offsets_rejected():
    with pytest.raises(SeparationOfScalesError) as exc:
        plan_paper_lattice(NU_A, 1e6, 2e6, 25e3)
    assert "f_mot" in str(exc.value)


def test_offsets_comparable_to_carrier_rejected():
    with pytest.raises(SeparationOfScalesError) as exc:
        plan_paper_lattice(1e9, 80e6, 160e6, 25e3)
    assert "nu" in str(exc.value)


def test_ratio_threshold_is_adjustable():
    # 10x hierarchy passes with ratio 10 but not with the default 100
    plan = plan_paper_lattice(NU_A, 0.5e6, 1.0e6, 25e3, ratio_threshold=10.0)
    assert validate_plan(plan) == []
    with pytest.raises(SeparationOfScalesError):
        plan_paper_lattice(NU_A, 0.5e6, 1.0e6, 25e3, ratio_threshold=100.0)


def _broken_plan(**overrides):
    base = canonical()
    beams = list(base.beams)
    if "eps_a" in overrides:
        b = beams[0]
        beams[0] = BeamConfig(b.name, b.k_hat, overrides["eps_a"], b.nu_hz, b.delta_hz)
    if "k_b" in overrides:
        b = beams[1]
        beams[1] = BeamConfig(b.name, overrides["k_b"], b.eps_hat, b.nu_hz, b.delta_hz)
    if "nu_b" in overrides:
        b = beams[1]
        beams[1] = BeamConfig(b.name, b.k_hat, b.eps_hat, overrides["nu_b"], b.delta_hz)
    return LatticePlan(beams=tuple(beams), f_mot_hz=base.f_mot_hz,
                       ratio_threshold=base.ratio_threshold)


def test_validate_detects_wrong_tilt():
    plan = _broken_plan(eps_a=(1.0, 0.0, 0.0))
    problems = validate_plan(plan)
    assert any("magic-angle" in p for p in problems)


def test_validate_detects_non_unit_vector():
    plan = _broken_plan(eps_a=(0.5, 0.0, 0.5))
    problems = validate_plan(plan)
    assert any("unit length" in p for p in problems)


def test_validate_detects_non_orthogonal_k():
    plan = _broken_plan(k_b=(0.0, 1.0, 0.0))
    problems = validate_plan(plan)
    assert any("orthogonal" in p for p in problems)


def test_validate_detects_frequency_mismatch():
    plan = _broken_plan(nu_b=NU_A + 999e6)
    problems = validate_plan(plan)
    assert any("nu - nu_ref" in p for p in problems)


def test_validate_detects_scale_violations_without_raising():
    beams = canonical().beams
    plan = LatticePlan(beams=beams, f_mot_hz=5e6)   # motional band above the beats
    problems = validate_plan(plan)
    assert any("f_mot" in p for p in problems)


def test_json_document():
    doc = json.loads(plan_to_json(canonical()))
    assert doc["violations"] == []
    assert doc["cos_theta0"] == pytest.approx(COS_THETA0, rel=1e-15)
    assert len(doc["beams"]) == 3
    for beam in doc["beams"]:
        assert beam["eps_dot_z"] == pytest.approx(COS_THETA0, abs=1e-15)
    assert doc["min_beat_hz"] == pytest.approx(80e6, rel=1e-12)
    names = [b["name"] for b in doc["beams"]]
    assert names == ["a", "b", "c"]
