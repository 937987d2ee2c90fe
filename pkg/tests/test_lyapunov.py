import json

import numpy as np
import pytest

from regdual import (
    ShapeError,
    SpaceSpec,
    audit_lemma_ball,
    audit_phi_bounds,
    audit_three_point,
    audit_vp_shift,
    phi,
    phi_p,
    run_audit,
    v_p,
)
from regdual.geometry import lp_norm
from regdual.lyapunov import (
    INEQUALITIES,
    lemma_ball_margin,
    sample_ball,
    three_point_margin,
    vp_shift_margin,
)


def test_phi_examples():
    sp = SpaceSpec(2)
    assert phi(sp.point([1, 0]), sp.point([0, 1])) == pytest.approx(2.0)
    sp3 = SpaceSpec(2, 3.0)
    assert phi(sp3.point([1, 1]), sp3.point([1, 0])) == pytest.approx(2 ** (2 / 3) - 1, abs=1e-12)
    x = sp3.point([0.3, -1.2])
    assert phi(x, x) == pytest.approx(0.0, abs=1e-12)


def test_phi_uses_gauge_two_regardless_of_space_gauge():
    sp = SpaceSpec(2, 3.0, 1.5)
    x = sp.point([1, 1])
    y = sp.point([1, 0])
    assert phi(x, y) == pytest.approx(2 ** (2 / 3) - 1, abs=1e-12)


def test_phi_p_examples():
    assert phi_p(SpaceSpec(2).point([1, 0]), SpaceSpec(2).point([0, 1])) == pytest.approx(2.0)
    sp = SpaceSpec(2, 2.0, 1.5)
    x = sp.point([0.5, 0.0])
    expected = 0.5 * 0.125 - 1.5 * 0.5 ** 1.5 + 0.5 ** 1.5
    assert phi_p(x, x) == pytest.approx(expected, abs=1e-14)
    assert phi_p(x, x) == pytest.approx(-0.114277, abs=1e-6)
    z = sp.point([0, 0])
    assert phi_p(z, z) == 0.0


def test_v_p_examples():
    sp = SpaceSpec(2)
    assert v_p(sp.point([1, 0]), sp.dual_point([0, 1])) == pytest.approx(2.0)
    sp3 = SpaceSpec(2, 3.0, 2.0)
    x = sp3.point([1, 1])
    f = sp3.dual_point(sp3.J(np.array([1.0, 0.0])))
    assert v_p(x, f) == pytest.approx(phi_p(x, sp3.point([1, 0])), abs=1e-12)
    assert v_p(x, f) == pytest.approx(0.587401, abs=1e-6)
    spq = SpaceSpec(3, 1.5, 1.5)
    g = spq.dual_point([0.2, -0.7, 1.1])
    assert v_p(spq.point(np.zeros(3)), g) == pytest.approx(lp_norm(g.coords, spq.s_conj) ** 1.5)


def test_v_p_matches_phi_p_through_inverse_map_for_gauge_two():
    rng = np.random.default_rng(3)
    for s in (1.5, 2.0, 3.0):
        sp = SpaceSpec(3, s, 2.0)
        x, y = rng.normal(size=(2, 3))
        f = sp.dual_point(sp.J(y))
        assert v_p(sp.point(x), f) == pytest.approx(phi_p(sp.point(x), sp.point(y)), rel=1e-10)


def test_v_p_other_gauges_differ_by_last_term():
    rng = np.random.default_rng(4)
    sp = SpaceSpec(3, 3.0, 1.5)
    x, y = rng.normal(size=(2, 3))
    f = sp.dual_point(sp.J(y))
    ny = lp_norm(y, 3.0)
    gap = v_p(sp.point(x), f) - phi_p(sp.point(x), sp.point(y))
    assert gap == pytest.approx(ny ** (1.5 * 0.5) - ny ** 1.5, rel=1e-10)


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        phi_p(SpaceSpec(2).point([1, 0]), SpaceSpec(3).point([1, 0, 0]))
    with pytest.raises(ShapeError):
        v_p(SpaceSpec(2).point([1, 0]), SpaceSpec(3).dual_point([1, 0, 0]))


def test_hilbert_margin_examples():
    sp = SpaceSpec(2)
    assert vp_shift_margin(sp, np.zeros(2), np.array([1.0, 0]), np.array([0, 2.0])) == pytest.approx(4.0)
    assert three_point_margin(sp, np.array([1.0, 0]), np.zeros(2), np.array([0, 1.0])) == pytest.approx(2.0)
    assert lemma_ball_margin(sp, np.zeros(2), np.zeros(2)) == 0.0
    x = np.array([0.3, 0.4])
    assert three_point_margin(sp, x, np.array([1.0, -1.0]), x) == pytest.approx(0.0, abs=1e-15)
    assert vp_shift_margin(sp, x, np.array([1.0, 2.0]), np.zeros(2)) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("s", [1.5, 2.0, 3.0])
def test_no_violations_for_gauge_two(s):
    sp = SpaceSpec(3, s, 2.0)
    for rep in run_audit(sp, "all", 10_000, seed=11):
        assert rep.violations == 0
        assert rep.worst_margin == 0.0


def test_lemma_ball_in_unit_ball_l3():
    rep = audit_lemma_ball(SpaceSpec(4, 3.0, 2.0), 1.0, 10_000, seed=5)
    assert rep.violations == 0


def test_gauge_below_two_fixtures_flagged():
    sp = SpaceSpec(1, 2.0, 1.5)
    pb = audit_phi_bounds(sp, 50, seed=0)
    assert pb.violations >= 1
    assert pb.fixtures[0]["violated"]
    assert pb.worst_margin <= pb.fixtures[0]["margin"]
    tp = audit_three_point(sp, 50, seed=0)
    assert tp.fixtures[0]["lhs"] == pytest.approx(-1.890969, abs=1e-6)
    assert tp.fixtures[0]["rhs"] == pytest.approx(-0.953511, abs=1e-6)
    assert tp.witness["margin"] <= tp.fixtures[0]["margin"]


def test_audits_are_deterministic():
    sp = SpaceSpec(3, 3.0, 1.5)
    a = [r.to_json() for r in run_audit(sp, "all", 5000, seed=9)]
    b = [r.to_json() for r in run_audit(sp, "all", 5000, seed=9)]
    assert json.dumps(a) == json.dumps(b)
    c = [r.to_json() for r in run_audit(sp, "all", 5000, seed=10)]
    assert json.dumps(a) != json.dumps(c)


def test_sample_stream_is_prefix_stable():
    # block-wise substreams: a longer run extends a shorter one
    sp = SpaceSpec(2, 3.0, 2.0)
    short = audit_vp_shift(sp, 100, seed=4)
    long = audit_vp_shift(sp, 9000, seed=4)
    assert short.samples == 100 and long.samples == 9000
    assert long.witness["margin"] <= short.witness["margin"]


def test_report_json_schema():
    (rep,) = run_audit(SpaceSpec(2), "phi_bounds", 100, seed=1)
    d = rep.to_json()
    for key in ("inequality", "samples", "violations", "worst_margin", "witness", "seed"):
        assert key in d
    json.dumps(d, allow_nan=False)


def test_run_audit_names():
    assert len(run_audit(SpaceSpec(2), "all", 10)) == len(INEQUALITIES)
    with pytest.raises(KeyError):
        run_audit(SpaceSpec(2), "lemma9", 10)


def test_sample_ball_stays_inside():
    rng = np.random.default_rng(0)
    for s in (1.5, 2.0, 3.0):
        pts = sample_ball(rng, 5000, 4, s, 2.0)
        assert np.all(lp_norm(pts, s) <= 2.0 + 1e-12)
        assert np.max(lp_norm(pts, s)) > 1.8
