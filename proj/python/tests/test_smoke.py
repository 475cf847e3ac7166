import math
import os

import numpy as np
import pytest

import imcflab as im

SMALL = im.GridSpec(12, 24, 17)


def schw(m, r0):
    p = im.FamilyParams()
    p.kind = im.FamilyKind.schwarzschild
    p.m = m
    p.r0 = r0
    return p


def test_delta_closed_forms():
    T = 2 * math.log(2)
    d = im.build_delta(2.0, T, SMALL)
    H = d.H
    assert H.shape == (17, 12, 24)
    t = np.array([d.t(k) for k in range(17)])
    assert np.allclose(H[:, 3, 5], np.exp(-t / 2), rtol=0, atol=1e-14)
    assert abs(im.hawking_mass(d, 8)) < 1e-12
    assert im.euler_characteristic(d, 0) == pytest.approx(2, abs=1e-6)
    # radial segment of delta has length r0 (e^{T/2} - 1) = r0
    r = im.distance(d, (0.0, 1.0, 0.5), (T, 1.0, 0.5))
    assert r["distance"] == pytest.approx(2.0, abs=1e-6)


def test_schwarzschild_mass_and_gaps():
    f = im.family_field(schw(0.5, 3.0), 1.0, SMALL)
    assert f.rotsym
    for k in (0, 8, 16):
        assert im.hawking_mass(f, k) == pytest.approx(0.5, abs=1e-8)
    gaps = im.gotozero_gaps(schw(0.5, 3.0), 1.0, SMALL)
    # leaf 0: H^2 = 4(1 - 2m/r0)/r0^2 on area 4 pi r0^2, so the gap to 16 pi is 32 pi m / r0
    assert gaps["H2"] == pytest.approx(32 * math.pi * 0.5 / 3.0, rel=1e-6)


def test_field_roundtrip(tmp_path):
    d = im.build_delta(1.0, 1.0, SMALL)
    path = str(tmp_path / "d.field")
    im.save_field(d, path)
    back = im.load_field(path)
    assert np.array_equal(back.H, d.H)
    assert im.l2_metric_gap(d, back, 0.0, 1.0) == 0


def test_bad_inputs_raise():
    with pytest.raises(ValueError):
        im.parse_config("[family]\nbogus = 1\n")
    with pytest.raises(ValueError):
        im.family_field(schw(2.0, 1.0), 1.0, SMALL)


def test_sequence_report():
    path = os.path.join(os.environ.get("IMCFLAB_CONFIG_DIR", "configs"), "schwarzschild_sequence.ini")
    c = im.load_config(path)
    c.members = 3
    c.grid = im.GridSpec(12, 24, 33)
    c.random_points = 2
    c.jobs = 2
    rep = im.run_sequence(c)
    rows = rep.rows
    assert [r["index"] for r in rows] == [1, 2, 3]
    for r in rows:
        assert r["hawking_mass_T"] == pytest.approx(r["parameter"], abs=1e-8)
    u = [r["uniform_distance"] for r in rows]
    assert u[0] > u[1] > u[2]
    assert im.report_from_json(rep.json()) == rep
    assert rep.csv().startswith("# name,")
    assert im.parse_config(c.to_ini()).to_ini() == c.to_ini()
