import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_set
from emrotmatch.edgecurrent import CurrentSet, EdgeParams, extract_currents
from emrotmatch.emfield import (
    SceneConfig,
    field_at,
    force_field,
    force_on_element,
    moment_of_force,
    pairwise_forces,
    total_moment,
    write_force_csv,
)
from emrotmatch.raster import rotate


def cs(points, vecs, z=0.0, center=(0.0, 0.0)):
    return CurrentSet(points, vecs, z=z, center=center)


def brute_forces(set1, set2, A=1.0, eps=1e-6):
    """Flat double loop over all pairs with explicit 3-vector cross products."""
    out = np.zeros((len(set1), 2))
    for j in range(len(set1)):
        p1 = np.array([*set1.positions[j], set1.z])
        t1 = np.array([*set1.vectors[j], 0.0])
        for k in range(len(set2)):
            r = p1 - np.array([*set2.positions[k], set2.z])
            n = np.linalg.norm(r)
            if n < eps:
                continue
            t2 = np.array([*set2.vectors[k], 0.0])
            f = A * np.cross(t1, np.cross(t2, r)) / n**3
            out[j] += f[:2]
    return out


def test_field_examples():
    empty = cs(np.zeros((0, 2)), np.zeros((0, 2)))
    np.testing.assert_array_equal(field_at((1, 2, 3), empty), [0, 0, 0])
    one = cs([[0.0, 0.0]], [[1.0, 0.0]])
    np.testing.assert_allclose(field_at((0, 0, 1), one), [0, -1, 0])
    np.testing.assert_allclose(field_at((0, 0, 1), one, SceneConfig(force_constant=3.0)), [0, -3, 0])
    np.testing.assert_array_equal(field_at((4, 0, 0), one), [0, 0, 0])
    np.testing.assert_array_equal(field_at((0, 0, 0), one), [0, 0, 0])


def test_force_examples():
    s1 = cs([[1.0, 0.0]], [[0.0, 1.0]])
    s2 = cs([[0.0, 0.0]], [[0.0, 1.0]])
    assert force_on_element(s1, 0, s2).force == (-1.0, 0.0)
    up = cs([[0.0, 0.0]], [[1.0, 0.0]], z=5.0)
    down = cs([[0.0, 0.0]], [[1.0, 0.0]], z=0.0)
    assert force_on_element(up, 0, down, SceneConfig(z_separation=5.0)).force == (0.0, 0.0)
    empty = cs(np.zeros((0, 2)), np.zeros((0, 2)))
    assert force_on_element(s1, 0, empty).force == (0.0, 0.0)


def test_plane_mismatch_rejected():
    s1 = cs([[1.0, 0.0]], [[0.0, 1.0]], z=3.0)
    s2 = cs([[0.0, 0.0]], [[0.0, 1.0]])
    with pytest.raises(ValueError):
        pairwise_forces(s1, s2, SceneConfig(z_separation=0.0))


def test_singleton_field_matches_element():
    rng = np.random.default_rng(0)
    s2 = random_set(rng, 12)
    s1 = random_set(rng, 1)
    assert force_field(s1, s2)[0].force == force_on_element(s1, 0, s2).force


@pytest.mark.parametrize("d", [0.0, 2.5])
def test_matches_brute_force(d):
    rng = np.random.default_rng(11)
    for _ in range(20):
        s1 = random_set(rng, int(rng.integers(1, 30)), z=d)
        s2 = random_set(rng, int(rng.integers(1, 30)))
        cfg = SceneConfig(z_separation=d)
        np.testing.assert_allclose(pairwise_forces(s1, s2, cfg), brute_forces(s1, s2), rtol=1e-9, atol=1e-12)


def test_moment_examples():
    assert moment_of_force((3, 4), (5, 6), (3, 4)) == 0
    assert moment_of_force((1, 0), (0, 1), (0, 0)) == 1
    assert moment_of_force((0, 1), (1, 0), (0, 0)) == -1


def test_total_is_sum_of_parts():
    rng = np.random.default_rng(5)
    s1, s2 = random_set(rng, 40), random_set(rng, 35)
    res = total_moment(s1, s2)
    assert res.total == pytest.approx(math.fsum(res.per_element), rel=1e-9)
    empty = cs(np.zeros((0, 2)), np.zeros((0, 2)))
    assert total_moment(empty, s2).total == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([0.25, 0.5, 2.0, 8.0]), st.floats(0.1, 10.0))
def test_bilinear(seed, pow2, s):
    rng = np.random.default_rng(seed)
    s1, s2 = random_set(rng, 15), random_set(rng, 15)
    base = total_moment(s1, s2)
    # powers of two scale without rounding
    assert total_moment(s1, s2.scaled(pow2)).total == base.total * pow2
    assert total_moment(s1.scaled(pow2), s2).total == base.total * pow2
    np.testing.assert_allclose(total_moment(s1, s2.scaled(s)).forces, base.forces * s, rtol=1e-12, atol=1e-300)
    assert np.sign(total_moment(s1, s2, SceneConfig(force_constant=s)).total) == np.sign(base.total)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([0.0, 1.0, 10.0]))
def test_mirror_antisymmetry(seed, d):
    rng = np.random.default_rng(seed)
    s1, s2 = random_set(rng, 20, z=d), random_set(rng, 20)
    cfg = SceneConfig(z_separation=d)
    a = total_moment(s1, s2, cfg).total
    b = total_moment(s1.mirrored(), s2.mirrored(), cfg).total
    assert b == pytest.approx(-a, rel=1e-9, abs=1e-12 * abs(a) + 1e-300)


def test_symmetric_null(centered_rect):
    a = extract_currents(centered_rect)
    r = total_moment(a.with_z(10.0), a, SceneConfig(z_separation=10.0))
    assert abs(r.total) < 1e-6 * r.abs_sum


def test_parallel_wires_attract():
    xs = np.arange(10.0)
    top = cs(np.column_stack([xs, np.zeros(10)]), np.tile([1.0, 0.0], (10, 1)))
    bottom = cs(np.column_stack([xs, np.full(10, 3.0)]), np.tile([1.0, 0.0], (10, 1)))
    f_top = pairwise_forces(top, bottom)
    f_bottom = pairwise_forces(bottom, top)
    assert (f_top[:, 1] > 0).all() and (f_bottom[:, 1] < 0).all()


def test_coincident_pair_skipped():
    rng = np.random.default_rng(9)
    s1, s2 = random_set(rng, 6), random_set(rng, 5)
    extra = CurrentSet(np.vstack([s2.positions, s1.positions[2]]), np.vstack([s2.vectors, [3.0, -4.0]]),
                       center=s2.center)
    before = force_on_element(s1, 2, s2).force
    after = force_on_element(s1, 2, extra).force
    assert after == pytest.approx(before, rel=1e-12)
    assert np.isfinite(pairwise_forces(s1, extra)).all()
    assert np.isfinite(pairwise_forces(s1, s1)).all()


@pytest.mark.parametrize("angle", [30.0, 45.0])
def test_rotated_rectangle_restoring(centered_rect, angle):
    ref = extract_currents(centered_rect)
    cur = extract_currents(rotate(centered_rect, angle))
    res = total_moment(cur, ref)
    assert res.total < 0
    # counterclockwise contributions outweigh clockwise ones
    per = res.per_element
    assert -per[per < 0].sum() > per[per > 0].sum()


def test_parallel_mode_agrees():
    rng = np.random.default_rng(2)
    s1, s2 = random_set(rng, 700, extent=60), random_set(rng, 500, extent=60)
    det = total_moment(s1, s2)
    par = total_moment(s1, s2, SceneConfig(deterministic=False, threads=4))
    np.testing.assert_array_equal(par.per_element, det.per_element)
    assert par.total == pytest.approx(det.total, rel=1e-6)


def test_force_csv(tmp_path, centered_rect):
    ref = extract_currents(centered_rect, EdgeParams(quantize_directions=False))
    cur = extract_currents(rotate(centered_rect, 30.0), EdgeParams(quantize_directions=False))
    res = total_moment(cur, ref)
    p = tmp_path / "f.csv"
    write_force_csv(cur, res, p)
    rows = p.read_text().splitlines()
    assert rows[0] == "x,y,tx,ty,fx,fy,moment"
    assert len(rows) == len(cur) + 1
    assert float(rows[1].split(",")[-1]) == res.per_element[0]
