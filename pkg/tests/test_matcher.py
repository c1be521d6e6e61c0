import numpy as np
import pytest

from conftest import circ_diff
from emrotmatch.analysis import sweep_moment_signs
from emrotmatch.edgecurrent import EdgeParams, EmptyCurrentSetError
from emrotmatch.emfield import SceneConfig
from emrotmatch.matcher import (
    LOCAL,
    ORIGIN,
    LocalBalanceError,
    MatchParams,
    NotConvergedError,
    estimate_rotation,
    match_rotation,
)
from emrotmatch.raster import GrayImage, rotate

CONT = EdgeParams(quantize_directions=False)


def check_legal(result, step):
    traj = result.trajectory
    for a, b in zip(traj, traj[1:]):
        move = (b.angle - a.angle + 180.0) % 360.0 - 180.0
        assert abs(abs(move) - step) < 1e-9
        # negative moment -> correction grows (visually counterclockwise turn of the working image)
        assert np.sign(move) == -a.sign


def test_identity_is_immediate(centered_rect):
    p = MatchParams(scene=SceneConfig(z_separation=5.0))
    res = match_rotation(centered_rect, centered_rect, p)
    assert res.converged and res.balance_kind == ORIGIN
    assert circ_diff(res.final_angle, 0.0) <= p.step
    assert len(res.trajectory) <= p.oscillation_window + 1


def test_ten_degrees(centered_rect):
    p = MatchParams()
    dist = sweep_moment_signs(centered_rect, p.sweep_params())
    assert dist.in_convergence(10.0)
    res = match_rotation(centered_rect, rotate(centered_rect, 10.0), p, reference=dist)
    assert res.converged and res.balance_kind == ORIGIN
    assert circ_diff(res.final_angle, 10.0) <= 2 * p.step
    check_legal(res, p.step)


def test_estimate_zero_and_counterclockwise(offset_rect):
    p = MatchParams(scene=SceneConfig(z_separation=10.0))
    est = estimate_rotation(offset_rect, offset_rect, p)
    assert est <= p.step or est >= 360.0 - p.step
    est = estimate_rotation(offset_rect, rotate(offset_rect, -15.0), p)
    assert circ_diff(est, 345.0) <= 2 * p.step


@pytest.mark.parametrize("start", [150.0, 195.0, 215.0])
def test_invalid_start_reaches_local_balance(offset_rect, start):
    p = MatchParams(edge_params=CONT)
    dist = sweep_moment_signs(offset_rect, p.sweep_params())
    assert not dist.in_convergence(start) and dist.oscillating_angles
    res = match_rotation(offset_rect, rotate(offset_rect, start), p, reference=dist)
    assert res.converged and res.balance_kind == LOCAL
    assert res.residual_angle == dist.drain_target(start)
    assert circ_diff(start - res.final_angle, dist.drain_target(start)) <= 2.0
    check_legal(res, p.step)
    with pytest.raises(LocalBalanceError) as exc:
        estimate_rotation(offset_rect, rotate(offset_rect, start), p, reference=dist)
    assert exc.value.result.balance_kind == LOCAL


def test_in_range_starts_reach_origin(offset_rect):
    p = MatchParams(edge_params=CONT, scene=SceneConfig(z_separation=10.0))
    dist = sweep_moment_signs(offset_rect, p.sweep_params())
    for start in (20.0, 110.0, 250.0, 340.0):
        assert dist.in_convergence(start)
        res = match_rotation(offset_rect, rotate(offset_rect, start), p, reference=dist)
        assert res.balance_kind == ORIGIN
        assert circ_diff(res.final_angle, start) <= 2 * p.step


def test_deterministic_and_pure(offset_rect):
    p = MatchParams(scene=SceneConfig(z_separation=10.0))
    moved = rotate(offset_rect, 40.0)
    a = match_rotation(offset_rect, moved, p)
    b = match_rotation(offset_rect, moved, p)
    assert a.trajectory == b.trajectory and a.final_angle == b.final_angle
    assert a.to_csv() == b.to_csv()
    # each step is a single rotation of the pristine input
    t = a.trajectory[7]
    from emrotmatch.analysis import reference_currents
    from emrotmatch.edgecurrent import extract_currents
    from emrotmatch.emfield import total_moment
    ref = reference_currents(offset_rect, p.sweep_params())
    cur = extract_currents(rotate(moved, -t.angle), z=10.0)
    assert total_moment(cur, ref, p.scene).total == t.moment


def test_not_converged(offset_rect):
    p = MatchParams(scene=SceneConfig(z_separation=10.0), max_iterations=5)
    res = match_rotation(offset_rect, rotate(offset_rect, 90.0), p)
    assert not res.converged and len(res.trajectory) == 5
    with pytest.raises(NotConvergedError) as exc:
        estimate_rotation(offset_rect, rotate(offset_rect, 90.0), p)
    assert len(exc.value.result.trajectory) == 5


def test_blank_rotated_fails(offset_rect):
    with pytest.raises(EmptyCurrentSetError):
        match_rotation(offset_rect, GrayImage(np.zeros((64, 64))))


def test_trajectory_csv(tmp_path, centered_rect):
    res = match_rotation(centered_rect, rotate(centered_rect, 6.0))
    p = tmp_path / "t.csv"
    res.write_csv(p)
    rows = p.read_text().splitlines()
    assert rows[0] == "iteration,angle_deg,moment,sign"
    assert len(rows) == len(res.trajectory) + 1


def test_param_validation():
    with pytest.raises(ValueError):
        MatchParams(step=0)
    with pytest.raises(ValueError):
        MatchParams(oscillation_window=1)
