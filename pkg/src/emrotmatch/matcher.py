"""Iterative moment-guided rotation matching.

Each iteration re-extracts the current of the working image, computes the
total moment the original exerts on it, and turns it by one step: a negative
moment turns it visually counterclockwise, a positive one clockwise. The
loop stops when the moment sign has alternated over the last
``oscillation_window`` iterations, when |moment| <= zero_band, or after
``max_iterations``.

The working image at cumulative correction c is always
``rotate(rotated, -c)`` computed from the untouched input, so no resampling
error accumulates along the trajectory. ``c`` is the running estimate of how
far ``rotated`` was turned clockwise away from ``original``.

A balance can be the true match (origin) or a local balance at one of the
original's oscillating angles. Which one is decided against the original's
own sign distribution: the final working image is compared with copies of
the original turned to 0 and to each oscillating angle.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional

import numpy as np

from .analysis import SignDistribution, SweepParams, reference_currents, sweep_moment_signs
from .edgecurrent import EdgeParams, EmptyCurrentSetError, extract_currents
from .emfield import SceneConfig, total_moment
from .raster import GrayImage, circle_mask, rotate

ORIGIN = "origin"
LOCAL = "local"


class MatchError(RuntimeError):
    """Raised by estimate_rotation when no trustworthy estimate exists."""

    def __init__(self, message: str, result: "MatchResult"):
        super().__init__(message)
        self.result = result


class NotConvergedError(MatchError):
    pass


class LocalBalanceError(MatchError):
    pass


@dataclass(frozen=True)
class MatchParams:
    step: float = 1.0
    max_iterations: int = 720
    oscillation_window: int = 4
    zero_band: float = 0.0
    scene: SceneConfig = SceneConfig()
    edge_params: EdgeParams = EdgeParams()
    fill: float = 0.0
    mask_circle: bool = False
    intervals: int = 120

    def __post_init__(self):
        if not 0 < self.step <= 90:
            raise ValueError("step must lie in (0, 90]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.oscillation_window < 2:
            raise ValueError("oscillation_window must be >= 2")

    def sweep_params(self) -> SweepParams:
        return SweepParams(
            intervals=self.intervals,
            scene=self.scene,
            zero_band=self.zero_band,
            edge_params=self.edge_params,
            fill=self.fill,
            mask_circle=self.mask_circle,
        )


class TrajectoryStep(NamedTuple):
    iteration: int
    angle: float
    moment: float
    sign: int


@dataclass(frozen=True)
class MatchResult:
    trajectory: List[TrajectoryStep]
    final_angle: float
    converged: bool
    balance_kind: Optional[str]
    residual_angle: Optional[float] = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "angle_deg", "moment", "sign"])
        for t in self.trajectory:
            w.writerow([t.iteration, f"{t.angle:g}", repr(float(t.moment)), t.sign])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())


def _alternating(signs: List[int]) -> bool:
    return all(a == -b and a != 0 for a, b in zip(signs, signs[1:]))


def _residual_error(a: GrayImage, b: GrayImage, mask: np.ndarray) -> float:
    return float(np.abs(a.pixels - b.pixels)[mask].mean())


def classify_balance(original: GrayImage, working: GrayImage, dist: SignDistribution,
                     fill: float = 0.0, resolution: float = 0.5, keep: int = 3) -> float:
    """Residual deviation of a balanced ``working`` image relative to ``original``.

    Mismatch is the mean absolute difference over the inscribed circle
    between ``working`` and the original turned by a candidate angle. All
    sampled sweep angles plus the oscillating angles are scored, the ``keep``
    best are refined over +/- one sweep step, and the winner is reported:
    0.0 for the origin, the matching oscillating angle when the winner lies
    within one sweep step of one, else the refined angle itself. Exact ties
    go to the origin (symmetric shapes).
    """
    mask = circle_mask(original.width, original.height)
    span = dist.step

    def mismatch(angle: float) -> float:
        return _residual_error(working, rotate(original, angle, fill), mask)

    coarse = sorted({0.0, *(a % 360.0 for a in dist.angles), *dist.oscillating_angles})
    scored = sorted((mismatch(a), a) for a in coarse)
    offsets = np.arange(-span, span + resolution / 2, resolution)
    refined = []
    for _, a in scored[:keep]:
        refined.append(min((mismatch(a + o), (a + o) % 360.0) for o in offsets))
    origin_err = min(mismatch(o) for o in offsets)
    err, angle = min(refined)
    if origin_err <= err * (1 + 1e-9) + 1e-12:
        return 0.0
    for osc in dist.oscillating_angles:
        if _angle_gap(angle, osc) <= span:
            return osc
    return 0.0 if _angle_gap(angle, 0.0) <= span else angle


def _angle_gap(a: float, b: float) -> float:
    g = abs(a - b) % 360.0
    return min(g, 360.0 - g)


def match_rotation(original: GrayImage, rotated: GrayImage, params: MatchParams = MatchParams(),
                   reference: Optional[SignDistribution] = None) -> MatchResult:
    """Turn ``rotated`` under the guidance of the total moment until it balances.

    ``reference`` is the original's sign distribution under the same
    parameters; it is computed when omitted and only used to classify the
    balance point.
    """
    if original.shape != rotated.shape:
        raise ValueError("images must share dimensions")
    sp = params.sweep_params()
    ref_set = reference_currents(original, sp)
    d = params.scene.z_separation
    cache: Dict[float, float] = {}

    def moment_at(correction: float) -> float:
        key = round(correction % 360.0, 9)
        if key not in cache:
            working = rotate(rotated, -correction, params.fill)
            cur = extract_currents(working, params.edge_params, z=d, mask_circle=params.mask_circle)
            if len(cur) == 0:
                raise EmptyCurrentSetError("empty current set in the rotated image", angle=-correction)
            cache[key] = total_moment(cur, ref_set, params.scene).total
        return cache[key]

    trajectory: List[TrajectoryStep] = []
    correction = 0.0
    converged = False
    final = correction
    w = params.oscillation_window
    for it in range(params.max_iterations):
        m = moment_at(correction)
        s = 0 if abs(m) <= params.zero_band else (1 if m > 0 else -1)
        trajectory.append(TrajectoryStep(it, correction % 360.0, m, s))
        if s == 0:
            converged, final = True, correction
            break
        if len(trajectory) >= w and _alternating([t.sign for t in trajectory[-w:]]):
            converged = True
            final = correction + (params.step if s < 0 else -params.step) / 2.0
            break
        correction += params.step if s < 0 else -params.step
        final = correction

    final_angle = final % 360.0
    if not converged:
        return MatchResult(trajectory, final_angle, False, None)
    if reference is None:
        reference = sweep_moment_signs(original, sp)
    working = rotate(rotated, -final, params.fill)
    residual = classify_balance(original, working, reference, params.fill)
    kind = ORIGIN if residual == 0.0 else LOCAL
    return MatchResult(trajectory, final_angle, True, kind, residual)


def estimate_rotation(original: GrayImage, rotated: GrayImage, params: MatchParams = MatchParams(),
                      reference: Optional[SignDistribution] = None) -> float:
    """Estimated clockwise rotation of ``rotated`` relative to ``original``, in [0, 360)."""
    result = match_rotation(original, rotated, params, reference)
    if not result.converged:
        raise NotConvergedError(f"no balance after {params.max_iterations} iterations", result)
    if result.balance_kind == LOCAL:
        raise LocalBalanceError(
            f"stopped at a local balance, residual deviation about {result.residual_angle:g} deg", result
        )
    return result.final_angle
