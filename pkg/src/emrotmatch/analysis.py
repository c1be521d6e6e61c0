"""Moment-sign distributions over rotation angle.

The original image is rotated clockwise by i * step for i = 1..intervals;
each rotated copy is re-extracted and the total moment exerted on it by the
original is recorded. The sign diagram is decomposed into sections (maximal
runs of one nonzero sign), convergence ranges (the restoring first/last
sections) and oscillating angles (interior boundaries both neighbors push
toward).

The entry at 360 degrees is the unrotated image acting on itself: it is the
reference balance, so its sign is recorded as 0 whatever rounding leaves in
the raw moment.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .edgecurrent import CurrentSet, EdgeParams, EmptyCurrentSetError, extract_currents
from .emfield import MomentResult, SceneConfig, total_moment
from .raster import GrayImage, rotate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepParams:
    intervals: int = 120
    scene: SceneConfig = SceneConfig()
    zero_band: float = 0.0
    edge_params: EdgeParams = EdgeParams()
    fill: float = 0.0
    mask_circle: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.intervals < 4:
            raise ValueError("intervals must be at least 4")
        if self.zero_band < 0:
            raise ValueError("zero_band must be non-negative")

    @property
    def step(self) -> float:
        return 360.0 / self.intervals

    @property
    def z_separation(self) -> float:
        return self.scene.z_separation


class Section(NamedTuple):
    start_angle: float
    end_angle: float
    sign: int
    start_index: int
    end_index: int


class AngleRange(NamedTuple):
    """Range of deviation angles; (0, a], [b, 360) or the full (0, 360)."""

    lo: float
    hi: float

    def __str__(self) -> str:
        left = "(" if self.lo == 0 else "["
        right = ")" if self.hi == 360 else "]"
        return f"{left}{self.lo:g}°, {self.hi:g}°{right}"

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, angle: float) -> bool:
        lo_ok = angle > self.lo if self.lo == 0 else angle >= self.lo
        hi_ok = angle < self.hi if self.hi == 360 else angle <= self.hi
        return lo_ok and hi_ok


def sign_with_band(value: float, zero_band: float) -> int:
    if abs(value) <= zero_band:
        return 0
    return 1 if value > 0 else -1


def _is_reference_angle(angle: float) -> bool:
    r = angle % 360.0
    return min(r, 360.0 - r) < 1e-9


def find_sections(angles: Sequence[float], signs: Sequence[int]) -> List[Section]:
    """Maximal runs of equal nonzero sign; zero entries never split a run."""
    sections: List[Section] = []
    for i, s in enumerate(signs):
        if s == 0:
            continue
        if sections and sections[-1].sign == s:
            sections[-1] = sections[-1]._replace(end_angle=angles[i], end_index=i)
        else:
            sections.append(Section(angles[i], angles[i], int(s), i, i))
    return sections


def _convergence(sections: List[Section]) -> List[AngleRange]:
    if not sections:
        return []
    if len(sections) == 2 and sections[0].sign == -1 and sections[1].sign == 1:
        return [AngleRange(0.0, 360.0)]
    ranges = []
    if sections[0].sign == -1:
        ranges.append(AngleRange(0.0, sections[0].end_angle))
    if len(sections) > 1 and sections[-1].sign == 1:
        ranges.append(AngleRange(sections[-1].start_angle, 360.0))
    return ranges


def _oscillating(sections: List[Section]) -> List[float]:
    return [
        (a.end_angle + b.start_angle) / 2.0
        for a, b in zip(sections, sections[1:])
        if a.sign == 1 and b.sign == -1
    ]


@dataclass(frozen=True, eq=False)
class SignDistribution:
    angles: np.ndarray
    moments: np.ndarray
    signs: np.ndarray
    sections: List[Section] = field(default_factory=list)
    convergence: List[AngleRange] = field(default_factory=list)
    oscillating_angles: List[float] = field(default_factory=list)

    @classmethod
    def from_signs(cls, angles, signs, moments=None) -> "SignDistribution":
        angles = np.asarray(angles, dtype=np.float64)
        signs = np.asarray(signs, dtype=np.int64)
        if moments is None:
            moments = signs.astype(np.float64)
        moments = np.asarray(moments, dtype=np.float64)
        if not (len(angles) == len(signs) == len(moments)):
            raise ValueError("angles, signs and moments must align")
        sections = find_sections(angles.tolist(), signs.tolist())
        return cls(angles, moments, signs, sections, _convergence(sections), _oscillating(sections))

    @classmethod
    def from_moments(cls, angles, moments, zero_band: float = 0.0) -> "SignDistribution":
        angles = np.asarray(angles, dtype=np.float64)
        signs = [0 if _is_reference_angle(a) else sign_with_band(m, zero_band) for a, m in zip(angles, moments)]
        return cls.from_signs(angles, signs, moments)

    @property
    def step(self) -> float:
        return float(self.angles[1] - self.angles[0]) if len(self.angles) > 1 else 360.0

    def sign_at(self, angle: float) -> int:
        i = self.index_of(angle)
        return int(self.signs[i])

    def index_of(self, angle: float) -> int:
        """Index of the sampled angle nearest to ``angle`` (mod 360)."""
        a = angle % 360.0
        if a == 0.0:
            a = 360.0
        return int(np.argmin(np.abs(self.angles - a)))

    def section_of(self, index: int) -> Optional[int]:
        for n, s in enumerate(self.sections):
            if s.start_index <= index <= s.end_index:
                return n
        return None

    def in_convergence(self, angle: float) -> bool:
        return any(r.contains(angle % 360.0) for r in self.convergence)

    def drain_target(self, angle: float) -> Optional[float]:
        """Where following the moment sign from ``angle`` ends up.

        Returns 0.0 for the origin, an oscillating angle for a local balance,
        or None when the sampled sign at ``angle`` is zero or when a lone
        positive section keeps pushing clockwise with nothing to stop it.
        """
        i = self.index_of(angle)
        if self.signs[i] == 0:
            return None
        n = self.section_of(i)
        sec = self.sections[n]
        if sec.sign < 0:
            if n == 0:
                return 0.0
            return (self.sections[n - 1].end_angle + sec.start_angle) / 2.0
        if n == len(self.sections) - 1:
            return 0.0 if n > 0 else None
        return (sec.end_angle + self.sections[n + 1].start_angle) / 2.0

    def describe(self) -> str:
        def sec(s: Section) -> str:
            return f"{'+' if s.sign > 0 else '-'}[{s.start_angle:g}, {s.end_angle:g}]"

        conv = ", ".join(str(r) for r in self.convergence) or "none"
        osc = ", ".join(f"{a:g}°" for a in self.oscillating_angles) or "none"
        return (
            f"sections ({len(self.sections)}): {' '.join(sec(s) for s in self.sections)}\n"
            f"convergence: {conv}\n"
            f"oscillating angles: {osc}"
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["angle_deg", "moment", "sign"])
        for a, m, s in zip(self.angles, self.moments, self.signs):
            w.writerow([f"{a:g}", repr(float(m)), int(s)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def read_csv(cls, path) -> "SignDistribution":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls.from_signs(
            [float(r["angle_deg"]) for r in rows],
            [int(r["sign"]) for r in rows],
            [float(r["moment"]) for r in rows],
        )


def detect_convergence(dist: SignDistribution) -> List[AngleRange]:
    """Restoring ranges around 0 degrees: a negative first section, a positive last one."""
    if not dist.sections:
        log.warning("all signs are zero; no convergence range")
        return []
    return _convergence(dist.sections)


def detect_oscillating_angles(dist: SignDistribution) -> List[float]:
    """Interior (+ then -) section boundaries, i.e. local balance points."""
    return _oscillating(dist.sections)


def reference_currents(original: GrayImage, params: SweepParams) -> CurrentSet:
    ref = extract_currents(original, params.edge_params, z=0.0, mask_circle=params.mask_circle)
    if len(ref) == 0:
        raise EmptyCurrentSetError("empty current set in the original image")
    return ref


def moment_at_angle(original: GrayImage, angle: float, params: SweepParams,
                    reference: Optional[CurrentSet] = None) -> MomentResult:
    """Rotate -> extract -> total moment for a single deviation angle."""
    if reference is None:
        reference = reference_currents(original, params)
    moved = rotate(original, angle, params.fill)
    cur = extract_currents(moved, params.edge_params, z=params.z_separation, mask_circle=params.mask_circle)
    if len(cur) == 0:
        raise EmptyCurrentSetError(angle=angle)
    return total_moment(cur, reference, params.scene)


def sweep_moment_signs(original: GrayImage, params: SweepParams = SweepParams()) -> SignDistribution:
    """Total-moment sign at every sampled clockwise deviation angle."""
    reference = reference_currents(original, params)
    angles = [i * params.step for i in range(1, params.intervals + 1)]

    def one(angle: float) -> float:
        return moment_at_angle(original, angle, params, reference).total

    if params.workers > 1:
        with ThreadPoolExecutor(max_workers=params.workers) as pool:
            moments = list(pool.map(one, angles))
    else:
        moments = [one(a) for a in angles]
    return SignDistribution.from_moments(angles, moments, params.zero_band)
