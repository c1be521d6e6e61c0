"""Virtual magnetic field, pairwise forces and moments between current sets.

Force on element j of set 1 from every element k of set 2::

    F_j = A * sum_k  T1_j x (T2_k x r_kj) / |r_kj|^3,   r_kj = p_j - p_k

with currents lifted to (tx, ty, 0) and positions to (x, y, z). The kernel
uses the expansion a x (b x c) = b (a.c) - c (a.b); only the in-plane
components of F are kept. Pairs closer than ``min_distance`` are skipped.

Moments are z-components about the acted-on set's center::

    m = rx * fy - ry * fx

In screen coordinates (y down) a negative m turns the image visually
counterclockwise and a positive m turns it clockwise.

Summation order (deterministic mode): for each element of set 1, in
row-major order, the inner sum over set 2 runs in set 2's row-major order
(numpy pairwise reduction along a contiguous row); the total moment is the
reduction of the per-element moments in set 1's order. Parallel mode splits
set 1 into blocks evaluated on a thread pool; per-element values are the
same, only the final reduction is regrouped.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .edgecurrent import CurrentSet

# number of set-1 rows evaluated per block; bounds the (rows x N2) temporaries
BLOCK_ROWS = 256


@dataclass(frozen=True)
class SceneConfig:
    force_constant: float = 1.0
    z_separation: float = 0.0
    min_distance: float = 1e-6
    deterministic: bool = True
    threads: Optional[int] = None

    def __post_init__(self):
        if not self.force_constant > 0:
            raise ValueError("force_constant must be positive")
        if not self.min_distance > 0:
            raise ValueError("min_distance must be positive")
        if self.z_separation < 0:
            raise ValueError("z_separation must be non-negative")


class ForceSample(NamedTuple):
    element_index: int
    force: Tuple[float, float]


@dataclass(frozen=True, eq=False)
class MomentResult:
    total: float
    per_element: Optional[np.ndarray] = None
    forces: Optional[np.ndarray] = None

    @property
    def sign(self) -> int:
        return int(np.sign(self.total))

    @property
    def abs_sum(self) -> float:
        """Sum of |per-element moment|, the natural scale for ``total``."""
        return float(np.abs(self.per_element).sum()) if self.per_element is not None else abs(self.total)


def _check_planes(set1: CurrentSet, set2: CurrentSet, cfg: SceneConfig) -> None:
    gap = abs(set1.z - set2.z)
    if not math.isclose(gap, cfg.z_separation, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(
            f"plane heights differ by {gap:g} but the scene asks for z_separation={cfg.z_separation:g}"
        )


def _force_block(p1, t1, dz, p2, t2, min_distance):
    """In-plane forces on the rows (p1, t1) from all of set 2, without the constant."""
    rx = p1[:, 0:1] - p2[None, :, 0]
    ry = p1[:, 1:2] - p2[None, :, 1]
    r2 = rx * rx + ry * ry + dz * dz
    t1r = t1[:, 0:1] * rx + t1[:, 1:2] * ry
    t1t2 = t1[:, 0:1] * t2[None, :, 0] + t1[:, 1:2] * t2[None, :, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_r3 = np.where(r2 >= min_distance * min_distance, r2 ** -1.5, 0.0)
    fx = ((t2[None, :, 0] * t1r - rx * t1t2) * inv_r3).sum(axis=1)
    fy = ((t2[None, :, 1] * t1r - ry * t1t2) * inv_r3).sum(axis=1)
    return np.column_stack([fx, fy])


def _blocks(n: int):
    return [(i, min(i + BLOCK_ROWS, n)) for i in range(0, n, BLOCK_ROWS)]


def pairwise_forces(set1: CurrentSet, set2: CurrentSet, cfg: SceneConfig = SceneConfig()) -> np.ndarray:
    """(N1, 2) array of in-plane forces on every element of ``set1``."""
    _check_planes(set1, set2, cfg)
    n1 = len(set1)
    out = np.zeros((n1, 2))
    if n1 == 0 or len(set2) == 0:
        return out
    dz = set1.z - set2.z
    p1, t1, p2, t2 = set1.positions, set1.vectors, set2.positions, set2.vectors

    def run(bounds):
        lo, hi = bounds
        out[lo:hi] = _force_block(p1[lo:hi], t1[lo:hi], dz, p2, t2, cfg.min_distance)

    blocks = _blocks(n1)
    if cfg.deterministic or len(blocks) == 1:
        for b in blocks:
            run(b)
    else:
        with ThreadPoolExecutor(max_workers=cfg.threads or os.cpu_count() or 1) as pool:
            list(pool.map(run, blocks))
    return out * cfg.force_constant


def field_at(point: Sequence[float], source: CurrentSet, cfg: SceneConfig = SceneConfig()) -> np.ndarray:
    """Virtual magnetic field at a 3-D point: A * sum_k (T_k x r) / |r|^3."""
    px, py, pz = (float(c) for c in point)
    if len(source) == 0:
        return np.zeros(3)
    rx = px - source.positions[:, 0]
    ry = py - source.positions[:, 1]
    rz = np.full_like(rx, pz - source.z)
    r = np.sqrt(rx * rx + ry * ry + rz * rz)
    keep = r >= cfg.min_distance
    inv_r3 = np.zeros_like(r)
    inv_r3[keep] = r[keep] ** -3
    tx, ty = source.vectors[:, 0], source.vectors[:, 1]
    # (tx, ty, 0) x (rx, ry, rz)
    bx = (ty * rz) * inv_r3
    by = (-tx * rz) * inv_r3
    bz = (tx * ry - ty * rx) * inv_r3
    return cfg.force_constant * np.array([bx.sum(), by.sum(), bz.sum()])


def force_on_element(set1: CurrentSet, j: int, set2: CurrentSet, cfg: SceneConfig = SceneConfig()) -> ForceSample:
    """Force on element ``j`` of ``set1`` from all of ``set2``."""
    one = set1.subset(slice(j, j + 1))
    f = pairwise_forces(one, set2, cfg)[0]
    return ForceSample(j, (float(f[0]), float(f[1])))


def force_field(set1: CurrentSet, set2: CurrentSet, cfg: SceneConfig = SceneConfig()) -> List[ForceSample]:
    forces = pairwise_forces(set1, set2, cfg)
    return [ForceSample(j, (float(f[0]), float(f[1]))) for j, f in enumerate(forces)]


def moment_of_force(application_point, force, origin) -> float:
    """z-component of (point - origin) x force."""
    rx = application_point[0] - origin[0]
    ry = application_point[1] - origin[1]
    return rx * force[1] - ry * force[0]


def element_moments(set1: CurrentSet, forces: np.ndarray) -> np.ndarray:
    rx = set1.positions[:, 0] - set1.center[0]
    ry = set1.positions[:, 1] - set1.center[1]
    return rx * forces[:, 1] - ry * forces[:, 0]


def total_moment(set1: CurrentSet, set2: CurrentSet, cfg: SceneConfig = SceneConfig()) -> MomentResult:
    """Total moment on ``set1`` (about ``set1.center``) caused by ``set2``."""
    forces = pairwise_forces(set1, set2, cfg)
    per = element_moments(set1, forces)
    if cfg.deterministic:
        total = float(per.sum())
    else:
        total = float(sum(per[lo:hi].sum() for lo, hi in _blocks(len(per))))
    return MomentResult(total, per, forces)


def write_force_csv(set1: CurrentSet, result: MomentResult, path) -> None:
    """Per-element dump with columns x, y, tx, ty, fx, fy, moment."""
    lines = ["x,y,tx,ty,fx,fy,moment"]
    for p, t, f, m in zip(set1.positions, set1.vectors, result.forces, result.per_element):
        lines.append(",".join(repr(float(v)) for v in (p[0], p[1], t[0], t[1], f[0], f[1], m)))
    Path(path).write_text("\n".join(lines) + "\n")
