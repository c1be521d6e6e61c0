"""Recover known rotations of a synthetic shape and show local balances.

    python scripts/match_demo.py --d 10
    python scripts/match_demo.py --d 0 --no-quantize --angles 150 180 200
"""

import argparse
from pathlib import Path

from emrotmatch import shapes
from emrotmatch.analysis import sweep_moment_signs
from emrotmatch.edgecurrent import EdgeParams
from emrotmatch.emfield import SceneConfig
from emrotmatch.matcher import MatchParams, match_rotation
from emrotmatch.raster import rotate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=float, default=10.0, help="plane separation")
    ap.add_argument("--step", type=float, default=1.0)
    ap.add_argument("--quantize", action=argparse.BooleanOptionalAction, default=True)
    ap.add_argument("--angles", type=float, nargs="+", default=[5, 10, 15, 30, 45, 90, 135, 180, 225, 270, 315])
    ap.add_argument("--trajectories", type=Path, default=None, help="directory for per-run trajectory CSVs")
    args = ap.parse_args()

    img = shapes.rectangle(64, 12.5, 5.5, offset=(14.0, 0.0))
    params = MatchParams(step=args.step, scene=SceneConfig(z_separation=args.d),
                         edge_params=EdgeParams(quantize_directions=args.quantize))
    ref = sweep_moment_signs(img, params.sweep_params())
    print(ref.describe())
    print(f"\n{'truth':>7}{'final':>9}{'error':>8}{'iters':>7}  balance")
    if args.trajectories:
        args.trajectories.mkdir(parents=True, exist_ok=True)
    for truth in args.angles:
        res = match_rotation(img, rotate(img, truth), params, reference=ref)
        err = (res.final_angle - truth + 180.0) % 360.0 - 180.0
        kind = res.balance_kind or "not converged"
        if res.balance_kind == "local":
            kind += f" (residual {res.residual_angle:g})"
        print(f"{truth:>7g}{res.final_angle:>9g}{err:>8g}{len(res.trajectory):>7}  {kind}")
        if args.trajectories:
            res.write_csv(args.trajectories / f"traj_{truth:g}.csv")


if __name__ == "__main__":
    main()
