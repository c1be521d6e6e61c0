"""Command-line entry point: ``emrotmatch {edges,moment,sweep,match}``.

Options may also come from a plain key=value config file (``--config``);
keys are the long flag names without the leading dashes, and flags given on
the command line win over the file.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .analysis import SweepParams, sweep_moment_signs
from .edgecurrent import (
    EdgeParams,
    EmptyCurrentSetError,
    edge_map_image,
    extract_currents,
    gradient_to_current,
    image_edges,
)
from .emfield import SceneConfig, total_moment, write_force_csv
from .matcher import LOCAL, MatchParams, match_rotation
from .raster import GrayImage, ImageFormatError, load_image, save_image
from .viz import arrow_field_ppm, current_field_svg, force_field_svg, sign_bar_svg, sign_pie_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4
EXIT_NOT_CONVERGED = 5
EXIT_LOCAL_BALANCE = 6


def read_config(path) -> Dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("edge extraction")
    g.add_argument("--threshold-percent", type=float, default=0.10,
                   help="edge threshold as a fraction of the maximum gradient magnitude (default 0.10)")
    g.add_argument("--quantize", action=argparse.BooleanOptionalAction, default=True,
                   help="snap current directions to 8 compass points (default on)")
    g.add_argument("--mask-circle", action=argparse.BooleanOptionalAction, default=False,
                   help="ignore edges outside the inscribed circle (default off)")
    g = p.add_argument_group("scene")
    g.add_argument("--z-separation", type=float, default=0.0, help="distance between the image planes (default 0)")
    g.add_argument("--force-constant", type=float, default=1.0)
    g.add_argument("--min-distance", type=float, default=1e-6, help="pairs closer than this are skipped")
    g.add_argument("--fill", type=float, default=0.0, help="intensity for pixels rotated in from outside")
    g.add_argument("--zero-band", type=float, default=0.0, help="|moment| at or below this counts as zero")
    g = p.add_argument_group("execution")
    g.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=True,
                   help="fixed summation order (default on)")
    g.add_argument("--threads", type=int, default=None, help="worker cap for parallel mode")
    p.add_argument("--config", type=Path, default=None, help="key=value file with default options")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emrotmatch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("edges", help="significant edges and virtual current of one image")
    p.add_argument("input", type=Path)
    p.add_argument("--edge-map", type=Path, default=Path("edges.pgm"))
    p.add_argument("--currents", type=Path, default=Path("currents.svg"),
                   help="arrow plot; a .ppm suffix writes a raster instead")
    _add_common(p)

    p = sub.add_parser("moment", help="total moment exerted by ORIGINAL on ROTATED")
    p.add_argument("original", type=Path)
    p.add_argument("rotated", type=Path)
    p.add_argument("--csv", type=Path, default=None, help="per-element x,y,tx,ty,fx,fy,moment dump")
    p.add_argument("--force-svg", type=Path, default=None, help="force-field arrow plot")
    _add_common(p)

    p = sub.add_parser("sweep", help="moment sign distribution over rotation angle")
    p.add_argument("original", type=Path)
    p.add_argument("--intervals", type=int, default=120)
    p.add_argument("--out", type=Path, default=Path("sweep"),
                   help="output prefix: PREFIX.csv, PREFIX_bar.svg, PREFIX_pie.svg")
    _add_common(p)

    p = sub.add_parser("match", help="moment-guided rotation matching")
    p.add_argument("original", type=Path)
    p.add_argument("rotated", type=Path)
    p.add_argument("--step-degrees", type=float, default=1.0)
    p.add_argument("--max-iterations", type=int, default=720)
    p.add_argument("--oscillation-window", type=int, default=4)
    p.add_argument("--intervals", type=int, default=120, help="sweep resolution used to classify the balance")
    p.add_argument("--trajectory", type=Path, default=Path("trajectory.csv"))
    _add_common(p)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: List[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None) is None:
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]  # type: ignore[union-attr]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in read_config(args.config).items():
        dest = key.replace("-", "_")
        if dest not in actions:
            raise ValueError(f"unknown config key {key!r}")
        act = actions[dest]
        if isinstance(act, argparse.BooleanOptionalAction):
            defaults[dest] = _bool(value)
        elif act.type is not None:
            defaults[dest] = act.type(value)
        else:
            defaults[dest] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _edge_params(a) -> EdgeParams:
    return EdgeParams(a.threshold_percent, a.quantize)


def _scene(a) -> SceneConfig:
    return SceneConfig(a.force_constant, a.z_separation, a.min_distance, a.deterministic, a.threads)


def _load(path: Path) -> GrayImage:
    return load_image(path)


def cmd_edges(a) -> int:
    img = _load(a.input)
    ep = _edge_params(a)
    grad, mask = image_edges(img, ep, a.mask_circle)
    cur = gradient_to_current(grad, mask, ep, center=img.center)
    save_image(edge_map_image(mask), a.edge_map)
    if a.currents.suffix.lower() == ".ppm":
        arrow_field_ppm(cur.dims, cur.positions, cur.vectors, a.currents)
    else:
        current_field_svg(cur, a.currents)
    print(f"elements: {len(cur)}")
    return EXIT_OK


def _pair(a):
    original = _load(a.original)
    rotated = _load(a.rotated)
    if original.shape != rotated.shape:
        raise ValueError(f"image sizes differ: {original.shape} vs {rotated.shape}")
    return original, rotated


def cmd_moment(a) -> int:
    original, rotated = _pair(a)
    ep, scene = _edge_params(a), _scene(a)
    ref = extract_currents(original, ep, z=0.0, mask_circle=a.mask_circle)
    cur = extract_currents(rotated, ep, z=a.z_separation, mask_circle=a.mask_circle)
    if len(ref) == 0 or len(cur) == 0:
        raise EmptyCurrentSetError("empty current set in " + ("original" if len(ref) == 0 else "rotated") + " image")
    res = total_moment(cur, ref, scene)
    sign = "negative" if res.total < 0 else "positive" if res.total > 0 else "zero"
    turn = {"negative": "counterclockwise", "positive": "clockwise", "zero": "none"}[sign]
    print(f"total moment: {res.total!r}")
    print(f"sign: {sign} (turns {turn})")
    print(f"sum |per-element|: {res.abs_sum!r}")
    if a.csv:
        write_force_csv(cur, res, a.csv)
    if a.force_svg:
        force_field_svg(cur, res.forces, a.force_svg)
    return EXIT_OK


def cmd_sweep(a) -> int:
    original = _load(a.original)
    params = SweepParams(a.intervals, _scene(a), a.zero_band, _edge_params(a), a.fill, a.mask_circle,
                         workers=1 if a.deterministic else (a.threads or 1))
    dist = sweep_moment_signs(original, params)
    prefix = str(a.out)
    dist.write_csv(prefix + ".csv")
    title = f"z separation {a.z_separation:g}"
    sign_bar_svg(dist, prefix + "_bar.svg", title)
    sign_pie_svg(dist, prefix + "_pie.svg", title)
    print(dist.describe())
    return EXIT_OK


def cmd_match(a) -> int:
    original, rotated = _pair(a)
    params = MatchParams(a.step_degrees, a.max_iterations, a.oscillation_window, a.zero_band, _scene(a),
                         _edge_params(a), a.fill, a.mask_circle, a.intervals)
    res = match_rotation(original, rotated, params)
    res.write_csv(a.trajectory)
    if not res.converged:
        print(f"no balance after {a.max_iterations} iterations; trajectory in {a.trajectory}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    if res.balance_kind == LOCAL:
        print(
            f"local balance: stopped at correction {res.final_angle:g}°, "
            f"residual deviation near the oscillating angle {res.residual_angle:g}°",
            file=sys.stderr,
        )
        return EXIT_LOCAL_BALANCE
    print(f"estimated rotation: {res.final_angle:g}° clockwise")
    return EXIT_OK


COMMANDS = {"edges": cmd_edges, "moment": cmd_moment, "sweep": cmd_sweep, "match": cmd_match}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except EmptyCurrentSetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ImageFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
