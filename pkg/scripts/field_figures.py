"""Edge maps, current arrows and force arrows for a rotated rectangle.

    python scripts/field_figures.py --out results/fields --angles 30 45
"""

import argparse
from pathlib import Path

from emrotmatch import shapes
from emrotmatch.edgecurrent import EdgeParams, edge_map_image, extract_currents, image_edges
from emrotmatch.emfield import total_moment, write_force_csv
from emrotmatch.raster import rotate, save_image
from emrotmatch.viz import current_field_svg, force_field_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/fields"))
    ap.add_argument("--angles", type=float, nargs="+", default=[30.0, 45.0])
    ap.add_argument("--quantize", action=argparse.BooleanOptionalAction, default=True)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    ep = EdgeParams(quantize_directions=args.quantize)
    img = shapes.rectangle(32, 8.5, 5.5)
    save_image(img, args.out / "original.pgm")
    save_image(edge_map_image(image_edges(img, ep)[1]), args.out / "original_edges.pgm")
    ref = extract_currents(img, ep)
    current_field_svg(ref, args.out / "original_currents.svg")
    for angle in args.angles:
        moved = rotate(img, angle)
        cur = extract_currents(moved, ep)
        res = total_moment(cur, ref)
        stem = args.out / f"rot{angle:g}"
        save_image(moved, f"{stem}.pgm")
        current_field_svg(cur, f"{stem}_currents.svg")
        force_field_svg(cur, res.forces, f"{stem}_forces.svg")
        write_force_csv(cur, res, f"{stem}_forces.csv")
        ccw = (res.per_element < 0).sum()
        print(f"{angle:g} deg: total moment {res.total:.6g} ({'counterclockwise' if res.total < 0 else 'clockwise'}), "
              f"{ccw}/{len(cur)} elements push counterclockwise")


if __name__ == "__main__":
    main()
