#!/usr/bin/env python3
"""Write a small synthetic city (census, species, rasters, roads, a park polygon)."""

import argparse
import json
import math
import random
from pathlib import Path

SPECIES = {"Ficus religiosa": 0.48, "Azadirachta indica": 0.69, "Tamarindus indica": 0.75}


def ascii_grid(n, cell, values, nodata=-9999):
    head = f"ncols {n}\nnrows {n}\nxllcorner 0\nyllcorner 0\ncellsize {cell}\nNODATA_value {nodata}\n"
    rows = (" ".join(repr(v) for v in values[r * n:(r + 1) * n]) for r in range(n))
    return head + "\n".join(rows) + "\n"


def write_demo(out, seed=7, blocks=6, spacing=100.0, n_trees=120):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    names = list(SPECIES)
    span = (blocks - 1) * spacing

    (out / "species.csv").write_text(
        "species,wood_density\n" + "".join(f"{k},{v}\n" for k, v in SPECIES.items()))

    trees = []
    lines = ["id,x,y,species,height_m,girth_cm,canopy_diameter_m"]
    for k in range(n_trees):
        along = 20 + (span - 40) * rng.random()
        line = spacing * rng.randrange(blocks)
        off = (rng.random() - 0.5) * 12
        x, y = (10 + along, 10 + line + off) if k % 2 == 0 else (10 + line + off, 10 + along)
        trees.append((x, y))
        lines.append(f"T{k},{x:.3f},{y:.3f},{names[k % 3]},{4 + 16 * rng.random():.2f},"
                     f"{40 + 200 * rng.random():.1f},{2 + 10 * rng.random():.2f}")
    (out / "census.csv").write_text("\n".join(lines) + "\n")

    cell = 30.0
    n = int(math.ceil((span + 40) / cell))
    occupied = {(int(x // cell), int(y // cell)) for x, y in trees}
    lst, nv = [], []
    for r in range(n):
        for c in range(n):
            base = 34 + 8 * rng.random() + 0.01 * (c + 0.5) * cell
            tree = (c, n - 1 - r) in occupied
            lst.append(round(base - 6 - 3 * rng.random() if tree else base, 3))
            nv.append(0 if tree else 1)
    (out / "lst.asc").write_text(ascii_grid(n, cell, lst))
    (out / "nv.asc").write_text(ascii_grid(n, cell, nv))

    features = []
    for j in range(blocks):
        for i in range(blocks):
            x, y = 10 + i * spacing, 10 + j * spacing
            for tag, end in (("h", (x + spacing, y)), ("v", (x, y + spacing))):
                if (tag == "h" and i + 1 == blocks) or (tag == "v" and j + 1 == blocks):
                    continue
                features.append({
                    "type": "Feature",
                    "properties": {"id": f"{tag}_{i}_{j}", "highway": "residential",
                                   "foot": True, "car": True, "maxspeed": 40},
                    "geometry": {"type": "LineString", "coordinates": [[x, y], list(end)]},
                })
    (out / "roads.geojson").write_text(json.dumps({"type": "FeatureCollection", "features": features}))

    park = [[120, 120], [300, 120], [300, 260], [120, 260], [120, 120]]
    (out / "park.geojson").write_text(json.dumps(
        {"type": "Feature", "properties": {}, "geometry": {"type": "Polygon", "coordinates": [park]}}))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="output directory")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--blocks", type=int, default=6, help="junctions per side of the street grid")
    ap.add_argument("--trees", type=int, default=120)
    args = ap.parse_args()
    write_demo(args.out, args.seed, args.blocks, n_trees=args.trees)


if __name__ == "__main__":
    main()
