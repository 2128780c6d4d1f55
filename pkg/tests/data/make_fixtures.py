"""Regenerate the JSON fixtures in this directory.

    python tests/data/make_fixtures.py

The NMS golden output is produced by the CLI and then frozen; regenerate it
only when an intentional change to selection or NMS ordering is made.
"""

import json
import math
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent


def candidates_1500():
    rng = np.random.default_rng(1500)
    objects = [
        (rng.uniform(40, 470), rng.uniform(40, 470), rng.uniform(10, 40), int(rng.integers(0, 3)))
        for _ in range(40)
    ]
    recs = []
    for k in range(1500):
        cx, cy, r, cat = objects[k % len(objects)]
        n = 36
        base = r * (1 + 0.15 * np.cos(2 * np.arange(n) * 2 * math.pi / n + k % 7))
        rays = base * rng.uniform(0.85, 1.15, n)
        recs.append(
            {
                "center": [float(cx + rng.normal(0, 3)), float(cy + rng.normal(0, 3))],
                "rays": [float(v) for v in rays],
                "class_score": float(rng.uniform(0.0, 1.0)),
                "centerness": float(math.sqrt(rays.min() / rays.max())),
                "level": 0,
                "category": cat,
            }
        )
    return recs


def duplicates():
    rec = {
        "center": [32.0, 32.0],
        "rays": [10.0] * 36,
        "class_score": 0.9,
        "centerness": 1.0,
        "level": 0,
        "category": 0,
    }
    return [rec, dict(rec, class_score=0.8)]


def aligned_ngons():
    out = []
    for n, r in ((4, 20.0), (8, 15.0), (36, 25.0)):
        t = 2 * math.pi * np.arange(n) / n
        pts = np.stack([64 + r * np.cos(t), 64 + r * np.sin(t)], axis=1)
        out.append({"id": f"ngon-{n}", "image_size": [128, 128], "polygon": [float(v) for v in pts.ravel()]})
    return out


def main():
    for name, recs in (
        ("candidates_1500.json", candidates_1500()),
        ("candidates_duplicate.json", duplicates()),
        ("aligned_ngons.json", aligned_ngons()),
    ):
        (HERE / name).write_text(json.dumps(recs, indent=None if len(recs) > 100 else 1) + "\n")


if __name__ == "__main__":
    main()
