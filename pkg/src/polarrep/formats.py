"""JSON file formats.

Instance file: ``[{"id", "image_size": [h, w], "polygon": [x0, y0, ...], "category"?}]``
Candidate file: ``[{"center": [x, y], "rays", "class_score", "centerness", "level", "category"}]``
Polar file: ``[{"id", "center": [x, y], "rays", "image_size": [h, w], "category"}]``

Floats are written with ``repr`` precision, so load(save(x)) is exact.
"""

import json
import math

import numpy as np

from .codec import DEFAULT_EPS, PolarInstance
from .errors import DegenerateContour, InvalidRays, OutOfRange, ParseError
from .experiments import Corpus, Instance, atomic_write
from .geometry import Contour
from .postprocess import Candidate


def _read_list(path):
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError("<file>", f"invalid JSON: {e}") from None
    if not isinstance(doc, list):
        raise ParseError("<file>", "top-level JSON value must be a list")
    return doc


def _dump(records, path):
    atomic_write(path, json.dumps(records, indent=1) + "\n")


def _finite_list(rid, value, name):
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ParseError(rid, f"{name} must be a flat list of numbers")
    if not all(math.isfinite(v) for v in value):
        raise ParseError(rid, f"{name} has non-finite values")
    return [float(v) for v in value]


def _image_size(rid, value):
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in value)
    ):
        raise ParseError(rid, "image_size must be [height, width] positive integers")
    return (value[0], value[1])


def _category(rid, rec):
    cat = rec.get("category", 0)
    if not isinstance(cat, int) or isinstance(cat, bool):
        raise ParseError(rid, "category must be an integer")
    return cat


def parse_instance(rec, index=0):
    if not isinstance(rec, dict):
        raise ParseError(f"#{index}", "record must be an object")
    rid = rec.get("id")
    if not isinstance(rid, str) or not rid:
        raise ParseError(f"#{index}", "id must be a non-empty string")
    if "polygon" not in rec:
        raise ParseError(rid, "missing polygon")
    poly = rec["polygon"]
    if isinstance(poly, dict):
        raise ParseError(rid, "RLE masks are not supported")
    if isinstance(poly, list) and poly and isinstance(poly[0], list):
        raise ParseError(rid, "multi-polygon instances are not supported")
    coords = _finite_list(rid, poly, "polygon")
    if len(coords) % 2 or len(coords) < 6:
        raise ParseError(rid, f"polygon needs an even count >= 6 of coordinates, got {len(coords)}")
    size = _image_size(rid, rec.get("image_size"))
    try:
        contour = Contour(np.array(coords).reshape(-1, 2))
    except DegenerateContour as e:
        raise ParseError(rid, str(e)) from None
    return Instance(rid, contour, size, _category(rid, rec))


def load_instances(path):
    instances = [parse_instance(rec, i) for i, rec in enumerate(_read_list(path))]
    seen = set()
    for inst in instances:
        if inst.id in seen:
            raise ParseError(inst.id, "duplicate id")
        seen.add(inst.id)
    return Corpus(tuple(instances), "file")


def instance_record(inst):
    return {
        "id": inst.id,
        "image_size": list(inst.image_size),
        "polygon": [float(v) for v in inst.contour.points.ravel()],
        "category": int(inst.category),
    }


def save_instances(instances, path):
    _dump([instance_record(inst) for inst in instances], path)


def _polar(rid, rec, epsilon):
    center = _finite_list(rid, rec.get("center"), "center")
    if len(center) != 2:
        raise ParseError(rid, "center must be [x, y]")
    rays = _finite_list(rid, rec.get("rays"), "rays")
    if len(rays) < 3:
        raise ParseError(rid, "need at least 3 rays")
    try:
        return PolarInstance.from_rays(center, rays, epsilon)
    except InvalidRays as e:
        raise ParseError(rid, str(e)) from None


def parse_candidate(rec, index=0, epsilon=DEFAULT_EPS):
    rid = f"#{index}"
    if not isinstance(rec, dict):
        raise ParseError(rid, "record must be an object")
    inst = _polar(rid, rec, epsilon)
    for key in ("class_score", "centerness"):
        v = rec.get(key)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ParseError(rid, f"{key} must be a number")
    level = rec.get("level", 0)
    if not isinstance(level, int) or isinstance(level, bool):
        raise ParseError(rid, "level must be an integer")
    try:
        return Candidate(inst, float(rec["class_score"]), float(rec["centerness"]), level, _category(rid, rec))
    except OutOfRange as e:
        raise ParseError(rid, str(e)) from None


def load_candidates(path, epsilon=DEFAULT_EPS):
    return [parse_candidate(rec, i, epsilon) for i, rec in enumerate(_read_list(path))]


def candidate_record(c):
    return {
        "center": [c.instance.center.x, c.instance.center.y],
        "rays": [float(v) for v in c.instance.rays],
        "class_score": c.class_score,
        "centerness": c.centerness,
        "level": c.level,
        "category": c.category,
    }


def save_candidates(cands, path):
    _dump([candidate_record(c) for c in cands], path)


def load_polar(path, epsilon=DEFAULT_EPS):
    """Polar instances as ``(id, PolarInstance, image_size, category)`` tuples.

    Records without ``id`` (e.g. candidate files) are named by position.
    """
    out = []
    for i, rec in enumerate(_read_list(path)):
        if not isinstance(rec, dict):
            raise ParseError(f"#{i}", "record must be an object")
        rid = rec.get("id", f"#{i}")
        if not isinstance(rid, str):
            raise ParseError(f"#{i}", "id must be a string")
        size = _image_size(rid, rec["image_size"]) if "image_size" in rec else None
        out.append((rid, _polar(rid, rec, epsilon), size, _category(rid, rec)))
    return out


def polar_record(rid, p, image_size=None, category=0):
    rec = {"id": rid, "center": [p.center.x, p.center.y], "rays": [float(v) for v in p.rays]}
    if image_size is not None:
        rec["image_size"] = list(image_size)
    rec["category"] = int(category)
    return rec


def save_polar(items, path):
    _dump([polar_record(*item) for item in items], path)
