"""Inference-side assembly: score fusion, per-level top-k, box NMS, masks."""

from dataclasses import dataclass

import numpy as np

from .codec import PolarInstance, decode, decode_points
from .errors import OutOfRange
from .geometry import Box, box_iou_matrix, rasterize
from .losses import fused_score


@dataclass(frozen=True)
class Candidate:
    instance: PolarInstance
    class_score: float
    centerness: float
    level: int = 0
    category: int = 0

    def __post_init__(self):
        if not 0.0 <= self.class_score <= 1.0:
            raise OutOfRange(f"class score {self.class_score} outside [0, 1]")
        if not 0.0 < self.centerness <= 1.0:
            raise OutOfRange(f"centerness {self.centerness} outside (0, 1]")

    @property
    def score(self):
        return fused_score(self.class_score, self.centerness)


@dataclass(frozen=True)
class NmsConfig:
    score_threshold: float = 0.05
    top_k_per_level: int = 1000
    iou_threshold: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.score_threshold <= 1.0 and 0.0 <= self.iou_threshold <= 1.0):
            raise ValueError("thresholds must lie in [0, 1]")
        if self.top_k_per_level < 1:
            raise ValueError("top_k_per_level must be >= 1")


def _ranked(cands):
    # descending fused score; the earlier candidate wins a tie
    return sorted(range(len(cands)), key=lambda i: (-cands[i].score, i))


def select_candidates(cands, cfg=NmsConfig()):
    """Threshold fused scores, keep the top-k of each level, merge levels."""
    keep = []
    by_level = {}
    for i in _ranked(cands):
        c = cands[i]
        if c.score < cfg.score_threshold:
            continue
        taken = by_level.get(c.level, 0)
        if taken < cfg.top_k_per_level:
            by_level[c.level] = taken + 1
            keep.append(i)
    return [cands[i] for i in keep]


def mask_bbox(p):
    """Smallest axis-aligned box around the decoded contour points."""
    pts = decode_points(p)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return Box(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def nms(cands, cfg=NmsConfig()):
    """Greedy class-aware NMS on mask bounding boxes."""
    order = _ranked(cands)
    if not order:
        return []
    boxes = np.array([mask_bbox(cands[i].instance).as_tuple() for i in order])
    cats = np.array([cands[i].category for i in order])
    alive = np.ones(len(order), dtype=bool)
    kept = []
    for k in range(len(order)):
        if not alive[k]:
            continue
        kept.append(order[k])
        rest = np.nonzero(alive[k + 1 :] & (cats[k + 1 :] == cats[k]))[0] + k + 1
        if rest.size:
            iou = box_iou_matrix(boxes[k], boxes[rest])[0]
            alive[rest[iou > cfg.iou_threshold]] = False
    return [cands[i] for i in kept]


def assemble(cands, cfg=NmsConfig(), raster=(512, 512)):
    """select -> nms -> decode -> rasterize. ``raster`` is ``(height, width)``."""
    h, w = raster
    out = []
    for c in nms(select_candidates(cands, cfg), cfg):
        out.append((c, rasterize(decode(c.instance), w, h)))
    return out
