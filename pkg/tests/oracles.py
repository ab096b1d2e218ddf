"""Independent reference implementations used to cross-check the package.

Everything here is deliberately naive — straight loops, no shared helpers
with the code under test.  Speed does not matter; independence does.  The
only thing borrowed from the package are the Standard-14 metric *tables*
(constant data the synthetic writer and the parser must agree on anyway).
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from pdfannot.pdf.stdmetrics import (
    FALLBACK_ASCENT,
    FALLBACK_DESCENT,
    FALLBACK_WIDTH,
    STANDARD_14,
)

Box = Tuple[float, float, float, float]  # left, top, right, bottom
Triple = Tuple[object, str, Box]  # (image, category, box)


# ----------------------------------------------------------------------
# average precision, the slow way

def _iou(a: Box, b: Box) -> float:
    w = min(a[2], b[2]) - max(a[0], b[0])
    h = min(a[3], b[3]) - max(a[1], b[1])
    if w <= 0 or h <= 0:
        return 0.0
    inter = w * h
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    if union <= 0:
        return 0.0
    return inter / union


def reference_ap(
    ground_truth: Sequence[Triple],
    predictions: Sequence[Triple],
    thresholds: Sequence[float],
) -> float:
    """Greedy-matching, 101-point interpolated AP, written as the definition
    reads: no precision envelope, no bisection, just a max-scan per recall
    point.  Ties on IoU go to the ground-truth box listed first."""
    categories: List[str] = []
    for _, cat, _ in ground_truth:
        if cat not in categories:
            categories.append(cat)
    if not categories:
        return 1.0 if not predictions else 0.0

    per_category = []
    for cat in categories:
        scores = [_single_ap(ground_truth, predictions, cat, t) for t in thresholds]
        per_category.append(sum(scores) / len(scores))
    return sum(per_category) / len(per_category)


def _single_ap(
    ground_truth: Sequence[Triple],
    predictions: Sequence[Triple],
    category: str,
    threshold: float,
) -> float:
    gt_rows = [(img, box) for img, cat, box in ground_truth if cat == category]
    det_rows = [(img, box) for img, cat, box in predictions if cat == category]
    if not det_rows:
        return 0.0
    matched = [False] * len(gt_rows)
    hits: List[bool] = []
    for img, box in det_rows:
        best, best_iou = -1, 0.0
        for idx, (gt_img, gt_box) in enumerate(gt_rows):
            if matched[idx] or gt_img != img:
                continue
            value = _iou(box, gt_box)
            if value > best_iou:  # strict: ties keep the earlier box
                best, best_iou = idx, value
        if best >= 0 and best_iou >= threshold:
            matched[best] = True
            hits.append(True)
        else:
            hits.append(False)
    precisions, recalls = [], []
    tp = 0
    for rank, hit in enumerate(hits, start=1):
        tp += hit
        precisions.append(tp / rank)
        recalls.append(tp / len(gt_rows))
    total = 0.0
    for i in range(101):
        want = i / 100.0
        total += max(
            (p for p, r in zip(precisions, recalls) if r >= want),
            default=0.0,
        )
    return total / 101.0


# ----------------------------------------------------------------------
# synthetic-page token boxes, the slow way

def _font_params(base_font: str) -> Tuple[float, float, Optional[Sequence[int]]]:
    metrics = STANDARD_14.get(base_font)
    if metrics is None or metrics.widths is None:
        ascent = metrics.ascent if metrics else FALLBACK_ASCENT
        descent = metrics.descent if metrics else FALLBACK_DESCENT
        return float(ascent), float(descent), None
    return float(metrics.ascent), float(metrics.descent), metrics.widths


def _char_width(widths: Optional[Mapping[int, int]], ch: str) -> float:
    if widths is None:
        return float(FALLBACK_WIDTH)
    return float(widths.get(ord(ch), FALLBACK_WIDTH))


def expected_tokens(page) -> List[Tuple[str, Box]]:
    """Predict the extractor's output for a placement-built synthetic page.

    Walks every placement with the text-space advance rule (width/1000*size
    + char spacing, + word spacing after a space), groups the non-space runs,
    then maps PDF bottom-left coordinates into the rotated top-left viewing
    frame, rounding the way the extractor publishes them.
    """
    runs: List[Tuple[str, Box]] = []
    for p in page.placements:
        ascent, descent, widths = _font_params(p.font)
        y0 = p.y + descent / 1000.0 * p.size
        y1 = p.y + ascent / 1000.0 * p.size
        pen = p.x
        chars: List[str] = []
        run_x0 = run_x1 = pen
        for ch in p.text:
            w = _char_width(widths, ch) / 1000.0 * p.size
            if ch == " ":
                if chars:
                    runs.append(("".join(chars), (run_x0, y0, run_x1, y1)))
                    chars = []
                pen += w + p.char_spacing + p.word_spacing
                continue
            if not chars:
                run_x0 = pen
            chars.append(ch)
            run_x1 = pen + w
            pen += w + p.char_spacing
        if chars:
            runs.append(("".join(chars), (run_x0, y0, run_x1, y1)))
    return [(text, _to_view(page, box)) for text, box in runs]


def expected_page_size(page) -> Tuple[float, float]:
    if page.rotate % 360 in (90, 270):
        return float(page.height), float(page.width)
    return float(page.width), float(page.height)


def _to_view(page, box: Box) -> Box:
    """PDF frame (y up, bottom-left origin) -> viewing frame (y down)."""
    x0, yb0, x1, yb1 = box
    w, h = float(page.width), float(page.height)
    rot = page.rotate % 360
    if rot == 0:
        view = (x0, h - yb1, x1, h - yb0)
    elif rot == 90:
        view = (yb0, x0, yb1, x1)
    elif rot == 180:
        view = (w - x1, yb0, w - x0, yb1)
    else:  # 270
        view = (h - yb1, w - x1, h - yb0, w - x0)
    return tuple(round(v, 3) for v in view)  # type: ignore[return-value]
