"""Inter-annotator agreement: token-label accuracy and box average precision.

Token-backed annotations are compared by the labels they assign to tokens;
freeform boxes are compared with a detection-style average precision where
one annotator plays ground truth and the other plays predictor (the measure
is deliberately directional, so both orders are reported).
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

from .annotations import Annotation
from .errors import LayoutMismatch, NoSharedDocuments, UnknownCategory
from .geometry import Bounds, iou
from .tokens import PageTokenLayout

DEFAULT_IOU_THRESHOLDS: Tuple[float, ...] = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))

TokenKey = Tuple[Hashable, int, int]  # (document, page, token index)


@dataclass(frozen=True)
class BoxInstance:
    """A freeform box lifted out of its annotation for matching."""

    image: Hashable  # (document, page) — boxes never match across images
    category: str
    bounds: Bounds


@dataclass(frozen=True)
class AgreementReport:
    """One directional comparison; ``None`` metrics mean "not applicable"."""

    annotator_gt: str
    annotator_pred: str
    textual_accuracy: Optional[float]
    freeform_ap: Optional[float]
    tokens_compared: int
    boxes_compared: int
    shared_documents: int


# ----------------------------------------------------------------------
# token-label accuracy

def token_claims(
    annotations: Sequence[Annotation],
    layouts: Sequence[PageTokenLayout],
    document: Hashable = None,
) -> Dict[TokenKey, Tuple[str, str]]:
    """Resolve token-backed annotations to one (annotation id, label) claim
    per token.  A token claimed by several annotations gets the smallest-area
    one (ties broken by annotation id order)."""
    claims: Dict[TokenKey, Tuple[float, str, str]] = {}
    for ann in annotations:
        if ann.tokens is None:
            continue
        area = ann.bounds.area
        for ref in ann.tokens:
            if ref.page_index >= len(layouts) or ref.page_index < 0:
                raise LayoutMismatch(f"annotation {ann.id} references unknown page {ref.page_index}")
            if ref.token_index >= len(layouts[ref.page_index].tokens) or ref.token_index < 0:
                raise LayoutMismatch(
                    f"annotation {ann.id} references unknown token "
                    f"{ref.token_index} on page {ref.page_index}"
                )
            key = (document, ref.page_index, ref.token_index)
            claim = (area, ann.id, ann.label)
            if key not in claims or claim[:2] < claims[key][:2]:
                claims[key] = claim
    return {key: (ann_id, label) for key, (_, ann_id, label) in claims.items()}


def token_label_map(
    annotations: Sequence[Annotation],
    layouts: Sequence[PageTokenLayout],
    document: Hashable = None,
) -> Dict[TokenKey, str]:
    """The winning label per token; see :func:`token_claims`."""
    return {key: label for key, (_, label) in token_claims(annotations, layouts, document).items()}


def accuracy_from_maps(map_a: Dict[TokenKey, str], map_b: Dict[TokenKey, str]) -> Tuple[float, int]:
    """Percentage of tokens labelled identically, over the union of labelled
    tokens.  An empty union counts as full agreement."""
    union = set(map_a) | set(map_b)
    if not union:
        return 100.0, 0
    agree = sum(1 for key in union if map_a.get(key) is not None and map_a.get(key) == map_b.get(key))
    return 100.0 * agree / len(union), len(union)


def token_accuracy(
    annotations_a: Sequence[Annotation],
    annotations_b: Sequence[Annotation],
    layouts: Sequence[PageTokenLayout],
) -> float:
    """Token-label agreement between two annotation sets for one document."""
    map_a = token_label_map(annotations_a, layouts)
    map_b = token_label_map(annotations_b, layouts)
    return accuracy_from_maps(map_a, map_b)[0]


# ----------------------------------------------------------------------
# average precision

def boxes_of(annotations: Sequence[Annotation], document: Hashable = None) -> List[BoxInstance]:
    """Freeform annotations as matchable box instances, in file order."""
    return [
        BoxInstance(image=(document, ann.page), category=ann.label, bounds=ann.bounds)
        for ann in annotations
        if ann.tokens is None
    ]


def average_precision(
    ground_truth: Sequence[Annotation],
    predictions: Sequence[Annotation],
    categories: Sequence[str],
    iou_thresholds: Sequence[float] = DEFAULT_IOU_THRESHOLDS,
) -> float:
    """COCO-style AP of ``predictions`` against ``ground_truth``.

    Predictions count in file order (they carry no confidence scores);
    matching is greedy per category within a page.  Categories absent from
    the ground truth do not contribute; with no ground truth at all the
    score is vacuous: 1.0 for no predictions, else 0.0.
    """
    _check_categories(ground_truth, categories)
    _check_categories(predictions, categories)
    return ap_from_boxes(boxes_of(ground_truth), boxes_of(predictions), categories, iou_thresholds)


def _check_categories(annotations: Sequence[Annotation], categories: Sequence[str]) -> None:
    known = set(categories)
    for ann in annotations:
        if ann.label not in known:
            raise UnknownCategory(f"label {ann.label!r} is not a known category")


def ap_from_boxes(
    ground_truth: Sequence[BoxInstance],
    predictions: Sequence[BoxInstance],
    categories: Sequence[str],
    iou_thresholds: Sequence[float] = DEFAULT_IOU_THRESHOLDS,
) -> float:
    present: List[str] = []
    seen: Set[str] = set()
    gt_categories = {g.category for g in ground_truth}
    for cat in categories:
        if cat in gt_categories and cat not in seen:
            present.append(cat)
            seen.add(cat)
    if not present:
        return 1.0 if not predictions else 0.0
    if not iou_thresholds:
        raise ValueError("at least one IoU threshold is required")
    total = 0.0
    for threshold in iou_thresholds:
        per_category = [
            _category_ap(ground_truth, predictions, cat, threshold) for cat in present
        ]
        total += sum(per_category) / len(per_category)
    return total / len(iou_thresholds)


def _category_ap(
    ground_truth: Sequence[BoxInstance],
    predictions: Sequence[BoxInstance],
    category: str,
    threshold: float,
) -> float:
    gt_boxes = [g for g in ground_truth if g.category == category]
    detections = [p for p in predictions if p.category == category]
    n_gt = len(gt_boxes)
    matched = [False] * n_gt
    hits: List[bool] = []
    for det in detections:
        best_iou = 0.0
        best_j = -1
        for j, gt in enumerate(gt_boxes):
            if matched[j] or gt.image != det.image:
                continue
            value = iou(det.bounds, gt.bounds)
            if value > best_iou:
                best_iou = value
                best_j = j
        if best_j >= 0 and best_iou >= threshold:
            matched[best_j] = True
            hits.append(True)
        else:
            hits.append(False)
    if not detections:
        return 0.0
    precisions: List[float] = []
    recalls: List[float] = []
    tp = 0
    for k, hit in enumerate(hits, start=1):
        tp += hit
        precisions.append(tp / k)
        recalls.append(tp / n_gt)
    envelope = precisions[:]
    for i in range(len(envelope) - 2, -1, -1):
        envelope[i] = max(envelope[i], envelope[i + 1])
    total = 0.0
    for i in range(101):
        k = bisect_left(recalls, i / 100.0)
        if k < len(envelope):
            total += envelope[k]
    return total / 101.0


# ----------------------------------------------------------------------
# project-level comparison

def compare_annotators(
    store,
    annotator_gt: str,
    annotator_pred: str,
    iou_thresholds: Sequence[float] = DEFAULT_IOU_THRESHOLDS,
) -> AgreementReport:
    """Compare two annotators over the documents both have saved.

    Metrics pool tokens and boxes across all shared documents; raises
    :class:`NoSharedDocuments` when the annotators have no overlap.
    """
    docs = sorted(store.saved_documents(annotator_gt) & store.saved_documents(annotator_pred))
    if not docs:
        raise NoSharedDocuments(
            f"{annotator_gt!r} and {annotator_pred!r} have no commonly annotated document"
        )
    categories = store.schema.label_names()
    map_gt: Dict[TokenKey, str] = {}
    map_pred: Dict[TokenKey, str] = {}
    boxes_gt: List[BoxInstance] = []
    boxes_pred: List[BoxInstance] = []
    for doc in docs:
        layouts = store.load_structure(doc)
        anns_gt, _ = store.load_saved(annotator_gt, doc)
        anns_pred, _ = store.load_saved(annotator_pred, doc)
        map_gt.update(token_label_map(anns_gt, layouts, document=doc))
        map_pred.update(token_label_map(anns_pred, layouts, document=doc))
        boxes_gt.extend(boxes_of(anns_gt, document=doc))
        boxes_pred.extend(boxes_of(anns_pred, document=doc))
    accuracy, union_size = accuracy_from_maps(map_gt, map_pred)
    ap = ap_from_boxes(boxes_gt, boxes_pred, categories, iou_thresholds)
    return AgreementReport(
        annotator_gt=annotator_gt,
        annotator_pred=annotator_pred,
        textual_accuracy=accuracy,
        freeform_ap=ap,
        tokens_compared=union_size,
        boxes_compared=len(boxes_gt) + len(boxes_pred),
        shared_documents=len(docs),
    )


def agreement_matrix(
    store,
    annotators: Sequence[str],
    iou_thresholds: Sequence[float] = DEFAULT_IOU_THRESHOLDS,
) -> Dict[Tuple[str, str], Optional[AgreementReport]]:
    """All ordered pairings; ``None`` marks pairs with nothing to compare."""
    out: Dict[Tuple[str, str], Optional[AgreementReport]] = {}
    for gt in annotators:
        for pred in annotators:
            if gt == pred:
                continue
            try:
                out[(gt, pred)] = compare_annotators(store, gt, pred, iou_thresholds)
            except NoSharedDocuments:
                out[(gt, pred)] = None
    return out
