"""Confusion matrix and the SemEval-style evaluation measures."""

import logging

import numpy as np

from .errors import DataError
from .labels import LABELS, LABEL_INDEX, NEGATIVE, NUM_CLASSES, POSITIVE

log = logging.getLogger(__name__)


def _as_indices(labels):
    return np.array([LABEL_INDEX[l] if isinstance(l, str) else int(l) for l in labels], dtype=int)


def confusion(gold, pred):
    """3x3 counts, rows = gold class, columns = predicted class."""
    if len(gold) != len(pred):
        raise DataError(f"gold has {len(gold)} labels but predictions have {len(pred)}")
    if len(gold) == 0:
        raise DataError("cannot evaluate an empty label sequence")
    cm = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    np.add.at(cm, (_as_indices(gold), _as_indices(pred)), 1)
    return cm


def _safe_ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def recall_per_class(cm):
    return _safe_ratio(np.diag(cm), cm.sum(axis=1))


def precision_per_class(cm):
    return _safe_ratio(np.diag(cm), cm.sum(axis=0))


def absent_classes(cm):
    return [LABELS[i] for i in range(NUM_CLASSES) if cm[i].sum() == 0]


def avg_recall(cm):
    """Macro-average recall. A class absent from gold contributes recall 0."""
    missing = absent_classes(cm)
    if missing:
        log.warning("classes absent from gold labels, recall counted as 0: %s", ", ".join(missing))
    return float(recall_per_class(cm).mean())


def accuracy(cm):
    return float(np.trace(cm) / cm.sum())


def f1_per_class(cm):
    p = precision_per_class(cm)
    r = recall_per_class(cm)
    return _safe_ratio(2 * p * r, p + r)


def macro_f1(cm):
    return float(f1_per_class(cm).mean())


def f1_pn(cm):
    """Mean F1 of the positive and negative classes (the SemEval F^PN)."""
    f1 = f1_per_class(cm)
    return float((f1[POSITIVE] + f1[NEGATIVE]) / 2)


def evaluate(gold, pred):
    cm = confusion(gold, pred)
    return {
        "confusion": cm,
        "precision": precision_per_class(cm),
        "recall": recall_per_class(cm),
        "f1": f1_per_class(cm),
        "avg_recall": avg_recall(cm),
        "accuracy": accuracy(cm),
        "macro_f1": macro_f1(cm),
        "f1_pn": f1_pn(cm),
        "absent": absent_classes(cm),
    }


def format_report(result, header_lines=()):
    """Plain-text report, every real number with 4 fractional digits."""
    cm = result["confusion"]
    lines = [f"# {h}" for h in header_lines]
    lines.append(f"examples: {int(cm.sum())}")
    lines.append("confusion (rows=gold, cols=pred): " + " ".join(LABELS))
    for i, name in enumerate(LABELS):
        lines.append(f"  {name:<8} " + " ".join(f"{int(c):d}" for c in cm[i]))
    lines.append("class     precision recall f1")
    for i, name in enumerate(LABELS):
        lines.append(f"  {name:<8} {result['precision'][i]:.4f} {result['recall'][i]:.4f} "
                     f"{result['f1'][i]:.4f}")
    for key in ("avg_recall", "accuracy", "macro_f1", "f1_pn"):
        lines.append(f"{key}: {result[key]:.4f}")
    if result["absent"]:
        lines.append("warning: absent gold classes: " + ", ".join(result["absent"]))
    return "\n".join(lines) + "\n"
