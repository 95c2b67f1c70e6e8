"""Canonical class order. Every array, file and tally uses this order."""

LABELS = ("negative", "neutral", "positive")
LABEL_INDEX = {name: i for i, name in enumerate(LABELS)}
NEGATIVE, NEUTRAL, POSITIVE = range(3)
NUM_CLASSES = len(LABELS)


def label_to_index(label):
    try:
        return LABEL_INDEX[label]
    except KeyError:
        raise KeyError(f"unknown label {label!r}") from None
