"""Confusion counts, per-class precision/recall/F1 and their averages.

Ratios are computed with ``fractions.Fraction`` and converted to float at the
end, so every reported value is the correctly rounded float of the exact
rational. This is what makes accuracy and weighted recall bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .snippet import CLASS_ORDER, Origin


@dataclass(frozen=True)
class ConfusionCounts:
    positive_class: Origin
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def support(self) -> int:
        return self.tp + self.fn


def _ratio(num: int, den: int) -> Fraction:
    # zero denominators count as 0 so reports stay total
    return Fraction(num, den) if den else Fraction(0)


def _f1(p: Fraction, r: Fraction) -> Fraction:
    return 2 * p * r / (p + r) if p + r else Fraction(0)


def confusion(truth: Sequence, predictions: Sequence, positive_class) -> ConfusionCounts:
    if len(truth) != len(predictions):
        raise ValueError(f"length mismatch: {len(truth)} truths vs {len(predictions)} predictions")
    if not truth:
        raise ValueError("cannot build a confusion table from empty input")
    pos = Origin.parse(positive_class)
    tp = fp = fn = tn = 0
    for t, p in zip(truth, predictions):
        t_pos = Origin.parse(t) is pos
        p_pos = Origin.parse(p) is pos
        if t_pos and p_pos:
            tp += 1
        elif p_pos:
            fp += 1
        elif t_pos:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(pos, tp, fp, fn, tn)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "support": self.support}


def _exact_class(counts: ConfusionCounts) -> Tuple[Fraction, Fraction, Fraction]:
    p = _ratio(counts.tp, counts.tp + counts.fp)
    r = _ratio(counts.tp, counts.tp + counts.fn)
    return p, r, _f1(p, r)


def per_class_metrics(counts: ConfusionCounts) -> ClassMetrics:
    p, r, f = _exact_class(counts)
    return ClassMetrics(float(p), float(r), float(f), counts.support)


@dataclass(frozen=True)
class Averages:
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def aggregate(
    per_class: Mapping[Origin, ConfusionCounts],
) -> Tuple[float, Averages, Averages]:
    """Accuracy, macro average and support-weighted average over the classes.

    Takes the per-class confusion tables (one per positive class) rather
    than rounded ``ClassMetrics`` so that the averages stay exact.
    """
    exact = {c: _exact_class(k) for c, k in per_class.items()}
    supports = {c: k.support for c, k in per_class.items()}
    n = sum(supports.values())
    m = len(exact)
    macro = [sum(v[i] for v in exact.values()) / m for i in range(3)]
    if n:
        weighted = [sum(exact[c][i] * supports[c] for c in exact) / n for i in range(3)]
        accuracy = Fraction(sum(k.tp for k in per_class.values()), n)
    else:
        weighted = [Fraction(0)] * 3
        accuracy = Fraction(0)
    return (
        float(accuracy),
        Averages(*(float(x) for x in macro)),
        Averages(*(float(x) for x in weighted)),
    )


@dataclass(frozen=True)
class EvalReport:
    per_class: Dict[str, ClassMetrics]
    accuracy: float
    macro_avg: Averages
    weighted_avg: Averages
    total_support: int
    tags: Dict[str, object] = field(default_factory=dict)

    @property
    def dataset(self) -> Optional[str]:
        return self.tags.get("dataset")  # type: ignore[return-value]

    @property
    def config(self) -> Optional[str]:
        return self.tags.get("config")  # type: ignore[return-value]

    def to_dict(self) -> dict:
        return {
            **self.tags,
            "per_class": {c: m.to_dict() for c, m in self.per_class.items()},
            "accuracy": self.accuracy,
            "macro_avg": self.macro_avg.to_dict(),
            "weighted_avg": self.weighted_avg.to_dict(),
            "total_support": self.total_support,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "EvalReport":
        fixed = {"per_class", "accuracy", "macro_avg", "weighted_avg", "total_support"}
        return cls(
            per_class={c: ClassMetrics(**m) for c, m in d["per_class"].items()},
            accuracy=d["accuracy"],
            macro_avg=Averages(**d["macro_avg"]),
            weighted_avg=Averages(**d["weighted_avg"]),
            total_support=d["total_support"],
            tags={k: v for k, v in d.items() if k not in fixed},
        )


def evaluate(truth: Sequence, predictions: Sequence, **tags) -> EvalReport:
    tables = {c: confusion(truth, predictions, c) for c in CLASS_ORDER}
    accuracy, macro, weighted = aggregate(tables)
    return EvalReport(
        per_class={c.value: per_class_metrics(k) for c, k in tables.items()},
        accuracy=accuracy,
        macro_avg=macro,
        weighted_avg=weighted,
        total_support=len(truth),
        tags=dict(tags),
    )
