"""Paired comparison of two classifiers on the same test items.

McNemar's test is computed exactly from the binomial distribution of the
discordant pairs, p-values of a batch of comparisons are Holm-adjusted, and
the effect size is the discordant odds ratio.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

from .errors import InputError, UndefinedEffectError
from .snippet import Origin


@dataclass(frozen=True)
class PairedOutcome:
    both_correct: int
    a_only_correct: int
    b_only_correct: int
    both_wrong: int
    label: str = ""

    @property
    def total(self) -> int:
        return self.both_correct + self.a_only_correct + self.b_only_correct + self.both_wrong


@dataclass(frozen=True)
class StatResult:
    p_raw: float
    p_adjusted: float
    odds_ratio: Optional[float]
    b: int
    c: int
    label: str = ""
    test: str = "mcnemar_exact"
    correction: str = "holm"
    effect_size: str = "odds_ratio_haldane_anscombe"
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _check_counts(b: int, c: int) -> None:
    if b < 0 or c < 0:
        raise ValueError(f"discordant counts must be nonnegative, got ({b}, {c})")


def mcnemar_exact(b: int, c: int) -> float:
    _check_counts(b, c)
    n = b + c
    if n == 0:
        return 1.0
    k = min(b, c)
    tail = Fraction(sum(math.comb(n, i) for i in range(k + 1)), 2**n)
    return float(min(Fraction(1), 2 * tail))


def holm_adjust(p_values: Sequence[float]) -> List[float]:
    for p in p_values:
        if not 0.0 <= p <= 1.0 or math.isnan(p):
            raise ValueError(f"p-value out of range: {p}")
    m = len(p_values)
    order = sorted(range(m), key=lambda i: (p_values[i], i))
    adjusted = [0.0] * m
    running = 0.0
    for rank, i in enumerate(order):
        running = max(running, min(1.0, (m - rank) * p_values[i]))
        adjusted[i] = running
    return adjusted


def odds_ratio(b: int, c: int) -> float:
    _check_counts(b, c)
    if b == 0 and c == 0:
        raise UndefinedEffectError("odds ratio undefined: no discordant pairs")
    if b == 0 or c == 0:
        return (b + 0.5) / (c + 0.5)
    return b / c


def paired_outcome(truth: Sequence, pred_a: Sequence, pred_b: Sequence, label: str = "") -> PairedOutcome:
    if not (len(truth) == len(pred_a) == len(pred_b)):
        raise ValueError("truth and both prediction lists must have equal length")
    n11 = b = c = n00 = 0
    for t, pa, pb in zip(truth, pred_a, pred_b):
        t = Origin.parse(t)
        ok_a = Origin.parse(pa) is t
        ok_b = Origin.parse(pb) is t
        if ok_a and ok_b:
            n11 += 1
        elif ok_a:
            b += 1
        elif ok_b:
            c += 1
        else:
            n00 += 1
    return PairedOutcome(n11, b, c, n00, label)


def compare_classifiers(outcomes: Sequence[PairedOutcome]) -> List[StatResult]:
    if not outcomes:
        raise ValueError("no comparisons given")
    raw = [mcnemar_exact(o.a_only_correct, o.b_only_correct) for o in outcomes]
    adjusted = holm_adjust(raw)
    results = []
    for o, p, padj in zip(outcomes, raw, adjusted):
        b, c = o.a_only_correct, o.b_only_correct
        try:
            effect, error = odds_ratio(b, c), None
        except UndefinedEffectError as exc:
            effect, error = None, str(exc)
        results.append(StatResult(p, padj, effect, b, c, label=o.label, error=error))
    return results


def read_comparison_csv(path: Union[str, Path], label: Optional[str] = None) -> PairedOutcome:
    """Read ``snippet_id,truth,pred_a,pred_b`` rows into a paired outcome."""
    truth, pa, pb = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"snippet_id", "truth", "pred_a", "pred_b"}
        if reader.fieldnames is None or not required <= {f.strip() for f in reader.fieldnames}:
            raise InputError(f"{path}: expected columns {sorted(required)}")
        for row in reader:
            row = {k.strip(): (v or "").strip() for k, v in row.items()}
            try:
                truth.append(Origin.parse(row["truth"]))
                pa.append(Origin.parse(row["pred_a"]))
                pb.append(Origin.parse(row["pred_b"]))
            except ValueError as exc:
                raise InputError(f"{path}: row {row.get('snippet_id')!r}: {exc}") from None
    return paired_outcome(truth, pa, pb, label or Path(path).stem)


def write_comparison_csv(
    path: Union[str, Path], ids: Iterable[str], truth: Iterable, pred_a: Iterable, pred_b: Iterable
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["snippet_id", "truth", "pred_a", "pred_b"])
        for row in zip(ids, truth, pred_a, pred_b):
            w.writerow([row[0]] + [Origin.parse(v).value for v in row[1:]])
