"""Corpus ingestion, pairing, mixing and deterministic train/validation/test splits."""

from __future__ import annotations

import itertools
import json
import logging
import random
from collections import Counter, OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import CorpusError, DuplicateIdError, SplitError, UnmatchedPairError
from .snippet import CLASS_ORDER, Origin, Snippet

logger = logging.getLogger(__name__)

PART_NAMES = ("train", "validation", "test")


class Provenance(str, Enum):
    UNPAIRED_U = "unpaired_U"
    PAIRED_P = "paired_P"
    MIXED_DALPHA = "mixed_Dalpha"
    PAIRED_DBETA = "paired_Dbeta"
    CUSTOM = "custom"

    @property
    def is_paired(self) -> bool:
        return self in (Provenance.PAIRED_P, Provenance.PAIRED_DBETA)


@dataclass(frozen=True)
class Corpus:
    snippets: Tuple[Snippet, ...]
    provenance: Provenance = Provenance.CUSTOM
    name: str = "corpus"

    def __post_init__(self):
        object.__setattr__(self, "snippets", tuple(self.snippets))
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        seen = set()
        for s in self.snippets:
            if s.id in seen:
                raise DuplicateIdError(s.id)
            seen.add(s.id)
        if self.provenance.is_paired:
            missing = [s.id for s in self.snippets if s.pairing_key is None]
            if missing:
                raise CorpusError(f"paired corpus has snippets without pairing key: {missing[:5]}")

    @property
    def counts(self) -> Dict[str, int]:
        c = Counter(s.origin for s in self.snippets)
        return {o.value: c.get(o, 0) for o in CLASS_ORDER}

    @property
    def ids(self) -> List[str]:
        return [s.id for s in self.snippets]

    def __len__(self) -> int:
        return len(self.snippets)

    def __iter__(self):
        return iter(self.snippets)

    def by_id(self) -> Dict[str, Snippet]:
        return {s.id: s for s in self.snippets}

    def subset(self, ids: Iterable[str]) -> List[Snippet]:
        index = self.by_id()
        return [index[i] for i in ids]

    def replace_snippets(self, snippets: Iterable[Snippet]) -> "Corpus":
        return Corpus(tuple(snippets), self.provenance, self.name)


# --------------------------------------------------------------------------
# manifests


@dataclass(frozen=True)
class ManifestRecord:
    id: str
    label: str
    path: str
    pairing_key: Optional[str] = None
    source: Optional[str] = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "label": self.label,
                "pairing_key": self.pairing_key,
                "path": self.path,
                "source": self.source,
            },
            ensure_ascii=False,
        )


def read_manifest(path: Union[str, Path]) -> List[ManifestRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                records.append(
                    ManifestRecord(
                        id=str(raw["id"]),
                        label=raw["label"],
                        path=raw["path"],
                        pairing_key=raw.get("pairing_key"),
                        source=raw.get("source"),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"{path}:{lineno}: malformed manifest record ({exc})") from exc
    return records


def write_manifest(records: Iterable[ManifestRecord], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def write_corpus(corpus: Corpus, root: Union[str, Path], manifest_name: str = "manifest.jsonl") -> Path:
    """Write snippet files plus a manifest under ``root``; returns the manifest path."""
    root = Path(root)
    (root / "snippets").mkdir(parents=True, exist_ok=True)
    records = []
    for s in corpus.snippets:
        rel = f"snippets/{s.id}.java"
        (root / rel).write_text(s.text, encoding="utf-8", newline="")
        records.append(ManifestRecord(s.id, s.origin.value, rel, s.pairing_key, s.source))
    manifest = root / manifest_name
    write_manifest(records, manifest)
    return manifest


def _infer_provenance(snippets: Sequence[Snippet]) -> Provenance:
    if snippets and all(s.pairing_key is not None for s in snippets):
        return Provenance.PAIRED_P
    return Provenance.CUSTOM


def ingest_corpus(
    root_path: Union[str, Path],
    manifest: Union[str, Path, Sequence[ManifestRecord]],
    provenance: Optional[Provenance] = None,
    name: Optional[str] = None,
    jobs: int = 4,
) -> Corpus:
    """Load the snippets listed in ``manifest``; file paths are relative to ``root_path``."""
    root = Path(root_path)
    if isinstance(manifest, (str, Path)):
        name = name or Path(manifest).stem
        records = read_manifest(manifest)
    else:
        records = list(manifest)
    seen = set()
    for rec in records:
        if rec.id in seen:
            raise DuplicateIdError(rec.id)
        seen.add(rec.id)
        try:
            Origin.parse(rec.label)
        except ValueError as exc:
            raise CorpusError(f"snippet {rec.id!r}: {exc}") from None

    def load(rec: ManifestRecord) -> Snippet:
        path = root / rec.path
        try:
            text = path.read_bytes().decode("utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise CorpusError(f"snippet {rec.id!r}: cannot read {path}: {exc}") from exc
        return Snippet(rec.id, Origin.parse(rec.label), text, rec.pairing_key, source=rec.source)

    if jobs > 1 and len(records) > 64:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            snippets = list(pool.map(load, records))
    else:
        snippets = [load(r) for r in records]
    if provenance is None:
        provenance = _infer_provenance(snippets)
    corpus = Corpus(tuple(snippets), provenance, name or "corpus")
    logger.info("ingested %s: %s", corpus.name, corpus.counts)
    return corpus


# --------------------------------------------------------------------------
# pairing and mixing


@dataclass(frozen=True)
class PairGroup:
    pairing_key: str
    human_snippets: Tuple[Snippet, ...]
    chatgpt_snippets: Tuple[Snippet, ...]

    @property
    def members(self) -> Tuple[Snippet, ...]:
        return self.human_snippets + self.chatgpt_snippets


def pair_snippets(corpus: Corpus, drop_unmatched: bool = False) -> List[PairGroup]:
    groups: "OrderedDict[str, Dict[Origin, List[Snippet]]]" = OrderedDict()
    for s in corpus.snippets:
        if s.pairing_key is None:
            raise CorpusError(f"snippet {s.id!r} has no pairing key")
        groups.setdefault(s.pairing_key, {Origin.HUMAN: [], Origin.CHATGPT: []})[s.origin].append(s)
    unmatched = [k for k, g in groups.items() if not g[Origin.HUMAN] or not g[Origin.CHATGPT]]
    if unmatched and not drop_unmatched:
        raise UnmatchedPairError(unmatched)
    return [
        PairGroup(k, tuple(g[Origin.HUMAN]), tuple(g[Origin.CHATGPT]))
        for k, g in groups.items()
        if g[Origin.HUMAN] and g[Origin.CHATGPT]
    ]


def mix_datasets(unpaired: Corpus, paired: Corpus, seed: int, name: str = "dalpha") -> Corpus:
    snippets = list(unpaired.snippets) + list(paired.snippets)
    ids = Counter(s.id for s in snippets)
    clash = sorted(i for i, n in ids.items() if n > 1)
    if clash:
        raise DuplicateIdError(clash[0])
    random.Random(seed).shuffle(snippets)
    return Corpus(tuple(snippets), Provenance.MIXED_DALPHA, name)


# --------------------------------------------------------------------------
# splitting


@dataclass(frozen=True)
class DatasetSplit:
    train: Tuple[str, ...]
    validation: Tuple[str, ...]
    test: Tuple[str, ...]
    ratios: Tuple[int, int, int]
    seed: int
    stratified: bool
    pair_aware: bool = False

    def part(self, name: str) -> Tuple[str, ...]:
        if name not in PART_NAMES:
            raise ValueError(f"unknown split part {name!r}")
        return getattr(self, name)

    def to_dict(self) -> dict:
        return {
            "train": list(self.train),
            "validation": list(self.validation),
            "test": list(self.test),
            "ratios": list(self.ratios),
            "seed": self.seed,
            "stratified": self.stratified,
            "pair_aware": self.pair_aware,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DatasetSplit":
        return cls(
            tuple(d["train"]),
            tuple(d["validation"]),
            tuple(d["test"]),
            tuple(d["ratios"]),
            int(d["seed"]),
            bool(d["stratified"]),
            bool(d.get("pair_aware", False)),
        )


def parse_ratios(value: Union[str, Sequence[int]]) -> Tuple[int, int, int]:
    if isinstance(value, str):
        try:
            parts = [int(p) for p in value.replace(",", ":").split(":")]
        except ValueError:
            raise SplitError(f"malformed ratios {value!r}") from None
    else:
        parts = [int(p) for p in value]
    if len(parts) != 3:
        raise SplitError(f"expected three ratios, got {parts}")
    if any(p <= 0 for p in parts):
        raise SplitError(f"every ratio must be positive, got {parts}")
    if sum(parts) != 100:
        raise SplitError(f"ratios must sum to 100, got {sum(parts)}")
    return tuple(parts)  # type: ignore[return-value]


def largest_remainder(total: int, ratios: Sequence[int]) -> List[int]:
    """Split ``total`` by ``ratios`` (summing to 100); leftovers go to the largest remainders.

    Ties go to the earlier part.
    """
    quotas = [Fraction(total * r, 100) for r in ratios]
    sizes = [int(q) for q in quotas]
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[: total - sum(sizes)]:
        sizes[i] += 1
    return sizes


def _controlled_targets(
    class_counts: Mapping[str, int], ratios: Sequence[int]
) -> Dict[str, List[int]]:
    """Per-class part sizes whose column sums match ``largest_remainder`` on the total.

    Every cell is the floor or ceiling of its exact quota. Among the
    roundings that satisfy both margins the one with the largest sum of
    rounded-up remainders wins; ties are broken by class name order, then
    part order.
    """
    classes = sorted(class_counts)
    totals = largest_remainder(sum(class_counts.values()), ratios)
    quotas = {c: [Fraction(class_counts[c] * r, 100) for r in ratios] for c in classes}
    floors = {c: [int(q) for q in quotas[c]] for c in classes}
    need = {c: class_counts[c] - sum(floors[c]) for c in classes}
    col_need = [totals[p] - sum(floors[c][p] for c in classes) for p in range(len(ratios))]
    parts = range(len(ratios))

    def options(c):
        # cells that can round up: only those with a nonzero remainder
        cand = [p for p in parts if quotas[c][p] != floors[c][p]]
        combos = list(itertools.combinations(cand, need[c]))
        combos.sort(key=lambda combo: (-sum(quotas[c][p] - floors[c][p] for p in combo), combo))
        return combos

    best = None
    for choice in itertools.product(*(options(c) for c in classes)):
        cols = [0] * len(ratios)
        for combo in choice:
            for p in combo:
                cols[p] += 1
        if cols != col_need:
            continue
        score = sum(
            quotas[c][p] - floors[c][p] for c, combo in zip(classes, choice) for p in combo
        )
        if best is None or score > best[0]:
            best = (score, choice)
    if best is None:
        # margins cannot both hold; keep per-class largest remainder
        return {c: largest_remainder(class_counts[c], ratios) for c in classes}
    targets = {c: list(floors[c]) for c in classes}
    for c, combo in zip(classes, best[1]):
        for p in combo:
            targets[c][p] += 1
    return targets


def split(
    corpus: Corpus,
    ratios: Union[str, Sequence[int]] = (80, 10, 10),
    seed: int = 42,
    stratified: bool = True,
    pair_aware: Optional[bool] = None,
) -> DatasetSplit:
    """Partition ``corpus`` into train/validation/test id lists.

    Part sizes follow the largest-remainder rule. With ``stratified`` each
    origin is distributed over the parts in proportion too (each per-origin
    count within one of its exact quota). With ``pair_aware`` (default: on
    for paired corpora) snippets sharing a pairing key always land in the
    same part. Assignment depends only on the ids, labels and ``seed``, not
    on corpus order.
    """
    ratios = parse_ratios(ratios)
    if pair_aware is None:
        pair_aware = corpus.provenance.is_paired
    snippets = sorted(corpus.snippets, key=lambda s: s.id)

    if stratified:
        label_of = lambda s: s.origin.value  # noqa: E731
    else:
        label_of = lambda s: "all"  # noqa: E731
    class_counts = Counter(label_of(s) for s in snippets)
    classes = sorted(class_counts)
    targets = _controlled_targets(class_counts, ratios)

    # units: groups of ids that must stay together
    units: "OrderedDict[str, List[Snippet]]" = OrderedDict()
    for s in snippets:
        key = f"k:{s.pairing_key}" if pair_aware and s.pairing_key is not None else f"i:{s.id}"
        units.setdefault(key, []).append(s)
    # units with the same class composition are interchangeable: decide how
    # many of each kind go to each part, then let the seeded shuffle pick which
    by_kind: "OrderedDict[Tuple[int, ...], List[List[Snippet]]]" = OrderedDict()
    for unit in units.values():
        comp = Counter(label_of(s) for s in unit)
        by_kind.setdefault(tuple(comp.get(c, 0) for c in classes), []).append(unit)
    kinds = sorted(by_kind)
    counts = _allocate_kinds(
        {k: len(by_kind[k]) for k in kinds}, classes, class_counts, targets, ratios
    )
    rng = random.Random(seed)
    assigned: List[List[str]] = [[], [], []]
    for k in kinds:
        pool = by_kind[k]
        rng.shuffle(pool)
        pos = 0
        for p in range(3):
            for unit in pool[pos : pos + counts[k][p]]:
                assigned[p].extend(s.id for s in unit)
            pos += counts[k][p]

    order = {s.id: i for i, s in enumerate(corpus.snippets)}
    parts = [tuple(sorted(ids, key=order.__getitem__)) for ids in assigned]
    result = DatasetSplit(parts[0], parts[1], parts[2], ratios, seed, stratified, pair_aware)
    if stratified:
        _check_stratification(corpus, result)
    return result


def _allocate_kinds(
    kind_counts: Mapping[Tuple[int, ...], int],
    classes: Sequence[str],
    class_counts: Mapping[str, int],
    targets: Mapping[str, List[int]],
    ratios: Sequence[int],
) -> Dict[Tuple[int, ...], List[int]]:
    """Units of each kind per part, by deterministic local search.

    The cost is lexicographic: first how far any class/part cell strays
    beyond one of its exact quota, then the deviation of the part sizes from
    the largest-remainder sizes, then the deviation of each cell from its
    rounded target. Starts from a largest-remainder split of every kind and
    applies the best single move or swap of units until none improves.
    """
    kinds = list(kind_counts)
    parts = range(len(ratios))
    exact = {c: [Fraction(class_counts[c] * r, 100) for r in ratios] for c in classes}
    sizes = largest_remainder(sum(class_counts.values()), ratios)
    alloc = {k: largest_remainder(kind_counts[k], ratios) for k in kinds}

    def cost(a):
        hard = size_dev = soft = 0
        for p in parts:
            size = 0
            for i, c in enumerate(classes):
                cell = sum(a[k][p] * k[i] for k in kinds)
                size += cell
                hard += max(Fraction(0), abs(cell - exact[c][p]) - 1)
                soft += abs(cell - targets[c][p])
            size_dev += abs(size - sizes[p])
        return hard, size_dev, soft

    def moves():
        for k in kinds:
            for p in parts:
                for q in parts:
                    if p != q and alloc[k][p] > 0:
                        yield ((k, p, q),)
        for k1 in kinds:
            for k2 in kinds:
                if k1 == k2:
                    continue
                for p in parts:
                    for q in parts:
                        if p != q and alloc[k1][p] > 0 and alloc[k2][q] > 0:
                            yield ((k1, p, q), (k2, q, p))

    def apply(move, sign):
        for k, p, q in move:
            alloc[k][p] -= sign
            alloc[k][q] += sign

    current = cost(alloc)
    while True:
        best = None
        for move in list(moves()):
            apply(move, 1)
            c = cost(alloc)
            apply(move, -1)
            if c < current and (best is None or c < best[0]):
                best = (c, move)
        if best is None:
            return alloc
        current = best[0]
        apply(best[1], 1)


def _check_stratification(corpus: Corpus, result: DatasetSplit) -> None:
    origin = {s.id: s.origin.value for s in corpus.snippets}
    per_class = Counter(origin.values())
    for p, name in enumerate(PART_NAMES):
        got = Counter(origin[i] for i in result.part(name))
        for c, n in per_class.items():
            exact = Fraction(n * result.ratios[p], 100)
            if abs(got.get(c, 0) - exact) > 1:
                raise SplitError(
                    f"cannot honor stratification: {name} has {got.get(c, 0)} {c} snippets, "
                    f"expected about {float(exact):.1f} (pairing groups too uneven or corpus too small)"
                )


def write_split(result: DatasetSplit, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(result.to_dict(), indent=2) + "\n", encoding="utf-8")


def read_split(path: Union[str, Path]) -> DatasetSplit:
    return DatasetSplit.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# --------------------------------------------------------------------------
# count validation


@dataclass(frozen=True)
class CountCheck:
    origin: str
    expected: int
    actual: int

    @property
    def delta(self) -> int:
        return self.actual - self.expected

    @property
    def ok(self) -> bool:
        return self.delta == 0


@dataclass(frozen=True)
class CountReport:
    checks: Tuple[CountCheck, ...] = field(default_factory=tuple)

    @property
    def mismatches(self) -> int:
        return sum(1 for c in self.checks if not c.ok)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"origin": c.origin, "expected": c.expected, "actual": c.actual, "delta": c.delta}
                for c in self.checks
            ],
        }


def validate_counts(corpus: Corpus, expected_counts: Mapping[str, int]) -> CountReport:
    counts = corpus.counts
    origins = list(counts) + [o for o in expected_counts if o not in counts]
    return CountReport(
        tuple(CountCheck(o, int(expected_counts.get(o, 0)), counts.get(o, 0)) for o in origins)
    )
