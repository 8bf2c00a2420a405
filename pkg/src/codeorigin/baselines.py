"""External AI-text detectors used as baselines.

Covers three things: picking the comparison snippets under each detector's
length limits, mapping the detector's free-text verdicts onto our two
labels, and querying the detector. Queries are replay-first: answers are
read from a CSV fixture, and live mode (opt-in) records every answer into
that fixture so a session can be replayed byte-for-byte later.
"""

from __future__ import annotations

import csv
import logging
import os
import random
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import httpx

from .errors import BaselineTransportError, InputError, ReplayMissError, UnmappedVerdictError
from .metrics import EvalReport, evaluate
from .snippet import CLASS_ORDER, Origin, Snippet

logger = logging.getLogger(__name__)


class BaselineId(str, Enum):
    GPTZERO = "gptzero"
    OPENAI_CLASSIFIER = "openai_classifier"


def normalize_answer(text: str) -> str:
    return " ".join(text.split())


@dataclass(frozen=True)
class VerdictMapping:
    baseline_id: BaselineId
    rules: Tuple[Tuple[str, Origin], ...]

    def map(self, answer_text: str) -> Origin:
        norm = normalize_answer(answer_text)
        for pattern, label in self.rules:
            if normalize_answer(pattern) == norm:
                return label
        raise UnmappedVerdictError(self.baseline_id.value, answer_text)


VERDICT_MAPPINGS: Dict[BaselineId, VerdictMapping] = {
    BaselineId.GPTZERO: VerdictMapping(
        BaselineId.GPTZERO,
        (
            ("Your text is likely to be written entirely by a human", Origin.HUMAN),
            (
                "Your text is most likely human written but there are some sentences with low perplexities",
                Origin.HUMAN,
            ),
            ("Your text is likely to be written entirely by AI", Origin.CHATGPT),
            ("Your text may include parts written by AI", Origin.CHATGPT),
        ),
    ),
    BaselineId.OPENAI_CLASSIFIER: VerdictMapping(
        BaselineId.OPENAI_CLASSIFIER,
        (
            ("The classifier considers the text to be unclear if it is AI-generated", Origin.HUMAN),
            ("The classifier considers the text to be unlikely AI-generated", Origin.HUMAN),
            ("The classifier considers the text to be likely AI-generated", Origin.CHATGPT),
            ("The classifier considers the text to be possibly AI-generated", Origin.CHATGPT),
        ),
    ),
}


def map_verdict(baseline_id: Union[str, BaselineId], answer_text: str) -> Origin:
    try:
        mapping = VERDICT_MAPPINGS[BaselineId(baseline_id)]
    except ValueError:
        raise InputError(f"unknown baseline {baseline_id!r}") from None
    return mapping.map(answer_text)


@dataclass(frozen=True)
class LengthConstraint:
    """Eligible lengths: more than ``min_chars`` (or at least, with ``min_inclusive``), at most ``max_chars``."""

    min_chars: int
    max_chars: Optional[int] = None
    min_inclusive: bool = False

    def __post_init__(self):
        if self.min_chars < 0:
            raise ValueError("min_chars must be nonnegative")
        if self.max_chars is not None and self.max_chars <= self.min_chars:
            raise ValueError("max_chars must exceed min_chars")

    def accepts(self, char_count: int) -> bool:
        low_ok = char_count >= self.min_chars if self.min_inclusive else char_count > self.min_chars
        return low_ok and (self.max_chars is None or char_count <= self.max_chars)


# Input limits of the two detectors.
OPENAI_CLASSIFIER_LIMITS = LengthConstraint(1000)
GPTZERO_LIMITS = LengthConstraint(250, 5000, min_inclusive=True)
DEFAULT_LIMITS = {BaselineId.GPTZERO: GPTZERO_LIMITS, BaselineId.OPENAI_CLASSIFIER: OPENAI_CLASSIFIER_LIMITS}


def select_comparison_set(
    snippets: Iterable[Snippet], constraint: LengthConstraint, n_per_class: int, seed: int
) -> List[Snippet]:
    """Draw ``n_per_class`` eligible snippets per origin; independent of input order."""
    eligible: Dict[Origin, List[Snippet]] = {o: [] for o in CLASS_ORDER}
    for s in snippets:
        if constraint.accepts(s.char_count):
            eligible[s.origin].append(s)
    short = {o.value: len(v) for o, v in eligible.items() if len(v) < n_per_class}
    if short:
        counts = ", ".join(f"{o.value}={len(v)}" for o, v in eligible.items())
        raise InputError(f"not enough eligible snippets for {n_per_class} per class ({counts})")
    rng = random.Random(seed)
    chosen: List[Snippet] = []
    for origin in CLASS_ORDER:
        pool = sorted(eligible[origin], key=lambda s: s.id)
        chosen.extend(rng.sample(pool, n_per_class))
    return chosen


# --------------------------------------------------------------------------
# fixtures


def read_fixture(path: Union[str, Path]) -> Dict[str, str]:
    answers: Dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return answers
        if [h.strip() for h in header] != ["snippet_id", "answer_text"]:
            raise InputError(f"{path}: expected header 'snippet_id,answer_text'")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise InputError(f"{path}: malformed row {row!r}")
            answers[row[0]] = row[1]
    return answers


def write_fixture(rows: Iterable[Tuple[str, str]], path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
        w.writerow(["snippet_id", "answer_text"])
        for sid, answer in rows:
            w.writerow([sid, answer])


def _append_fixture_row(path: Path, snippet_id: str, answer: str) -> None:
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")
        if new:
            w.writerow(["snippet_id", "answer_text"])
        w.writerow([snippet_id, answer])


# --------------------------------------------------------------------------
# querying


class MinIntervalLimiter:
    """Blocks so that consecutive acquisitions are at least ``interval`` seconds apart."""

    def __init__(self, interval: float, clock: Callable[[], float] = time.monotonic, sleep=time.sleep):
        self.interval = interval
        self._clock = clock
        self._sleep = sleep
        self._last: Optional[float] = None

    def wait(self) -> None:
        now = self._clock()
        if self._last is not None:
            delay = self._last + self.interval - now
            if delay > 0:
                self._sleep(delay)
                now = self._clock()
        self._last = now


@dataclass
class LiveConfig:
    endpoint: str
    token_env: Optional[str] = None
    min_interval_ms: int = 1000
    max_retries: int = 3
    backoff_s: float = 1.0
    timeout_s: float = 30.0
    answer_field: str = "answer"


class BaselineClient:
    """Replay (and optionally live) access to one detector.

    Live requests are serialized through a lock and a minimum-interval
    limiter, so at most one request per detector is in flight.
    """

    def __init__(
        self,
        baseline_id: Union[str, BaselineId],
        fixture_path: Union[str, Path],
        live: Optional[LiveConfig] = None,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.baseline_id = BaselineId(baseline_id)
        self.fixture_path = Path(fixture_path)
        self.live_config = live
        self._answers: Optional[Dict[str, str]] = None
        self._lock = threading.Lock()
        self._sleep = sleep
        self._transport = transport
        self._http: Optional[httpx.Client] = None
        interval = (live.min_interval_ms if live else 0) / 1000.0
        self._limiter = MinIntervalLimiter(interval, sleep=sleep)

    @property
    def answers(self) -> Dict[str, str]:
        if self._answers is None:
            self._answers = read_fixture(self.fixture_path) if self.fixture_path.exists() else {}
        return self._answers

    def replay(self, snippet_id: str) -> str:
        try:
            return self.answers[snippet_id]
        except KeyError:
            raise ReplayMissError(snippet_id) from None

    def _client(self) -> httpx.Client:
        if self._http is None:
            cfg = self.live_config
            headers = {}
            if cfg.token_env:
                token = os.environ.get(cfg.token_env)
                if not token:
                    raise InputError(f"environment variable {cfg.token_env} is not set")
                headers["Authorization"] = f"Bearer {token}"
            self._http = httpx.Client(headers=headers, timeout=cfg.timeout_s, transport=self._transport)
        return self._http

    def live(self, snippet: Snippet) -> str:
        if self.live_config is None:
            raise InputError(f"{self.baseline_id.value}: live mode needs an endpoint configuration")
        cfg = self.live_config
        with self._lock:
            last_error: Optional[Exception] = None
            for attempt in range(cfg.max_retries + 1):
                if attempt:
                    self._sleep(cfg.backoff_s * 2 ** (attempt - 1))
                self._limiter.wait()
                try:
                    resp = self._client().post(cfg.endpoint, json={"text": snippet.text})
                except httpx.TransportError as exc:
                    last_error = exc
                    logger.warning("%s: transport error on %s: %s", self.baseline_id.value, snippet.id, exc)
                    continue
                if resp.status_code == 429 or resp.status_code >= 500:
                    last_error = BaselineTransportError(f"HTTP {resp.status_code}")
                    logger.warning("%s: HTTP %s on %s", self.baseline_id.value, resp.status_code, snippet.id)
                    continue
                if resp.status_code >= 400:
                    raise BaselineTransportError(f"{self.baseline_id.value}: HTTP {resp.status_code}: {resp.text[:200]}")
                try:
                    answer = str(resp.json()[cfg.answer_field])
                except (ValueError, KeyError, TypeError) as exc:
                    raise BaselineTransportError(f"{self.baseline_id.value}: unexpected response body") from exc
                _append_fixture_row(self.fixture_path, snippet.id, answer)
                self.answers[snippet.id] = answer
                return answer
            raise BaselineTransportError(
                f"{self.baseline_id.value}: giving up on {snippet.id} after {cfg.max_retries + 1} attempts: {last_error}"
            )

    def close(self) -> None:
        if self._http is not None:
            self._http.close()
            self._http = None


def query_baseline(client: BaselineClient, snippet: Snippet, mode: str = "replay") -> str:
    if mode == "replay":
        return client.replay(snippet.id)
    if mode == "live":
        return client.live(snippet)
    raise InputError(f"unknown query mode {mode!r} (expected 'replay' or 'live')")


@dataclass(frozen=True)
class BaselineScore:
    baseline_id: BaselineId
    predictions: Dict[str, Origin]
    correct: int
    total: int
    report: EvalReport

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


def score_answers(
    baseline_id: Union[str, BaselineId], answers: Mapping[str, str], truth: Mapping[str, Origin]
) -> BaselineScore:
    """Map every answer to a label and score it against ``truth`` (ids in ``truth`` order)."""
    bid = BaselineId(baseline_id)
    ids = list(truth)
    missing = [i for i in ids if i not in answers]
    if missing:
        raise ReplayMissError(missing[0])
    preds = {i: map_verdict(bid, answers[i]) for i in ids}
    gold = [Origin.parse(truth[i]) for i in ids]
    guessed = [preds[i] for i in ids]
    correct = sum(g is p for g, p in zip(gold, guessed))
    report = evaluate(gold, guessed, dataset="baseline", config=bid.value) if ids else None
    return BaselineScore(bid, preds, correct, len(ids), report)


def score_fixture(
    baseline_id: Union[str, BaselineId], fixture_path: Union[str, Path], truth: Mapping[str, Origin]
) -> BaselineScore:
    return score_answers(baseline_id, read_fixture(fixture_path), truth)
