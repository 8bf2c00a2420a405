import httpx
import pytest

from codeorigin.baselines import (
    GPTZERO_LIMITS,
    OPENAI_CLASSIFIER_LIMITS,
    VERDICT_MAPPINGS,
    BaselineClient,
    BaselineId,
    LengthConstraint,
    LiveConfig,
    MinIntervalLimiter,
    map_verdict,
    query_baseline,
    read_fixture,
    score_answers,
    score_fixture,
    select_comparison_set,
    write_fixture,
)
from codeorigin.errors import BaselineTransportError, InputError, ReplayMissError, UnmappedVerdictError
from codeorigin.snippet import Origin, Snippet

ANSWERS = [
    ("gptzero", "Your text is likely to be written entirely by a human", Origin.HUMAN),
    ("gptzero", "Your text is most likely human written but there are some sentences with low perplexities", Origin.HUMAN),
    ("gptzero", "Your text is likely to be written entirely by AI", Origin.CHATGPT),
    ("gptzero", "Your text may include parts written by AI", Origin.CHATGPT),
    ("openai_classifier", "The classifier considers the text to be unclear if it is AI-generated", Origin.HUMAN),
    ("openai_classifier", "The classifier considers the text to be unlikely AI-generated", Origin.HUMAN),
    ("openai_classifier", "The classifier considers the text to be likely AI-generated", Origin.CHATGPT),
    ("openai_classifier", "The classifier considers the text to be possibly AI-generated", Origin.CHATGPT),
]


@pytest.mark.parametrize("baseline, answer, label", ANSWERS)
def test_verdict_mapping(baseline, answer, label):
    assert map_verdict(baseline, answer) is label


def test_mapping_tables_complete():
    assert sum(len(m.rules) for m in VERDICT_MAPPINGS.values()) == 8


def test_whitespace_is_normalized():
    assert map_verdict("gptzero", "  Your text may include\nparts written by AI ") is Origin.CHATGPT


def test_unmapped_answer_is_error():
    with pytest.raises(UnmappedVerdictError) as err:
        map_verdict("gptzero", "Unsure")
    assert "gptzero" in str(err.value) and "Unsure" in str(err.value)
    # an answer of the other detector is not accepted either
    with pytest.raises(UnmappedVerdictError):
        map_verdict("gptzero", ANSWERS[-1][1])
    with pytest.raises(InputError):
        map_verdict("nope", "x")


def test_length_constraints():
    assert not OPENAI_CLASSIFIER_LIMITS.accepts(1000)
    assert OPENAI_CLASSIFIER_LIMITS.accepts(1001)
    assert GPTZERO_LIMITS.accepts(250) and GPTZERO_LIMITS.accepts(5000)
    assert not GPTZERO_LIMITS.accepts(249) and not GPTZERO_LIMITS.accepts(5001)
    with pytest.raises(ValueError):
        LengthConstraint(10, 5)


def _pool():
    snippets = []
    for i in range(30):
        snippets.append(Snippet(f"h{i:02d}", "human", "x" * (900 + 10 * i)))
        snippets.append(Snippet(f"g{i:02d}", "chatgpt", "y" * (900 + 10 * i)))
    return snippets


def test_comparison_set_selection():
    pool = _pool()
    chosen = select_comparison_set(pool, OPENAI_CLASSIFIER_LIMITS, 10, seed=1)
    assert len(chosen) == 20
    assert sum(s.origin is Origin.HUMAN for s in chosen) == 10
    assert all(s.char_count > 1000 for s in chosen)
    again = select_comparison_set(list(reversed(pool)), OPENAI_CLASSIFIER_LIMITS, 10, seed=1)
    assert [s.id for s in again] == [s.id for s in chosen]


def test_comparison_set_too_small():
    with pytest.raises(InputError) as err:
        select_comparison_set(_pool(), OPENAI_CLASSIFIER_LIMITS, 25, seed=1)
    assert "human=19" in str(err.value)


def _fixture_rows(n=100, correct=64):
    """n rows over a balanced truth; the first ``correct`` answers are right."""
    truth, rows = {}, []
    right = {Origin.HUMAN: ANSWERS[0][1], Origin.CHATGPT: ANSWERS[2][1]}
    for i in range(n):
        origin = Origin.HUMAN if i % 2 == 0 else Origin.CHATGPT
        sid = f"s{i:03d}"
        truth[sid] = origin
        rows.append((sid, right[origin] if i < correct else right[origin.other]))
    return truth, rows


def test_fixture_scoring_accuracy(tmp_path):
    truth, rows = _fixture_rows()
    write_fixture(rows, tmp_path / "gz.csv")
    score = score_fixture("gptzero", tmp_path / "gz.csv", truth)
    assert score.correct == 64 and score.total == 100
    assert score.accuracy == 0.64
    assert score.report.accuracy == 0.64


def test_fixture_round_trip_with_commas_and_quotes(tmp_path):
    rows = [("a", 'He said "hi", then left'), ("b", "plain")]
    write_fixture(rows, tmp_path / "f.csv")
    assert read_fixture(tmp_path / "f.csv") == dict(rows)


def test_replay_and_miss(tmp_path):
    write_fixture([("s1", ANSWERS[0][1])], tmp_path / "f.csv")
    client = BaselineClient("gptzero", tmp_path / "f.csv")
    assert query_baseline(client, Snippet("s1", "human", "x")) == ANSWERS[0][1]
    with pytest.raises(ReplayMissError):
        query_baseline(client, Snippet("s2", "human", "x"))
    with pytest.raises(InputError):
        query_baseline(client, Snippet("s1", "human", "x"), mode="psychic")
    with pytest.raises(InputError):
        client.live(Snippet("s1", "human", "x"))


def test_score_missing_answer():
    with pytest.raises(ReplayMissError):
        score_answers("gptzero", {}, {"s1": Origin.HUMAN})


class FakeClock:
    def __init__(self):
        self.now = 0.0
        self.sleeps = []

    def __call__(self):
        return self.now

    def sleep(self, dt):
        self.sleeps.append(dt)
        self.now += dt


def test_min_interval_limiter():
    clock = FakeClock()
    lim = MinIntervalLimiter(1.0, clock=clock, sleep=clock.sleep)
    lim.wait()
    clock.now += 0.25
    lim.wait()
    assert clock.sleeps == [0.75]


def _live_client(tmp_path, handler, **cfg):
    sleeps = []
    live = LiveConfig("https://detector.test/api", min_interval_ms=0, backoff_s=0.5, **cfg)
    client = BaselineClient(
        BaselineId.GPTZERO, tmp_path / "rec.csv", live, transport=httpx.MockTransport(handler), sleep=sleeps.append
    )
    return client, sleeps


def test_live_records_answers(tmp_path, monkeypatch):
    seen = []

    def handler(request):
        seen.append((request.headers.get("authorization"), request.read()))
        return httpx.Response(200, json={"answer": ANSWERS[2][1]})

    monkeypatch.setenv("DETECTOR_TOKEN", "sekret")
    client, _ = _live_client(tmp_path, handler, token_env="DETECTOR_TOKEN")
    snippet = Snippet("s1", "chatgpt", "class A {}")
    assert query_baseline(client, snippet, "live") == ANSWERS[2][1]
    client.close()
    assert seen[0][0] == "Bearer sekret"
    assert b"class A {}" in seen[0][1]
    # the recorded fixture replays identically
    replay = BaselineClient("gptzero", tmp_path / "rec.csv")
    assert replay.replay("s1") == ANSWERS[2][1]


def test_live_retries_then_succeeds(tmp_path):
    calls = []

    def handler(request):
        calls.append(1)
        if len(calls) < 3:
            return httpx.Response(429 if len(calls) == 1 else 503)
        return httpx.Response(200, json={"answer": ANSWERS[0][1]})

    client, sleeps = _live_client(tmp_path, handler)
    assert client.live(Snippet("s1", "human", "x")) == ANSWERS[0][1]
    assert sleeps == [0.5, 1.0]


def test_live_gives_up(tmp_path):
    def handler(request):
        raise httpx.ConnectError("down", request=request)

    client, _ = _live_client(tmp_path, handler, max_retries=2)
    with pytest.raises(BaselineTransportError):
        client.live(Snippet("s1", "human", "x"))
    assert not (tmp_path / "rec.csv").exists()


def test_live_client_error_not_retried(tmp_path):
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(400, text="bad request")

    client, _ = _live_client(tmp_path, handler)
    with pytest.raises(BaselineTransportError):
        client.live(Snippet("s1", "human", "x"))
    assert len(calls) == 1


def test_live_missing_token(tmp_path, monkeypatch):
    monkeypatch.delenv("NO_SUCH_TOKEN", raising=False)
    client, _ = _live_client(tmp_path, lambda r: httpx.Response(200, json={"answer": "x"}), token_env="NO_SUCH_TOKEN")
    with pytest.raises(InputError):
        client.live(Snippet("s1", "human", "x"))
