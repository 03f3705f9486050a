import json
import random

import pytest

from driftmix.corpus import (
    CorpusSegment,
    Document,
    FilterConfig,
    IngestError,
    Platform,
    ingest,
    sample,
    segment_by_month,
)
from util import make_doc, ts

PERMISSIVE = FilterConfig(drop_media=False, drop_urls=False, min_chars=1)


def run_ingest(lines, cfg=PERMISSIVE, strict=False):
    docs_iter, stats = ingest(lines, cfg, strict=strict)
    return list(docs_iter), stats


def record(text="hello", ts="2020-04-03T00:00:00Z", **kw):
    return json.dumps({"text": text, "ts": ts, **kw})


def test_media_record_dropped_when_configured():
    lines = [record(has_media=True)]
    docs, stats = run_ingest(lines, FilterConfig(drop_media=True, drop_urls=True))
    assert docs == []
    assert stats.dropped_media == 1
    assert stats.emitted == 0


def test_permissive_config_passes_record_through_unchanged():
    lines = [record(text="hello", ts="2020-04-03T00:00:00Z", platform="reddit")]
    docs, stats = run_ingest(lines)
    assert len(docs) == 1
    doc = docs[0]
    assert doc.text == "hello"
    assert doc.platform is Platform.REDDIT
    assert doc.timestamp == ts("2020-04-03T00:00:00Z")
    assert not doc.has_media and doc.url_count == 0
    assert stats.emitted == 1


def test_url_filter_drops_and_counts():
    lines = [
        record(text="one"),
        record(text="two", url_count=2),
        record(text="three"),
    ]
    docs, stats = run_ingest(lines, FilterConfig(drop_media=True, drop_urls=True))
    assert [d.text for d in docs] == ["one", "three"]
    assert stats.dropped_urls == 1
    assert stats.emitted == 2


def test_short_text_filter():
    docs, stats = run_ingest([record(text="ab"), record(text="abcd")],
                             FilterConfig(drop_media=False, drop_urls=False, min_chars=3))
    assert [d.text for d in docs] == ["abcd"]
    assert stats.dropped_short == 1


def test_malformed_line_skipped_and_counted():
    lines = ["{not json", record(text="ok"), json.dumps({"ts": "2020-01-01T00:00:00Z"})]
    docs, stats = run_ingest(lines)
    assert [d.text for d in docs] == ["ok"]
    assert stats.malformed == 2


def test_strict_mode_aborts_with_line_number():
    lines = [record(), "{broken"]
    docs_iter, _ = ingest(lines, PERMISSIVE, strict=True)
    with pytest.raises(IngestError) as err:
        list(docs_iter)
    assert err.value.lineno == 2


def test_missing_text_is_error_in_strict_mode():
    lines = [json.dumps({"ts": "2020-01-01T00:00:00Z"})]
    docs_iter, _ = ingest(lines, PERMISSIVE, strict=True)
    with pytest.raises(IngestError, match="text"):
        list(docs_iter)


def test_unknown_keys_ignored():
    docs, _ = run_ingest([record(extra_field=123, another="x")])
    assert len(docs) == 1


def test_ingest_is_idempotent():
    rng = random.Random(0)
    lines = [
        record(
            text=f"doc {i}",
            has_media=rng.random() < 0.3,
            url_count=rng.choice([0, 0, 2]),
        )
        for i in range(50)
    ]
    cfg = FilterConfig(drop_media=True, drop_urls=True, min_chars=2)
    once, stats1 = run_ingest(lines, cfg)
    twice, stats2 = run_ingest([d.to_json_line() for d in once], cfg)
    assert [d.text for d in twice] == [d.text for d in once]
    assert stats2.emitted == stats1.emitted
    assert stats2.dropped_media == stats2.dropped_urls == stats2.dropped_short == 0


def test_document_rejects_blank_text():
    with pytest.raises(ValueError):
        make_doc(text="   ")


def test_segment_by_month_disjoint_months():
    docs = [make_doc("a", "2020-04-15T00:00:00Z"), make_doc("b", "2020-05-01T00:00:00Z")]
    segs = segment_by_month(docs)
    assert sorted(segs) == ["2020-04", "2020-05"]
    assert [d.text for d in segs["2020-04"]] == ["a"]
    assert [d.text for d in segs["2020-05"]] == ["b"]


def test_segment_by_month_empty():
    assert segment_by_month([]) == {}


def test_segment_by_month_five_month_window():
    docs = [
        make_doc(f"d{m}", f"2020-{m:02d}-10T08:00:00Z") for m in range(4, 9)
    ]
    segs = segment_by_month(docs)
    assert list(segs) == ["2020-04", "2020-05", "2020-06", "2020-07", "2020-08"]
    assert all(len(segs[k]) == 1 for k in segs)


def test_segment_by_month_partitions_input():
    rng = random.Random(7)
    docs = [
        make_doc(f"doc{i}", f"2021-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}T03:00:00Z")
        for i in range(200)
    ]
    segs = segment_by_month(docs)
    assert sum(len(s) for s in segs.values()) == len(docs)
    seen = [d.text for s in segs.values() for d in s]
    assert sorted(seen) == sorted(d.text for d in docs)
    for label, seg in segs.items():
        assert all(d.month_label() == label for d in seg)


def test_segment_uses_utc_month():
    doc = Document(text="x", timestamp=ts("2020-05-01T01:30:00+03:00"))
    assert doc.month_label() == "2020-04"


def test_sample_exhaustive_is_permutation():
    seg = CorpusSegment("s", tuple(make_doc(f"d{i}") for i in range(10)))
    out = sample(seg, 10, seed=3)
    assert sorted(d.text for d in out) == sorted(d.text for d in seg)


def test_sample_deterministic():
    seg = CorpusSegment("s", tuple(make_doc(f"d{i}") for i in range(10)))
    a = sample(seg, 3, seed=7)
    b = sample(seg, 3, seed=7)
    assert [d.text for d in a] == [d.text for d in b]


def test_sample_caps_at_segment_size():
    seg = CorpusSegment("s", tuple(make_doc(f"d{i}") for i in range(5)))
    out = sample(seg, 100, seed=0)
    assert len(out) == 5
    assert sorted(d.text for d in out) == sorted(d.text for d in seg)


def test_sample_rejects_zero():
    seg = CorpusSegment("s", (make_doc(),))
    with pytest.raises(ValueError):
        sample(seg, 0, seed=0)
