"""Corpus ingestion, filtering, monthly segmentation, and sampling.

Corpora arrive as UTF-8 JSONL, one object per line:

    {"text": str, "ts": ISO-8601, "platform": str,
     "has_media": bool (optional), "url_count": int (optional)}

Unknown keys are ignored.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Iterator


class Platform(str, Enum):
    TWITTER = "twitter"
    REDDIT = "reddit"
    FACEBOOK = "facebook"
    TELEGRAM = "telegram"
    GENERIC = "generic"


@dataclass(frozen=True)
class Document:
    """One timestamped, platform-tagged text unit of a corpus."""

    text: str
    timestamp: datetime
    platform: Platform = Platform.GENERIC
    has_media: bool = False
    url_count: int = 0

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("document text is empty")
        if self.timestamp.tzinfo is None:
            raise ValueError("document timestamp must be timezone-aware")
        if self.url_count < 0:
            raise ValueError("url_count must be non-negative")
        object.__setattr__(self, "timestamp", self.timestamp.astimezone(timezone.utc))

    def month_label(self) -> str:
        return f"{self.timestamp.year:04d}-{self.timestamp.month:02d}"

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "text": self.text,
                "ts": self.timestamp.isoformat().replace("+00:00", "Z"),
                "platform": self.platform.value,
                "has_media": self.has_media,
                "url_count": self.url_count,
            },
            ensure_ascii=False,
        )


@dataclass(frozen=True)
class CorpusSegment:
    """A labelled slice of a corpus, e.g. one calendar month."""

    label: str
    documents: tuple[Document, ...]

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)


@dataclass(frozen=True)
class FilterConfig:
    drop_media: bool = True
    drop_urls: bool = True
    min_chars: int = 1

    def __post_init__(self):
        if self.min_chars < 0:
            raise ValueError("min_chars must be non-negative")


@dataclass
class IngestStats:
    read: int = 0
    emitted: int = 0
    dropped_media: int = 0
    dropped_urls: int = 0
    dropped_short: int = 0
    malformed: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


class IngestError(ValueError):
    """Malformed input line in strict mode; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _parse_timestamp(raw: str) -> datetime:
    ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def parse_record(line: str) -> Document:
    """Parse one JSONL record into a Document; raises ValueError on bad input."""
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    if "text" not in obj:
        raise ValueError("missing text field")
    if "ts" not in obj:
        raise ValueError("missing ts field")
    text = obj["text"]
    if not isinstance(text, str):
        raise ValueError("text field is not a string")
    try:
        platform = Platform(obj.get("platform", "generic"))
    except ValueError:
        raise ValueError(f"unknown platform {obj.get('platform')!r}") from None
    return Document(
        text=text,
        timestamp=_parse_timestamp(obj["ts"]),
        platform=platform,
        has_media=bool(obj.get("has_media", False)),
        url_count=int(obj.get("url_count", 0)),
    )


def ingest(
    lines: Iterable[str],
    cfg: FilterConfig = FilterConfig(),
    strict: bool = False,
) -> tuple[Iterator[Document], IngestStats]:
    """Stream documents out of serialized records, applying content filters.

    Returns a lazy document iterator plus the stats object it fills while
    being consumed (final only once the iterator is exhausted).  Input order
    is preserved.  With ``strict`` a malformed line aborts with its line
    number; otherwise it is counted and skipped.
    """
    stats = IngestStats()

    def gen() -> Iterator[Document]:
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            stats.read += 1
            try:
                doc = parse_record(line)
            except ValueError as exc:
                if strict:
                    raise IngestError(lineno, str(exc)) from exc
                stats.malformed += 1
                continue
            if cfg.drop_media and doc.has_media:
                stats.dropped_media += 1
                continue
            if cfg.drop_urls and doc.url_count > 0:
                stats.dropped_urls += 1
                continue
            if len(doc.text.strip()) < cfg.min_chars:
                stats.dropped_short += 1
                continue
            stats.emitted += 1
            yield doc

    return gen(), stats


def segment_by_month(docs: Iterable[Document]) -> dict[str, CorpusSegment]:
    """Partition documents into calendar-month segments keyed "YYYY-MM" (UTC).

    Every document lands in exactly one segment; input order is preserved
    within each segment and keys come out chronologically sorted.
    """
    buckets: dict[str, list[Document]] = {}
    for doc in docs:
        buckets.setdefault(doc.month_label(), []).append(doc)
    return {
        label: CorpusSegment(label=label, documents=tuple(buckets[label]))
        for label in sorted(buckets)
    }


def sample(segment: CorpusSegment, n: int, seed: int) -> CorpusSegment:
    """Draw min(n, |segment|) documents uniformly without replacement.

    Seeded Fisher-Yates prefix: the same (segment, n, seed) always yields the
    same documents in the same order.
    """
    if n < 1:
        raise ValueError("sample size must be >= 1")
    docs = list(segment.documents)
    k = min(n, len(docs))
    rng = random.Random(seed)
    for i in range(k):
        j = rng.randrange(i, len(docs))
        docs[i], docs[j] = docs[j], docs[i]
    return CorpusSegment(label=segment.label, documents=tuple(docs[:k]))
