"""Shared test helpers."""

from datetime import datetime, timezone

from driftmix.corpus import Document, Platform


def ts(s: str) -> datetime:
    return datetime.fromisoformat(s.replace("Z", "+00:00"))


def make_doc(
    text="hello",
    when="2020-04-15T12:00:00Z",
    platform=Platform.GENERIC,
    has_media=False,
    url_count=0,
) -> Document:
    return Document(
        text=text,
        timestamp=ts(when),
        platform=platform,
        has_media=has_media,
        url_count=url_count,
    )


def docs_from_texts(texts, when="2020-04-15T12:00:00Z"):
    return [make_doc(t, when) for t in texts]
