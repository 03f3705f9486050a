"""Text canonicalization applied before any segmentation or training."""

import unicodedata

# Word-boundary marker (U+2581) substituted for spaces so that tokenization
# is whitespace-agnostic.  Reserved: input text should not contain it.
META_SYMBOL = "▁"


def normalize(text: str) -> str:
    """NFKC-normalize, collapse whitespace runs, and mark word boundaries.

    Whitespace runs become single boundary markers, with one prepended at the
    start of non-empty text.  Idempotent: normalized text passes through
    unchanged.
    """
    t = unicodedata.normalize("NFKC", text)
    t = " ".join(t.split())
    if not t:
        return ""
    t = t.replace(" ", META_SYMBOL)
    if not t.startswith(META_SYMBOL):
        t = META_SYMBOL + t
    return t
