import random

from driftmix.tokenizer import META_SYMBOL, normalize


def test_whitespace_collapse():
    assert normalize("a  b") == "▁a▁b"


def test_empty_string():
    assert normalize("") == ""
    assert normalize("   \t\n ") == ""


def test_hashtag_text():
    assert normalize("#worry now") == "▁#worry▁now"


def test_leading_trailing_whitespace_stripped():
    assert normalize("  hi there ") == "▁hi▁there"


def test_mixed_whitespace_forms():
    assert normalize("a\tb\r\nc") == "▁a▁b▁c"


def test_nfkc_compatibility_forms():
    assert normalize("ﬁsh") == "▁fish"       # fi ligature
    assert normalize("ＡＢ") == "▁AB"     # fullwidth letters
    assert normalize("a b") == "▁a▁b"        # nbsp is whitespace after NFKC


def test_case_preserved():
    assert normalize("When") == "▁When"


def test_idempotent():
    rng = random.Random(0)
    alphabet = "abc XYZ \t#@é中"
    for _ in range(200):
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        once = normalize(s)
        assert normalize(once) == once
        assert META_SYMBOL * 2 not in once
