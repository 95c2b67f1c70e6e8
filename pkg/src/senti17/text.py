"""Tweet tokenization, token normalization and labeled-corpus loading.

The tokenizer is a deterministic emoticon-aware segmenter in the spirit of
Potts' "happyfuntokenizing": emoticons from a shipped lexicon are matched
longest-first, then URLs, mentions, hashtags, numbers, words and runs of
punctuation. Word tokens are lowercased; emoticons and hashtags are kept
verbatim.
"""

import logging
import re
from dataclasses import dataclass
from importlib import resources

from .errors import DataError
from .labels import LABELS

log = logging.getLogger(__name__)

URL_TOKEN = "url"
USER_TOKEN = "uuser"


def _load_emoticons():
    raw = resources.files("senti17").joinpath("data/emoticons.txt").read_text("utf-8")
    entries = {line.strip() for line in raw.splitlines()}
    return sorted((e for e in entries if e and not e.startswith("# ")),
                  key=lambda e: (-len(e), e))


EMOTICONS = tuple(_load_emoticons())


def _emoticon_alternative(emoticon):
    pattern = re.escape(emoticon)
    # "xD" must not fire inside "xDrive"; ":)" may be glued to anything.
    if emoticon[-1].isalnum():
        pattern += r"(?!\w)"
    if emoticon[0].isalnum():
        pattern = r"(?<!\w)" + pattern
    return pattern


_URL = r"(?:https?://|www\.)\S+"
_EMOTICON = "|".join(_emoticon_alternative(e) for e in EMOTICONS)
_MENTION = r"(?<!\w)@\w+"
_HASHTAG = r"(?<!\w)\#\w+"
_NUMBER = r"[+\-]?\d+(?:[.,:/]\d+)+"
_WORD = r"\w+(?:['’@\-]\w+)*"
_PUNCT = r"[^\w\s]+"

_TOKEN_RE = re.compile(
    "|".join(f"(?P<{name}>{pat})" for name, pat in [
        ("url", _URL),
        ("emoticon", _EMOTICON),
        ("mention", _MENTION),
        ("hashtag", _HASHTAG),
        ("number", _NUMBER),
        ("word", _WORD),
        ("punct", _PUNCT),
    ]),
    re.UNICODE,
)

_URL_PREFIX_RE = re.compile(r"(?:https?://|www\.)", re.IGNORECASE)
_USER_RE = re.compile(r"@\w")


def tokenize(text):
    """Split raw tweet text into a list of tokens.

    >>> tokenize("Nice day :)")
    ['nice', 'day', ':)']
    """
    tokens = []
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        tok = match.group()
        if kind in ("word", "number", "mention", "url"):
            tok = tok.lower()
        tokens.append(tok)
    return tokens


def is_url(token):
    return _URL_PREFIX_RE.match(token) is not None


def is_user(token):
    return _USER_RE.match(token) is not None


def normalize(tokens):
    """Replace web links by ``url`` and user mentions by ``uuser``."""
    out = []
    for tok in tokens:
        if is_url(tok):
            out.append(URL_TOKEN)
        elif is_user(tok):
            out.append(USER_TOKEN)
        else:
            out.append(tok)
    return out


def preprocess(text):
    return normalize(tokenize(text))


@dataclass(frozen=True)
class LabeledExample:
    id: str
    label: str
    tokens: tuple

    def __post_init__(self):
        if self.label not in LABELS:
            raise DataError(f"unknown label {self.label!r}")
        if not self.tokens:
            raise DataError(f"example {self.id!r} has no tokens")


@dataclass
class Corpus:
    """Examples read from a dataset file plus the count of skipped empty tweets."""

    examples: list
    skipped_empty: int = 0

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i):
        return self.examples[i]


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield lineno, line


def load_dataset(path):
    """Read a ``id<TAB>label<TAB>text`` file into a :class:`Corpus`.

    Raises DataError on a wrong field count or an unknown label. Tweets that
    are empty after preprocessing are skipped and counted.
    """
    examples = []
    skipped = 0
    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) != 3:
            raise DataError(f"expected 3 tab-separated fields, got {len(fields)} at line {lineno}")
        ex_id, label, text = fields
        if label not in LABELS:
            raise DataError(f"unknown label {label!r} at line {lineno}")
        tokens = preprocess(text)
        if not tokens:
            skipped += 1
            continue
        examples.append(LabeledExample(ex_id, label, tuple(tokens)))
    if skipped:
        log.warning("%s: skipped %d tweet(s) empty after preprocessing", path, skipped)
    return Corpus(examples, skipped)


def load_unlabeled(path):
    """Read prediction input: ``id<TAB>text`` or the labeled three-field form.

    Returns a list of ``(id, tokens)``; tokens may be empty so that every
    input id receives a prediction.
    """
    rows = []
    for lineno, line in _data_lines(path):
        fields = line.split("\t")
        if len(fields) >= 3 and fields[1] in LABELS:
            ex_id, text = fields[0], "\t".join(fields[2:])
        elif len(fields) >= 2:
            ex_id, text = fields[0], "\t".join(fields[1:])
        else:
            raise DataError(f"expected at least 2 tab-separated fields at line {lineno}")
        rows.append((ex_id, preprocess(text)))
    return rows
