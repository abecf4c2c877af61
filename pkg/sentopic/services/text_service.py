"""
Text preprocessing, vocabulary construction and sentiment lexicons
"""
import logging
from collections import Counter
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Sequence

import numpy as np
from nltk.stem import PorterStemmer, SnowballStemmer, WordNetLemmatizer
from nltk.tokenize import RegexpTokenizer

from sentopic.core.errors import DataError, LexiconFormatError
from sentopic.schemas.corpus import (
    Document,
    LexiconIntersection,
    Polarity,
    PreprocessConfig,
    SentimentLexicon,
    Vocabulary,
)

logger = logging.getLogger(__name__)

LEXICON_LOAD_TOLERANCE = 1e-6

# priorpolarity value -> (neutral, positive, negative)
CLUE_WEIGHTS = {
    "positive": (0.0, 1.0, 0.0),
    "negative": (0.0, 0.0, 1.0),
    "neutral": (1.0, 0.0, 0.0),
    "both": (0.0, 0.5, 0.5),
}


@lru_cache(maxsize=1)
def default_stopwords() -> FrozenSet[str]:
    """The bundled English stop list"""
    text = resources.files("sentopic.data").joinpath("stopwords_en.txt").read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=None)
def _stemmer(name: str):
    if name == "porter":
        return PorterStemmer()
    if name == "snowball":
        return SnowballStemmer("english")
    return None


@lru_cache(maxsize=None)
def _tokenizer(pattern: str) -> RegexpTokenizer:
    return RegexpTokenizer(pattern)


def preprocess(raw_text: str, config: Optional[PreprocessConfig] = None) -> List[str]:
    """
    Tokenize, drop stop words and stem a raw text

    Args:
        raw_text: UTF-8 text
        config: Preprocessing settings (defaults: lowercase, bundled
            English stop list, Porter stemmer)

    Returns:
        Token list; empty for empty input
    """
    config = config or PreprocessConfig()
    text = raw_text.lower() if config.lowercase else raw_text
    stopwords = default_stopwords() if config.stopwords is None else config.stopwords
    tokens = [
        token for token in _tokenizer(config.token_pattern).tokenize(text)
        if token not in stopwords and len(token) >= config.min_token_length
    ]
    if config.lemmatize:
        lemmatizer = WordNetLemmatizer()
        tokens = [lemmatizer.lemmatize(token) for token in tokens]
    stemmer = _stemmer(config.stemmer)
    if stemmer is not None:
        tokens = [stemmer.stem(token) for token in tokens]
    return tokens


def build_vocabulary(token_lists: Iterable[Sequence[str]], max_size: int) -> Vocabulary:
    """
    The max_size most frequent tokens

    Ordered by descending frequency, ties broken lexicographically. Fewer
    distinct tokens than max_size gives a smaller vocabulary.
    """
    if max_size < 1:
        raise ValueError(f"max_size must be >= 1, got {max_size}")
    frequencies = Counter()
    for tokens in token_lists:
        frequencies.update(tokens)
    if not frequencies:
        raise DataError("cannot build a vocabulary from an empty token stream")
    ranked = sorted(frequencies.items(), key=lambda item: (-item[1], item[0]))
    return Vocabulary(words=tuple(token for token, _ in ranked[:max_size]))


def vectorize(
    tokens: Sequence[str],
    vocab: Vocabulary,
    sentiment: Optional[int] = None,
    topic: Optional[int] = None,
) -> Document:
    """
    Count vector of in-vocabulary tokens

    Out-of-vocabulary tokens are dropped. A document left with no tokens
    comes back with is_empty set; callers decide whether to skip it.
    """
    positions = [vocab.position(token) for token in tokens]
    positions = [p for p in positions if p is not None]
    counts = np.bincount(np.asarray(positions, dtype=np.int64), minlength=vocab.size)
    return Document(counts=counts, sentiment=sentiment, topic=topic)


def detokenize(doc: Document, vocab: Vocabulary) -> List[str]:
    """Tokens regenerated from counts, in vocabulary order"""
    return [word for word, count in zip(vocab.words, doc.counts) for _ in range(int(count))]


def load_lexicon(path: Path) -> SentimentLexicon:
    """
    Load a three-weight lexicon file

    Each line is `token w_neutral w_positive w_negative`. Blank lines and
    lines starting with '#' are skipped. Triples are renormalized after
    validation so they sum to 1 exactly.
    """
    entries = {}
    with open(path, encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 4:
                raise LexiconFormatError(line_number, f"expected 4 fields, got {len(fields)}")
            token = fields[0]
            try:
                weights = tuple(float(field) for field in fields[1:])
            except ValueError:
                raise LexiconFormatError(line_number, f"non-numeric weight in {line!r}")
            if any(not np.isfinite(w) or w < 0.0 or w > 1.0 for w in weights):
                raise LexiconFormatError(line_number, f"weights outside [0, 1]: {weights}")
            total = sum(weights)
            if abs(total - 1.0) > LEXICON_LOAD_TOLERANCE:
                raise LexiconFormatError(line_number, f"weights sum to {total:g}, not 1")
            if token in entries:
                logger.warning("Lexicon line %d repeats %r; keeping the first entry", line_number, token)
                continue
            entries[token] = tuple(w / total for w in weights)
    lexicon = SentimentLexicon(entries=entries)
    logger.info(
        "Loaded lexicon %s: %d entries, %d positive, %d negative",
        path, len(lexicon), lexicon.positive_count, lexicon.negative_count,
    )
    return lexicon


def lexicon_from_clues(path: Path) -> SentimentLexicon:
    """
    Convert subjectivity-clue lines into a three-weight lexicon

    Lines look like `type=strongsubj len=1 word1=abandon pos1=verb
    stemmed1=y priorpolarity=negative`. The first clue for a word wins.
    """
    entries = {}
    with open(path, encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            fields = dict(part.split("=", 1) for part in raw.split() if "=" in part)
            word = fields.get("word1")
            polarity = fields.get("priorpolarity")
            if word is None or polarity not in CLUE_WEIGHTS:
                raise LexiconFormatError(line_number, f"missing word1 or unknown priorpolarity in {raw.strip()!r}")
            entries.setdefault(word, CLUE_WEIGHTS[polarity])
    return SentimentLexicon(entries=entries)


def stem_lexicon(lexicon: SentimentLexicon, stemmer: str) -> SentimentLexicon:
    """Lexicon keyed by stemmed words; when two words share a stem the first in sorted order wins."""
    stem = _stemmer(stemmer)
    if stem is None:
        return lexicon
    entries = {}
    for token in sorted(lexicon.entries):
        entries.setdefault(stem.stem(token), lexicon.entries[token])
    return SentimentLexicon(entries=entries)


def save_lexicon(lexicon: SentimentLexicon, path: Path, header: Sequence[str] = ()) -> None:
    """One `token w_neutral w_positive w_negative` line per word, after the header comments"""
    with open(path, "w", encoding="utf-8") as handle:
        for line in header:
            handle.write(line if line.startswith("#") else f"# {line}")
            handle.write("\n")
        for token in sorted(lexicon.entries):
            neutral, positive, negative = lexicon.entries[token]
            handle.write(f"{token} {neutral!r} {positive!r} {negative!r}\n")


def lexicon_intersection(vocab: Vocabulary, lex: SentimentLexicon) -> LexiconIntersection:
    """Vocabulary indices found in the lexicon, with their polarity split"""
    shared, positive, negative = [], [], []
    for index, word in enumerate(vocab.words):
        if word not in lex:
            continue
        shared.append(index)
        polarity = lex.polarity(word)
        if polarity is Polarity.POSITIVE:
            positive.append(index)
        elif polarity is Polarity.NEGATIVE:
            negative.append(index)
    return LexiconIntersection(shared=tuple(shared), positive=tuple(positive), negative=tuple(negative))
