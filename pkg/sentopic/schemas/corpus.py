"""
Corpus schemas
"""
from collections import Counter
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

SENTIMENT_NEGATIVE = 0
SENTIMENT_POSITIVE = 1

TRAIN = "train"
TEST = "test"
SplitName = Literal["train", "test"]

LEXICON_SUM_TOLERANCE = 1e-9


class Polarity(str, Enum):
    """Lexicon polarity of a word"""
    POSITIVE = "positive"
    NEGATIVE = "negative"


class Vocabulary(BaseModel):
    """Ordered list of unique tokens; position is the word index"""
    model_config = ConfigDict(frozen=True)

    words: Tuple[str, ...] = Field(..., min_length=1, description="Tokens in index order")
    _index: Dict[str, int] = PrivateAttr(default_factory=dict)

    @field_validator("words")
    @classmethod
    def _unique(cls, words):
        duplicates = sorted(w for w, n in Counter(words).items() if n > 1)
        if duplicates:
            raise ValueError(f"duplicate vocabulary tokens: {duplicates[:5]}")
        return words

    def model_post_init(self, __context):
        """Build the token -> index map"""
        self._index = {word: i for i, word in enumerate(self.words)}

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def index(self) -> Dict[str, int]:
        return dict(self._index)

    def position(self, token: str) -> Optional[int]:
        return self._index.get(token)

    def __len__(self):
        return len(self.words)

    def __contains__(self, token):
        return token in self._index


class Document(BaseModel):
    """Bag-of-words count vector with optional sentiment and topic labels"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    counts: np.ndarray = Field(..., description="Length-K non-negative word counts")
    sentiment: Optional[int] = Field(None, ge=0, description="Sentiment label in 0..S-1")
    topic: Optional[int] = Field(None, ge=0, description="Topic label for relevance judgments")

    @field_validator("counts", mode="before")
    @classmethod
    def _coerce_counts(cls, value):
        raw = np.asarray(value)
        if raw.ndim != 1:
            raise ValueError(f"counts must be one-dimensional, got shape {raw.shape}")
        if raw.dtype.kind == "f" and not np.all(np.isfinite(raw) & (raw == np.round(raw))):
            raise ValueError("counts must be integers")
        counts = np.array(raw, dtype=np.int64)
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        counts.setflags(write=False)
        return counts

    @property
    def length(self) -> int:
        """D, the number of in-vocabulary tokens"""
        return int(self.counts.sum())

    @property
    def size(self) -> int:
        return int(self.counts.shape[0])

    @property
    def is_empty(self) -> bool:
        return self.length == 0

    def with_labels(self, sentiment: Optional[int] = None, topic: Optional[int] = None) -> "Document":
        return Document(
            counts=self.counts,
            sentiment=self.sentiment if sentiment is None else sentiment,
            topic=self.topic if topic is None else topic,
        )


class SentimentLexicon(BaseModel):
    """Word -> (neutral, positive, negative) weights summing to 1"""
    model_config = ConfigDict(frozen=True)

    entries: Dict[str, Tuple[float, float, float]] = Field(default_factory=dict)

    @field_validator("entries")
    @classmethod
    def _valid_triples(cls, entries):
        for token, weights in entries.items():
            if any(w < 0.0 or w > 1.0 for w in weights):
                raise ValueError(f"weights for {token!r} outside [0, 1]: {weights}")
            if abs(sum(weights) - 1.0) > LEXICON_SUM_TOLERANCE:
                raise ValueError(f"weights for {token!r} sum to {sum(weights)}, not 1")
        return entries

    def polarity(self, token: str) -> Optional[Polarity]:
        """
        Polarity of a token

        A token is polar when its larger sentiment weight exceeds the
        neutral weight; equal positive and negative weights count as
        neutral. Unknown tokens have no polarity.
        """
        weights = self.entries.get(token)
        if weights is None:
            return None
        neutral, positive, negative = weights
        if max(positive, negative) <= neutral or positive == negative:
            return None
        return Polarity.POSITIVE if positive > negative else Polarity.NEGATIVE

    def words_with(self, polarity: Polarity) -> List[str]:
        return sorted(t for t in self.entries if self.polarity(t) is polarity)

    @property
    def positive_count(self) -> int:
        return len(self.words_with(Polarity.POSITIVE))

    @property
    def negative_count(self) -> int:
        return len(self.words_with(Polarity.NEGATIVE))

    def __len__(self):
        return len(self.entries)

    def __contains__(self, token):
        return token in self.entries


class LexiconIntersection(BaseModel):
    """Vocabulary indices shared with a lexicon, split by polarity"""
    model_config = ConfigDict(frozen=True)

    shared: Tuple[int, ...] = ()
    positive: Tuple[int, ...] = ()
    negative: Tuple[int, ...] = ()

    @property
    def counts(self) -> Tuple[int, int, int]:
        return len(self.shared), len(self.positive), len(self.negative)


class Corpus(BaseModel):
    """Documents over a shared vocabulary with a train/test assignment"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vocabulary: Vocabulary
    documents: Tuple[Document, ...] = ()
    split: Tuple[SplitName, ...] = ()
    topic_names: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _consistent(self):
        if len(self.split) != len(self.documents):
            raise ValueError(
                f"split has {len(self.split)} entries for {len(self.documents)} documents"
            )
        size = self.vocabulary.size
        for i, doc in enumerate(self.documents):
            if doc.size != size:
                raise ValueError(f"document {i} has {doc.size} counts, vocabulary has {size} words")
        return self

    @classmethod
    def from_documents(
        cls,
        vocabulary: Vocabulary,
        documents: Iterable[Document],
        split: Optional[Iterable[str]] = None,
        topic_names: Tuple[str, ...] = (),
    ) -> "Corpus":
        documents = tuple(documents)
        split = tuple(split) if split is not None else (TRAIN,) * len(documents)
        return cls(vocabulary=vocabulary, documents=documents, split=split, topic_names=topic_names)

    def indices(self, part: str) -> List[int]:
        return [i for i, name in enumerate(self.split) if name == part]

    @property
    def train_documents(self) -> List[Document]:
        return [self.documents[i] for i in self.indices(TRAIN)]

    @property
    def test_documents(self) -> List[Document]:
        return [self.documents[i] for i in self.indices(TEST)]

    def count_matrix(self, part: Optional[str] = None) -> np.ndarray:
        docs = self.documents if part is None else [self.documents[i] for i in self.indices(part)]
        if not docs:
            return np.zeros((0, self.vocabulary.size), dtype=np.int64)
        return np.vstack([d.counts for d in docs])

    def __len__(self):
        return len(self.documents)


class PreprocessConfig(BaseModel):
    """Text preprocessing settings"""
    lowercase: bool = Field(True, description="Lowercase before tokenizing")
    stopwords: Optional[FrozenSet[str]] = Field(
        None, description="Stop list; None selects the bundled English list"
    )
    stemmer: Literal["porter", "snowball", "none"] = Field("porter", description="Stemmer")
    lemmatize: bool = Field(False, description="Apply the WordNet lemmatizer before stemming")
    token_pattern: str = Field(r"[^\W_]+", description="Regular expression for one token")
    min_token_length: int = Field(1, ge=1, description="Drop shorter tokens")


class SynthSpec(BaseModel):
    """Parameters of a synthetic sentiment/topic corpus"""
    vocab_size: int = Field(50, ge=1, description="K")
    n_sentiments: int = Field(2, ge=2, description="S")
    n_topics: int = Field(2, ge=1, description="Number of topics")
    docs_per_class: int = Field(100, ge=1, description="Documents per sentiment class")
    min_length: int = Field(20, ge=1, description="Shortest document")
    max_length: int = Field(40, ge=1, description="Longest document")
    sentiment_skew: float = Field(2.0, ge=0.0, description="Logit boost of a class's sentiment words")
    topic_skew: float = Field(2.0, ge=0.0, description="Logit boost of a topic's words")
    sentiment_word_fraction: float = Field(0.2, gt=0.0, le=1.0, description="Share of K carrying sentiment")
    lexicon_coverage: float = Field(0.5, ge=0.0, le=1.0, description="Share of sentiment words in the lexicon")
    train_fraction: float = Field(0.5, gt=0.0, lt=1.0, description="Share of each class in the train split")

    @model_validator(mode="after")
    def _length_range(self):
        if self.max_length < self.min_length:
            raise ValueError("max_length must be >= min_length")
        return self


class CorpusStatistics(BaseModel):
    """Summary of a corpus in the style of a dataset table"""
    vocabulary_size: int
    n_train: int
    n_test: int
    mean_length: float
    std_length: float
