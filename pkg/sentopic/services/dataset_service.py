"""
Derived datasets: lexicon sentiment tagging, the merged review corpus,
stratified splits and synthetic corpora
"""
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import softmax

from sentopic.core.errors import DataError, StratificationError
from sentopic.core.random import RandomStreams
from sentopic.schemas.corpus import (
    SENTIMENT_NEGATIVE,
    SENTIMENT_POSITIVE,
    TEST,
    TRAIN,
    Corpus,
    CorpusStatistics,
    Document,
    SentimentLexicon,
    SynthSpec,
    Vocabulary,
)
from sentopic.services.text_service import lexicon_intersection

logger = logging.getLogger(__name__)

MRMDS_TOPICS = ("movie", "book", "dvd", "electronics", "kitchen")


def polarity_counts(counts: np.ndarray, positive: Sequence[int], negative: Sequence[int]) -> Tuple[int, int]:
    """Token-weighted (positive, negative) lexicon word counts of one document"""
    return int(counts[list(positive)].sum()), int(counts[list(negative)].sum())


def derive_sentiment_tags(corpus: Corpus, lex: SentimentLexicon) -> Corpus:
    """
    Label documents by lexicon word majority

    Positive majority -> positive, negative majority -> negative. Exact
    ties (including documents with no lexicon words) are left out of the
    result. Existing sentiment labels are ignored; topics and the split
    assignment are kept.
    """
    shared = lexicon_intersection(corpus.vocabulary, lex)
    documents, split = [], []
    excluded = 0
    for doc, part in zip(corpus.documents, corpus.split):
        positive, negative = polarity_counts(doc.counts, shared.positive, shared.negative)
        if positive == negative:
            excluded += 1
            continue
        label = SENTIMENT_POSITIVE if positive > negative else SENTIMENT_NEGATIVE
        documents.append(Document(counts=doc.counts, sentiment=label, topic=doc.topic))
        split.append(part)
    logger.info("Sentiment tagging: %d labeled, %d excluded as ties", len(documents), excluded)
    return Corpus(
        vocabulary=corpus.vocabulary,
        documents=tuple(documents),
        split=tuple(split),
        topic_names=corpus.topic_names,
    )


def stratified_split(
    documents: Sequence[Document],
    train_per_class: int,
    seed: int,
    key: Callable[[Document], Optional[int]] = lambda doc: doc.sentiment,
    stream: str = "split",
) -> List[str]:
    """
    Train/test assignment with exactly train_per_class training documents
    per class; the rest of each class goes to test

    Documents whose key is None go to test.
    """
    rng = RandomStreams(seed).generator(stream)
    split = [TEST] * len(documents)
    by_class: Dict[int, List[int]] = {}
    for i, doc in enumerate(documents):
        label = key(doc)
        if label is not None:
            by_class.setdefault(label, []).append(i)
    for label in sorted(by_class):
        members = by_class[label]
        if len(members) < train_per_class:
            raise StratificationError(
                f"class {label} has {len(members)} documents, {train_per_class} needed for training "
                f"(short by {train_per_class - len(members)})"
            )
        for i in rng.permutation(members)[:train_per_class]:
            split[int(i)] = TRAIN
    return split


def build_mrmds(
    mr: Corpus,
    mds_parts: Sequence[Corpus],
    vocab: Vocabulary,
    seed: int,
    per_class: int = 1000,
    train_per_class: int = 750,
) -> Corpus:
    """
    Merge the movie reviews with the four product-review corpora

    Each source becomes one topic (movie, book, dvd, electronics,
    kitchen) and contributes per_class positive and per_class negative
    documents. Per topic and sentiment, train_per_class documents go to
    train and the rest to test (750/250 by default, so 7500 train and
    2500 test overall).

    Raises:
        StratificationError: a source has fewer than per_class documents
            of a sentiment
    """
    if len(mds_parts) != len(MRMDS_TOPICS) - 1:
        raise DataError(f"expected {len(MRMDS_TOPICS) - 1} product corpora, got {len(mds_parts)}")
    if train_per_class > per_class:
        raise DataError("train_per_class cannot exceed per_class")

    streams = RandomStreams(seed)
    documents, split = [], []
    for topic, (name, source) in enumerate(zip(MRMDS_TOPICS, [mr, *mds_parts])):
        if source.vocabulary.words != vocab.words:
            raise DataError(f"{name} corpus does not use the shared vocabulary")
        for label in (SENTIMENT_NEGATIVE, SENTIMENT_POSITIVE):
            members = [doc for doc in source.documents if doc.sentiment == label]
            if len(members) < per_class:
                raise StratificationError(
                    f"{name}: {len(members)} documents with sentiment {label}, {per_class} required "
                    f"(short by {per_class - len(members)})"
                )
            chosen = np.sort(streams.generator("mrmds-select", topic, label).permutation(len(members))[:per_class])
            order = streams.generator("split", topic, label).permutation(per_class)
            is_train = np.zeros(per_class, dtype=bool)
            is_train[order[:train_per_class]] = True
            for position, member in enumerate(chosen):
                documents.append(Document(counts=members[member].counts, sentiment=label, topic=topic))
                split.append(TRAIN if is_train[position] else TEST)
    logger.info("Merged review corpus: %d train, %d test", split.count(TRAIN), split.count(TEST))
    return Corpus(vocabulary=vocab, documents=tuple(documents), split=tuple(split), topic_names=MRMDS_TOPICS)


def _synth_layout(spec: SynthSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Topic of every word, and sentiment class of every word (-1 for neutral words)"""
    K = spec.vocab_size
    # sentiment classes alternate fastest so each class has words in every topic
    word_topic = (np.arange(K) // spec.n_sentiments) % spec.n_topics
    n_sentiment_words = max(1, math.ceil(K * spec.sentiment_word_fraction))
    word_sentiment = np.full(K, -1)
    word_sentiment[:n_sentiment_words] = np.arange(n_sentiment_words) % spec.n_sentiments
    return word_topic, word_sentiment


def synth_vocabulary(spec: SynthSpec) -> Vocabulary:
    width = len(str(spec.vocab_size - 1))
    return Vocabulary(words=tuple(f"w{k:0{width}d}" for k in range(spec.vocab_size)))


def synth_corpus(spec: SynthSpec, seed: int) -> Corpus:
    """
    Sample a corpus whose word distributions depend on sentiment and topic

    Class (sentiment s, topic t) draws words from softmax of
    topic_skew * [word in topic t] + sentiment_skew * [word carries s].
    Topics are assigned round-robin within each sentiment class, and each
    class is split train/test by train_fraction.

    Raises:
        DataError: vocab_size smaller than n_topics
    """
    if spec.vocab_size < spec.n_topics:
        raise DataError(f"vocab_size {spec.vocab_size} is smaller than n_topics {spec.n_topics}")
    streams = RandomStreams(seed)
    rng = streams.generator("synth")
    word_topic, word_sentiment = _synth_layout(spec)

    documents, split = [], []
    n_train = int(round(spec.train_fraction * spec.docs_per_class))
    for s in range(spec.n_sentiments):
        class_split = np.full(spec.docs_per_class, TEST, dtype=object)
        class_split[streams.generator("split", s).permutation(spec.docs_per_class)[:n_train]] = TRAIN
        for i in range(spec.docs_per_class):
            t = i % spec.n_topics
            logits = spec.topic_skew * (word_topic == t) + spec.sentiment_skew * (word_sentiment == s)
            length = int(rng.integers(spec.min_length, spec.max_length + 1))
            counts = rng.multinomial(length, softmax(logits))
            documents.append(Document(counts=counts, sentiment=s, topic=t))
            split.append(str(class_split[i]))
    return Corpus(
        vocabulary=synth_vocabulary(spec),
        documents=tuple(documents),
        split=tuple(split),
        topic_names=tuple(f"topic{t}" for t in range(spec.n_topics)),
    )


def synth_lexicon(spec: SynthSpec) -> SentimentLexicon:
    """
    Lexicon for a synthetic corpus

    Covers the first lexicon_coverage share of the positive-class and
    negative-class sentiment words.
    """
    vocab = synth_vocabulary(spec)
    _, word_sentiment = _synth_layout(spec)
    entries = {}
    for label, weights in ((SENTIMENT_POSITIVE, (0.0, 1.0, 0.0)), (SENTIMENT_NEGATIVE, (0.0, 0.0, 1.0))):
        members = np.flatnonzero(word_sentiment == label)
        for k in members[:math.ceil(spec.lexicon_coverage * len(members))]:
            entries[vocab.words[k]] = weights
    return SentimentLexicon(entries=entries)


def drop_empty(corpus: Corpus) -> Corpus:
    """Remove documents with no in-vocabulary tokens, with a warning"""
    keep = [i for i, doc in enumerate(corpus.documents) if not doc.is_empty]
    dropped = len(corpus) - len(keep)
    if dropped:
        logger.warning("Skipping %d empty documents", dropped)
    return Corpus(
        vocabulary=corpus.vocabulary,
        documents=tuple(corpus.documents[i] for i in keep),
        split=tuple(corpus.split[i] for i in keep),
        topic_names=corpus.topic_names,
    )


def corpus_statistics(corpus: Corpus) -> CorpusStatistics:
    lengths = np.array([doc.length for doc in corpus.documents], dtype=np.float64)
    return CorpusStatistics(
        vocabulary_size=corpus.vocabulary.size,
        n_train=len(corpus.indices(TRAIN)),
        n_test=len(corpus.indices(TEST)),
        mean_length=float(lengths.mean()) if lengths.size else 0.0,
        std_length=float(lengths.std()) if lengths.size else 0.0,
    )
