"""
Shared fixtures and brute-force oracles

The oracles enumerate every word sequence, sentiment value and hidden
configuration of a tiny model and evaluate the energy directly, so they
depend on nothing but rbm.energy.
"""
import itertools
from types import SimpleNamespace

import numpy as np
import pytest
from click.testing import CliRunner
from scipy.special import logsumexp

from sentopic.models.rbm import energy, onehot
from sentopic.schemas.corpus import TEST, TRAIN, Corpus, Document, SentimentLexicon, SynthSpec, Vocabulary
from sentopic.schemas.model import ModelParams
from sentopic.services.dataset_service import synth_corpus, synth_lexicon


def random_params(rng, K, H, S=0, scale=0.5):
    """Gaussian parameters; S = 0 gives an RS model."""
    return ModelParams(
        W=rng.normal(0.0, scale, size=(K, H)),
        U=rng.normal(0.0, scale, size=(S, H)) if S else None,
        a=rng.normal(0.0, scale, size=K),
        b=rng.normal(0.0, scale, size=H),
        c=rng.normal(0.0, scale, size=S) if S else None,
    )


def sequence_document(sequence, K):
    return Document(counts=np.bincount(np.asarray(sequence, dtype=np.int64), minlength=K))


def hidden_states(H):
    return [np.array(bits, dtype=np.float64) for bits in itertools.product((0, 1), repeat=H)]


def sentiment_states(params):
    if not params.is_joint:
        return [None]
    return [onehot(label, params.S) for label in range(params.S)]


def sequence_log_z(params, D):
    """log of the literal sum over K^D word sequences, sentiments and hidden states"""
    terms = []
    hs = hidden_states(params.H)
    for sequence in itertools.product(range(params.K), repeat=D):
        doc = sequence_document(sequence, params.K)
        for s in sentiment_states(params):
            terms.extend(-energy(params, doc, s, h) for h in hs)
    return float(logsumexp(terms))


def brute_free_energy(params, doc, s=None):
    return float(logsumexp([-energy(params, doc, s, h) for h in hidden_states(params.H)]))


def brute_hidden_given(params, doc, s=None):
    """p(h_j = 1 | v, s) by summing over all hidden configurations"""
    hs = hidden_states(params.H)
    log_w = np.array([-energy(params, doc, s, h) for h in hs])
    p = np.exp(log_w - logsumexp(log_w))
    return np.sum(p[:, None] * np.array(hs), axis=0)


def brute_visible_softmax(params, h, s=None):
    """p(w | h): normalize exp(-E) over the K single-word documents"""
    log_w = np.array([-energy(params, sequence_document([w], params.K), s, h) for w in range(params.K)])
    return np.exp(log_w - logsumexp(log_w))


def brute_sentiment_softmax(params, h, doc):
    log_w = np.array([-energy(params, doc, s, h) for s in sentiment_states(params)])
    return np.exp(log_w - logsumexp(log_w))


@pytest.fixture
def oracle():
    return SimpleNamespace(
        random_params=random_params,
        sequence_document=sequence_document,
        sequence_log_z=sequence_log_z,
        free_energy=brute_free_energy,
        hidden_given=brute_hidden_given,
        visible_softmax=brute_visible_softmax,
        sentiment_softmax=brute_sentiment_softmax,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def review_vocab():
    return Vocabulary(words=("good", "bad", "movie", "plot", "great", "awful"))


@pytest.fixture
def review_lexicon():
    return SentimentLexicon(
        entries={
            "good": (0.0, 1.0, 0.0),
            "great": (0.1, 0.9, 0.0),
            "bad": (0.0, 0.0, 1.0),
            "awful": (0.0, 0.2, 0.8),
            "plot": (1.0, 0.0, 0.0),
        }
    )


@pytest.fixture
def tiny_labeled_corpus():
    """Two words per sentiment, short documents; small enough for exact enumeration"""
    vocab = Vocabulary(words=("good", "bad", "plot"))
    documents = [
        Document(counts=[2, 0, 0], sentiment=1, topic=0),
        Document(counts=[1, 0, 1], sentiment=1, topic=1),
        Document(counts=[0, 2, 0], sentiment=0, topic=0),
        Document(counts=[0, 1, 1], sentiment=0, topic=1),
        Document(counts=[1, 0, 0], sentiment=1, topic=0),
        Document(counts=[0, 1, 0], sentiment=0, topic=1),
    ]
    return Corpus.from_documents(vocab, documents, [TRAIN, TRAIN, TRAIN, TRAIN, TEST, TEST])


@pytest.fixture
def small_spec():
    return SynthSpec(
        vocab_size=40,
        n_topics=2,
        docs_per_class=60,
        min_length=10,
        max_length=20,
        sentiment_skew=2.5,
        topic_skew=2.0,
        sentiment_word_fraction=0.3,
        lexicon_coverage=0.5,
    )


@pytest.fixture
def small_corpus(small_spec):
    return synth_corpus(small_spec, seed=3)


@pytest.fixture
def small_lexicon(small_spec):
    return synth_lexicon(small_spec)


@pytest.fixture
def runner():
    return CliRunner()
