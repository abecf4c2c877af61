"""
Sentiment classification: the joint model's sentiment layer, the lexicon
word-count baseline, and a two-layer network warm-started from the RBM
"""
import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import softmax

from sentopic.core.errors import DataError, DimensionMismatchError
from sentopic.models.rbm import hidden_given_v, require_joint, sentiment_softmax
from sentopic.schemas.corpus import SENTIMENT_NEGATIVE, SENTIMENT_POSITIVE, Document, SentimentLexicon, Vocabulary
from sentopic.schemas.model import ModelParams
from sentopic.schemas.tasks import BaselineConfig, ClassificationReport, ClassificationRow, MLPResult
from sentopic.services.dataset_service import polarity_counts
from sentopic.services.text_service import lexicon_intersection

logger = logging.getLogger(__name__)


def classify_sentiment(params: ModelParams, doc: Document) -> Tuple[int, np.ndarray]:
    """
    Most probable sentiment of a document

    p(s | h) is evaluated at the real-valued hidden probabilities p(h | v);
    argmax ties go to the lowest label.

    Raises:
        ModeError: params are RS
    """
    require_joint(params, "classify_sentiment")
    probs = sentiment_softmax(params, hidden_given_v(params, doc))
    return int(np.argmax(probs)), probs


def count_baseline(
    doc: Document,
    vocab: Vocabulary,
    lex: SentimentLexicon,
    config: Optional[BaselineConfig] = None,
) -> int:
    """Token-weighted positive vs negative lexicon word count; ties go to config.tie_label (negative)."""
    shared = lexicon_intersection(vocab, lex)
    return _baseline_label(doc, shared.positive, shared.negative, config or BaselineConfig())


def _baseline_label(doc: Document, positive, negative, config: BaselineConfig) -> int:
    n_positive, n_negative = polarity_counts(doc.counts, positive, negative)
    if n_positive == n_negative:
        return config.tie_label
    return SENTIMENT_POSITIVE if n_positive > n_negative else SENTIMENT_NEGATIVE


def classify_corpus(params: ModelParams, docs: Sequence[Document]) -> ClassificationReport:
    rows = []
    for i, doc in enumerate(docs):
        label, probs = classify_sentiment(params, doc)
        rows.append(ClassificationRow(doc_id=i, gold=doc.sentiment, predicted=label, probs=probs.tolist()))
    return ClassificationReport(method="model", rows=rows)


def baseline_corpus(
    docs: Sequence[Document],
    vocab: Vocabulary,
    lex: SentimentLexicon,
    config: Optional[BaselineConfig] = None,
) -> ClassificationReport:
    config = config or BaselineConfig()
    shared = lexicon_intersection(vocab, lex)
    logger.info("Baseline lexicon coverage: %d shared, %d positive, %d negative", *shared.counts)
    rows = [
        ClassificationRow(doc_id=i, gold=doc.sentiment, predicted=_baseline_label(doc, shared.positive, shared.negative, config))
        for i, doc in enumerate(docs)
    ]
    return ClassificationReport(method="baseline", rows=rows)


class SentimentMLP:
    """
    Two-layer network: tanh hidden layer of size H, softmax output of size S

    Inputs are raw count vectors. Trained by backpropagation of the mean
    cross-entropy.
    """

    def __init__(self, W1: np.ndarray, b1: np.ndarray, W2: np.ndarray, b2: np.ndarray):
        self.W1 = np.array(W1, dtype=np.float64)
        self.b1 = np.array(b1, dtype=np.float64)
        self.W2 = np.array(W2, dtype=np.float64)
        self.b2 = np.array(b2, dtype=np.float64)
        K, H = self.W1.shape
        if self.b1.shape != (H,) or self.W2.shape[0] != H or self.b2.shape != (self.W2.shape[1],):
            raise DimensionMismatchError(
                f"inconsistent layer shapes W1 {self.W1.shape}, b1 {self.b1.shape}, "
                f"W2 {self.W2.shape}, b2 {self.b2.shape}"
            )

    @classmethod
    def from_rbm(cls, params: ModelParams, mean_length: float) -> "SentimentMLP":
        """
        Network that reproduces the RBM's sentiment readout

        tanh(x / 2) = 2 sigmoid(x) - 1, so the tanh layer gets W / 2 and
        b * mean_length / 2, and the output layer gets U^T / 2 with bias
        c + U.sum(axis=1) / 2. Before training, the network's prediction is
        then p(s | p(h | v)) for every document of the mean length.

        The RBM scales b by each document's own D; the network has one bias,
        so the mean training length stands in for D.
        """
        require_joint(params, "SentimentMLP.from_rbm")
        return cls(params.W / 2.0, params.b * mean_length / 2.0, params.U.T / 2.0, params.c + params.U.sum(axis=1) / 2.0)

    @classmethod
    def random(cls, K: int, H: int, S: int, rng: np.random.Generator, sigma: float = 0.1) -> "SentimentMLP":
        return cls(rng.normal(0.0, sigma, size=(K, H)), np.zeros(H), rng.normal(0.0, sigma, size=(H, S)), np.zeros(S))

    @property
    def K(self) -> int:
        return self.W1.shape[0]

    @property
    def S(self) -> int:
        return self.W2.shape[1]

    def _check_inputs(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.K:
            raise DimensionMismatchError(f"inputs have {X.shape[1]} features, network expects {self.K}")
        return X

    def predict_proba(self, X) -> np.ndarray:
        X = self._check_inputs(X)
        return softmax(np.tanh(X @ self.W1 + self.b1) @ self.W2 + self.b2, axis=1)

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=1)

    def loss_and_gradients(self, X, y) -> Tuple[float, Dict[str, np.ndarray]]:
        """Mean cross-entropy and its gradient for every layer"""
        X = self._check_inputs(X)
        y = np.asarray(y, dtype=np.int64)
        n = X.shape[0]
        hidden = np.tanh(X @ self.W1 + self.b1)
        probs = softmax(hidden @ self.W2 + self.b2, axis=1)
        loss = -float(np.mean(np.log(probs[np.arange(n), y])))
        delta = probs
        delta[np.arange(n), y] -= 1.0
        delta /= n
        back = (delta @ self.W2.T) * (1.0 - hidden ** 2)
        return loss, {
            "W1": X.T @ back,
            "b1": back.sum(axis=0),
            "W2": hidden.T @ delta,
            "b2": delta.sum(axis=0),
        }

    def fit(self, X, y, epochs: int, learning_rate: float, rng: np.random.Generator, batch_size: int = 1) -> "SentimentMLP":
        """Minibatch SGD; example order reshuffled each epoch."""
        X = self._check_inputs(X)
        y = np.asarray(y, dtype=np.int64)
        if len(y) != X.shape[0]:
            raise DimensionMismatchError(f"{X.shape[0]} inputs but {len(y)} labels")
        if len(y) and (y.min() < 0 or y.max() >= self.S):
            raise DimensionMismatchError(f"labels must lie in 0..{self.S - 1}")
        for _ in range(epochs):
            order = rng.permutation(len(y))
            for start in range(0, len(y), batch_size):
                batch = order[start:start + batch_size]
                _, grads = self.loss_and_gradients(X[batch], y[batch])
                for name, grad in grads.items():
                    getattr(self, name)[...] -= learning_rate * grad
        return self

    def accuracy(self, X, y) -> float:
        y = np.asarray(y, dtype=np.int64)
        return float(np.mean(self.predict(X) == y)) if len(y) else float("nan")


def _labeled(docs: Sequence[Document], name: str) -> Tuple[np.ndarray, np.ndarray]:
    if any(doc.sentiment is None for doc in docs):
        raise DataError(f"every {name} document needs a sentiment label")
    if not docs:
        raise DataError(f"no {name} documents")
    return np.vstack([doc.counts for doc in docs]).astype(np.float64), np.array([doc.sentiment for doc in docs])


def mlp_finetune(
    params: ModelParams,
    train_docs: Sequence[Document],
    test_docs: Sequence[Document],
    epochs: int,
    learning_rate: float,
    rng: np.random.Generator,
    batch_size: int = 1,
) -> Tuple[SentimentMLP, MLPResult]:
    """
    Fine-tune a warm-started network next to a randomly initialized one

    Both arms see the same example order. Returns the warm-started network
    and the test accuracy of both arms.
    """
    X_train, y_train = _labeled(train_docs, "training")
    X_test, y_test = _labeled(test_docs, "test")
    if X_train.shape[1] != params.K:
        raise DimensionMismatchError(f"documents have {X_train.shape[1]} counts, model has K={params.K}")
    mean_length = float(X_train.sum(axis=1).mean())

    warm = SentimentMLP.from_rbm(params, mean_length)
    cold = SentimentMLP.random(params.K, params.H, params.S, rng)
    order_seed = int(rng.integers(2 ** 63))
    warm.fit(X_train, y_train, epochs, learning_rate, np.random.default_rng(order_seed), batch_size)
    cold.fit(X_train, y_train, epochs, learning_rate, np.random.default_rng(order_seed), batch_size)
    result = MLPResult(
        warm_accuracy=warm.accuracy(X_test, y_test),
        random_accuracy=cold.accuracy(X_test, y_test),
        epochs=epochs,
    )
    logger.info("MLP accuracy: warm start %.4f, random init %.4f", result.warm_accuracy, result.random_accuracy)
    return warm, result

