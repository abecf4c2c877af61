"""
Sentiment-augmented Replicated Softmax RBM

Energy, exact conditionals, free energies and block Gibbs sampling for
the joint (v, s, h) model and its RS baseline. Documents enter only as
count vectors v and lengths D; the D tied softmax units are never
materialized. The hidden bias is scaled by each document's own D.

The array-level functions accept a single document (counts of shape (K,))
or a batch (N, K) with lengths of shape (N,).
"""
from typing import Optional

import numpy as np
from scipy.special import expit, logsumexp, softmax

from sentopic.core.errors import DimensionMismatchError, EmptyDocumentError, ModeError
from sentopic.schemas.corpus import Document
from sentopic.schemas.model import HiddenState, ModelParams, SentimentVector


def require_joint(params: ModelParams, operation: str, hint: str = "") -> None:
    if not params.is_joint:
        raise ModeError(f"{operation} needs joint-mode parameters{hint}")


def _check_counts(params: ModelParams, counts: np.ndarray) -> None:
    if counts.shape[-1] != params.K:
        raise DimensionMismatchError(f"document has {counts.shape[-1]} counts, model has K={params.K}")


def _check_sentiment(params: ModelParams, s: np.ndarray) -> None:
    if s.shape[-1] != params.S:
        raise DimensionMismatchError(f"sentiment vector has {s.shape[-1]} entries, model has S={params.S}")


def _check_hidden(params: ModelParams, h: np.ndarray) -> None:
    if h.shape[-1] != params.H:
        raise DimensionMismatchError(f"hidden vector has {h.shape[-1]} entries, model has H={params.H}")


def softplus(x: np.ndarray) -> np.ndarray:
    """log(1 + e^x) without overflow"""
    return np.logaddexp(0.0, x)


# Array-level kernels


def hidden_logits(params: ModelParams, counts, lengths, s=None) -> np.ndarray:
    """D*b + v W (+ s U)"""
    x = np.asarray(counts) @ params.W + np.multiply.outer(np.asarray(lengths, dtype=np.float64), params.b)
    if s is not None:
        x = x + np.asarray(s) @ params.U
    return x


def free_energy_array(params: ModelParams, counts, lengths, s=None) -> np.ndarray:
    """
    F(v, s) = v.a + s.c + sum_j softplus(D b_j + (vW)_j + (sU)_j)

    This is log sum_h exp(-E(v, s, h)). With s=None the sentiment terms
    are dropped (the RS free energy).
    """
    counts = np.asarray(counts)
    value = counts @ params.a + softplus(hidden_logits(params, counts, lengths, s)).sum(axis=-1)
    if s is not None:
        value = value + np.asarray(s) @ params.c
    return value


def marginal_free_energy_array(params: ModelParams, counts, lengths) -> np.ndarray:
    """log sum_s exp F(v, s) in joint mode, F(v) in RS mode"""
    if not params.is_joint:
        return free_energy_array(params, counts, lengths)
    counts = np.asarray(counts)
    base = hidden_logits(params, counts, lengths)
    # (..., S, H): one row per clamped sentiment
    per_sentiment = softplus(base[..., None, :] + params.U).sum(axis=-1) + params.c
    return counts @ params.a + logsumexp(per_sentiment, axis=-1)


def sentiment_free_energies(params: ModelParams, counts, lengths) -> np.ndarray:
    """F(v, s_l) for every sentiment l, shape (..., S)"""
    counts = np.asarray(counts)
    base = hidden_logits(params, counts, lengths)
    per_sentiment = softplus(base[..., None, :] + params.U).sum(axis=-1) + params.c
    return per_sentiment + (counts @ params.a)[..., None]


def sample_hidden(probs, rng: np.random.Generator) -> np.ndarray:
    """Bernoulli draw per hidden unit"""
    probs = np.asarray(probs)
    return (rng.random(probs.shape) < probs).astype(np.float64)


def sample_sentiment(probs, rng: np.random.Generator) -> np.ndarray:
    """One-hot categorical draw from a length-S distribution"""
    probs = np.asarray(probs, dtype=np.float64)
    onehot = np.zeros_like(probs)
    onehot[rng.choice(probs.shape[0], p=probs / probs.sum())] = 1.0
    return onehot


def sample_visible_counts(params: ModelParams, h, lengths, rng: np.random.Generator) -> np.ndarray:
    """Multinomial reconstruction: D draws from softmax(a + W h) per document"""
    probs = softmax(np.asarray(h) @ params.W.T + params.a, axis=-1)
    probs = probs / probs.sum(axis=-1, keepdims=True)
    return rng.multinomial(np.asarray(lengths, dtype=np.int64), probs).astype(np.int64)


def sample_sentiment_onehot(params: ModelParams, h, rng: np.random.Generator) -> np.ndarray:
    """Categorical draw from softmax(c + U h), vectorized over leading axes"""
    probs = softmax(np.asarray(h) @ params.U.T + params.c, axis=-1)
    u = np.asarray(rng.random(probs.shape[:-1]))
    index = np.minimum((np.cumsum(probs, axis=-1) < u[..., None]).sum(axis=-1), params.S - 1)
    return np.eye(params.S)[index]


def gibbs_sweep(params: ModelParams, h_probs, lengths, rng: np.random.Generator, clamp=None):
    """
    One block-Gibbs sweep h -> (v, s) -> h

    Args:
        params: Model parameters
        h_probs: Current hidden probabilities
        lengths: Document length(s) D, preserved by the reconstruction
        rng: Sampling stream
        clamp: Fixed sentiment one-hot (not resampled), or None

    Returns:
        (counts, s, h_probs) after the sweep; s is None in RS mode
    """
    h = sample_hidden(h_probs, rng)
    counts = sample_visible_counts(params, h, lengths, rng)
    s = None
    if params.is_joint:
        s = clamp if clamp is not None else sample_sentiment_onehot(params, h, rng)
    return counts, s, expit(hidden_logits(params, counts, lengths, s))


# Document-level operations


def energy(params: ModelParams, doc: Document, s=None, h=None) -> float:
    """
    E(v, s, h)

    -sum W_kj h_j v_k - sum U_lj h_j s_l - sum v_k a_k - sum s_l c_l - D sum h_j b_j;
    the U and c terms are omitted in RS mode.
    """
    counts = doc.counts
    _check_counts(params, counts)
    h = np.asarray(h, dtype=np.float64)
    _check_hidden(params, h)
    value = -(counts @ params.W @ h) - counts @ params.a - doc.length * (h @ params.b)
    if params.is_joint:
        if s is None:
            raise ModeError("joint-mode energy needs a sentiment vector")
        s = np.asarray(s, dtype=np.float64)
        _check_sentiment(params, s)
        value -= s @ params.U @ h + s @ params.c
    return float(value)


def hidden_given_vs(params: ModelParams, doc: Document, s) -> np.ndarray:
    """p(h_j = 1 | v, s) = sigmoid(D b_j + sum_k W_kj v_k + sum_l U_lj s_l)"""
    require_joint(params, "hidden_given_vs", "; use hidden_given_v for RS models")
    _check_counts(params, doc.counts)
    s = np.asarray(s, dtype=np.float64)
    _check_sentiment(params, s)
    return expit(hidden_logits(params, doc.counts, doc.length, s))


def hidden_given_v(params: ModelParams, doc: Document) -> np.ndarray:
    """p(h_j = 1 | v) = sigmoid(D b_j + sum_k W_kj v_k); U is ignored."""
    _check_counts(params, doc.counts)
    return expit(hidden_logits(params, doc.counts, doc.length))


def visible_softmax(params: ModelParams, h) -> np.ndarray:
    """p(w | h) proportional to exp(a_w + sum_j W_wj h_j)"""
    h = np.asarray(h, dtype=np.float64)
    _check_hidden(params, h)
    return softmax(params.a + params.W @ h)


def sentiment_softmax(params: ModelParams, h) -> np.ndarray:
    """p(s_l = 1 | h) proportional to exp(c_l + sum_j U_lj h_j)"""
    require_joint(params, "sentiment_softmax")
    h = np.asarray(h, dtype=np.float64)
    _check_hidden(params, h)
    return softmax(params.c + params.U @ h)


def sample_document(params: ModelParams, h, D: int, rng: np.random.Generator) -> Document:
    """D independent word draws from visible_softmax, as a count vector"""
    if D < 1:
        raise EmptyDocumentError(f"cannot sample a document of length {D}")
    probs = visible_softmax(params, h)
    return Document(counts=rng.multinomial(int(D), probs / probs.sum()))


def infer_hidden(params: ModelParams, doc: Document, rng: np.random.Generator, s=None) -> HiddenState:
    """Hidden probabilities given v (and s in joint mode) with a sample."""
    probs = hidden_given_v(params, doc) if s is None else hidden_given_vs(params, doc, s)
    return HiddenState(probs=probs, sample=sample_hidden(probs, rng))


def infer_sentiment(params: ModelParams, h, rng: np.random.Generator) -> SentimentVector:
    probs = sentiment_softmax(params, h)
    return SentimentVector(probs=probs, onehot=sample_sentiment(probs, rng))


def free_energy(params: ModelParams, doc: Document, s=None) -> float:
    """
    log sum_h exp(-E(v, s, h)), in closed form

    Joint mode requires s; in RS mode s is ignored.
    """
    _check_counts(params, doc.counts)
    if params.is_joint:
        if s is None:
            raise ModeError("joint-mode free energy needs a sentiment vector")
        s = np.asarray(s, dtype=np.float64)
        _check_sentiment(params, s)
    else:
        s = None
    return float(free_energy_array(params, doc.counts, doc.length, s))


def log_unnormalized(params: ModelParams, doc: Document) -> float:
    """log sum_s exp F(v, s) (joint) or F(v) (RS)"""
    _check_counts(params, doc.counts)
    return float(marginal_free_energy_array(params, doc.counts, doc.length))


def onehot(label: int, size: int) -> np.ndarray:
    vector = np.zeros(size)
    vector[label] = 1.0
    return vector


def sentiment_vector(params: ModelParams, label: Optional[int]) -> Optional[np.ndarray]:
    """One-hot for a label in joint mode, None in RS mode."""
    if not params.is_joint:
        return None
    if label is None:
        raise ModeError("joint-mode operation needs a sentiment label")
    if not 0 <= label < params.S:
        raise DimensionMismatchError(f"sentiment label {label} outside 0..{params.S - 1}")
    return onehot(label, params.S)


def gibbs_step(params: ModelParams, counts, lengths, s, rng: np.random.Generator, clamp=None):
    """gibbs_sweep started from a visible state (v, s) instead of hidden probabilities"""
    return gibbs_sweep(params, expit(hidden_logits(params, counts, lengths, s)), lengths, rng, clamp=clamp)
