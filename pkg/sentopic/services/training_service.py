"""
Contrastive Divergence training
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Protocol, Sequence

import numpy as np
from scipy.special import expit
from tqdm import tqdm

from sentopic.core.errors import DataError, DimensionMismatchError, EmptyDocumentError, ModeError
from sentopic.core.random import RandomStreams
from sentopic.models.persistence import save_params
from sentopic.models.rbm import (
    free_energy_array,
    gibbs_sweep,
    hidden_logits,
    onehot,
    sentiment_free_energies,
    sentiment_vector,
)
from sentopic.schemas.corpus import Corpus, Document
from sentopic.schemas.model import ModelMode, ModelParams
from sentopic.schemas.training import GradientEstimate, TrainConfig, TrainingLogEntry, TrainingResult
from sentopic.services.evaluation_service import check_enumeration_bound, count_vectors, exact_log_z, log_multiplicity

logger = logging.getLogger(__name__)


class TrainingCallback(Protocol):
    """Called with an immutable snapshot every `every` epochs; returns metrics."""
    every: int

    def __call__(self, epoch: int, params: ModelParams) -> Mapping[str, float]:
        ...


def init_params(K: int, H: int, S: int, config: TrainConfig) -> ModelParams:
    """
    Gaussian initialization

    W, U, a and c are drawn from N(0, init_sigma^2); b starts at zero.
    W and a come from the "init" stream and U and c from "init-sentiment",
    so an RS run and a joint run with the same seed share W and a.
    S = 0 gives an RS model.

    With documents of a few dozen words, init_sigma = 1 saturates the
    hidden units from the first update; 0.01 keeps them responsive.
    """
    streams = RandomStreams(config.seed)
    rng = streams.generator("init")
    sigma = config.init_sigma
    W = rng.normal(0.0, sigma, size=(K, H))
    a = rng.normal(0.0, sigma, size=K)
    U = c = None
    if S > 0:
        sentiment_rng = streams.generator("init-sentiment")
        U = sentiment_rng.normal(0.0, sigma, size=(S, H))
        c = sentiment_rng.normal(0.0, sigma, size=S)
    return ModelParams(W=W, U=U, a=a, b=np.zeros(H), c=c)


def cd_step(
    params: ModelParams,
    doc: Document,
    s_onehot: Optional[np.ndarray],
    k: int,
    rng: np.random.Generator,
) -> GradientEstimate:
    """
    CD-k gradient for one document

    The positive phase uses p(h | v, s) from the data. The negative chain
    runs k block-Gibbs sweeps, reconstructing v' with the same D and
    sampling s' from p(s | h). Statistics use hidden probabilities;
    sampled hidden states only drive the chain.

    Args:
        params: Current parameters
        doc: Training document, non-empty
        s_onehot: Gold sentiment one-hot (joint mode), None in RS mode
        k: Number of Gibbs sweeps
        rng: Sampling stream

    Returns:
        GradientEstimate with reconstruction_l1 = |v - v'|_1
    """
    if doc.is_empty:
        raise EmptyDocumentError("cd_step needs a non-empty document")
    if k < 1:
        raise ValueError("k must be at least 1")
    v = doc.counts.astype(np.float64)
    D = doc.length
    s = None
    if params.is_joint:
        if s_onehot is None:
            raise ModeError("joint-mode cd_step needs a sentiment one-hot")
        s = np.asarray(s_onehot, dtype=np.float64)
        if s.shape != (params.S,):
            raise DimensionMismatchError(f"sentiment vector has shape {s.shape}, model has S={params.S}")
    if v.shape != (params.K,):
        raise DimensionMismatchError(f"document has {v.shape[0]} counts, model has K={params.K}")

    h_pos = expit(hidden_logits(params, v, D, s))
    h_neg = h_pos
    for _ in range(k):
        v_neg, s_neg, h_neg = gibbs_sweep(params, h_neg, D, rng)
    v_neg = v_neg.astype(np.float64)

    grad = GradientEstimate(
        dW=np.outer(v, h_pos) - np.outer(v_neg, h_neg),
        da=v - v_neg,
        db=D * (h_pos - h_neg),
        reconstruction_l1=float(np.abs(v - v_neg).sum()),
    )
    if params.is_joint:
        grad.dU = np.outer(s, h_pos) - np.outer(s_neg, h_neg)
        grad.dc = s - s_neg
    return grad


def _model_statistics(params: ModelParams, D: int) -> GradientEstimate:
    """E_model of the sufficient statistics for documents of length D, by enumeration"""
    log_z = exact_log_z(params, D).log_z
    stats = GradientEstimate.zeros_like(params)
    for counts in count_vectors(params.K, D):
        v = counts.astype(np.float64)
        log_mult = log_multiplicity(counts)
        if params.is_joint:
            # (m, S, H): hidden probabilities for every clamped sentiment
            sigma = expit(hidden_logits(params, v, D)[:, None, :] + params.U)
            p = np.exp(log_mult[:, None] + sentiment_free_energies(params, v, D) - log_z)
            stats.dW += np.einsum("ml,mk,mlh->kh", p, v, sigma)
            stats.dU += np.einsum("ml,mlh->lh", p, sigma)
            stats.da += p.sum(axis=1) @ v
            stats.db += D * np.einsum("ml,mlh->h", p, sigma)
            stats.dc += p.sum(axis=0)
        else:
            sigma = expit(hidden_logits(params, v, D))
            p = np.exp(log_mult + free_energy_array(params, v, D) - log_z)
            stats.dW += np.einsum("m,mk,mh->kh", p, v, sigma)
            stats.da += p @ v
            stats.db += D * (p @ sigma)
    return stats


def exact_gradient(
    params: ModelParams,
    docs: Sequence[Document],
    s_labels: Optional[Sequence[int]] = None,
) -> GradientEstimate:
    """
    Exact gradient of sum_n log p(v_n, s_n)

    Data statistics minus enumerated model statistics, one enumeration per
    distinct document length. Test oracle for tiny models only.

    Raises:
        EnumerationBoundError: some length is above the enumeration bound
    """
    if params.is_joint and s_labels is None:
        raise ModeError("joint-mode exact_gradient needs sentiment labels")
    lengths: Dict[int, int] = {}
    for doc in docs:
        lengths[doc.length] = lengths.get(doc.length, 0) + 1
    for D in lengths:
        check_enumeration_bound(params, D)

    grad = GradientEstimate.zeros_like(params)
    for n, doc in enumerate(docs):
        v = doc.counts.astype(np.float64)
        s = sentiment_vector(params, s_labels[n]) if params.is_joint else None
        h = expit(hidden_logits(params, v, doc.length, s))
        grad.dW += np.outer(v, h)
        grad.da += v
        grad.db += doc.length * h
        if params.is_joint:
            grad.dU += np.outer(s, h)
            grad.dc += s
    for D, count in sorted(lengths.items()):
        grad.accumulate(_model_statistics(params, D), weight=-float(count))
    return grad


def apply_update(
    params: ModelParams,
    grad: GradientEstimate,
    learning_rate: float,
    inplace: bool = False,
    update: Optional[int] = None,
) -> ModelParams:
    """
    theta <- theta + learning_rate * grad

    Raises:
        DimensionMismatchError: grad blocks do not match params
        NumericalInstabilityError: a block became non-finite
    """
    blocks = params.blocks()
    steps = grad.blocks()
    if blocks.keys() != steps.keys():
        raise DimensionMismatchError(f"gradient blocks {sorted(steps)} do not match parameter blocks {sorted(blocks)}")
    for name, block in blocks.items():
        if steps[name].shape != block.shape:
            raise DimensionMismatchError(f"gradient for {name} has shape {steps[name].shape}, expected {block.shape}")
    target = params if inplace else params.copy()
    target_blocks = target.blocks()
    with np.errstate(over="ignore", invalid="ignore"):
        for name, block in target_blocks.items():
            block += learning_rate * steps[name]
    try:
        target.check_finite(update)
    except ArithmeticError:
        logger.error("Non-finite parameters after update %s", update)
        raise
    return target


def _sentiment_count(documents: List[Document], mode: ModelMode, n_sentiments: Optional[int]) -> int:
    if mode == ModelMode.RS:
        return 0
    missing = sum(1 for doc in documents if doc.sentiment is None)
    if missing:
        raise DataError(f"joint training needs labeled documents; {missing} training documents have no sentiment")
    needed = max(doc.sentiment for doc in documents) + 1
    S = n_sentiments if n_sentiments is not None else max(needed, 2)
    if S < needed:
        raise DataError(f"sentiment label {needed - 1} does not fit S={S}")
    return S


def _checkpoint(params: ModelParams, config: TrainConfig, epoch: int, metadata: Mapping[str, Any]) -> None:
    directory = Path(config.checkpoint_dir or ".")
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"checkpoint-epoch{epoch:05d}.rbm"
    save_params(params, path, dict(metadata, epoch=epoch))
    logger.info("Wrote checkpoint %s", path)


def train(
    corpus: Corpus,
    config: TrainConfig,
    mode: ModelMode = ModelMode.JOINT,
    callbacks: Sequence[TrainingCallback] = (),
    n_sentiments: Optional[int] = None,
    metadata: Optional[Mapping[str, Any]] = None,
) -> TrainingResult:
    """
    Train an RS or joint model on the corpus's train split

    Each epoch visits the training documents in an order reshuffled on the
    "shuffle" stream; Gibbs chains draw from the "sampling" stream. With
    iteration_unit "update", iterations counts documents instead of epochs.
    Callbacks run on snapshots at epoch 0, every callback.every epochs and
    after the final epoch.

    Returns:
        TrainingResult with the final params and the metric log
    """
    mode = ModelMode(mode)
    documents = corpus.train_documents
    empty = sum(1 for doc in documents if doc.is_empty)
    if empty:
        logger.warning("Skipped %d empty training documents", empty)
        documents = [doc for doc in documents if not doc.is_empty]
    if not documents:
        raise DataError("training split has no non-empty documents")

    S = _sentiment_count(documents, mode, n_sentiments)
    params = init_params(corpus.vocabulary.size, config.hidden_units, S, config)
    streams = RandomStreams(config.seed)
    shuffle_rng = streams.generator("shuffle")
    sampling_rng = streams.generator("sampling")
    metadata = dict(metadata or {})

    n = len(documents)
    budget = config.iterations if config.iteration_unit == "update" else config.iterations * n
    n_epochs = -(-budget // n)
    velocity = GradientEstimate.zeros_like(params) if config.momentum > 0 else None
    log: List[TrainingLogEntry] = []

    def run_callbacks(epoch: int, final: bool = False) -> None:
        for callback in callbacks:
            every = max(int(getattr(callback, "every", 1)), 1)
            if epoch % every == 0 or final:
                for name, value in callback(epoch, params.copy()).items():
                    log.append(TrainingLogEntry(epoch=epoch, doc_index=0, metric_name=name, value=float(value)))

    run_callbacks(0)
    updates = 0
    bar = tqdm(total=budget, desc=f"train {mode.value}", unit="doc", disable=not config.progress)
    for epoch in range(1, n_epochs + 1):
        order = shuffle_rng.permutation(n)
        quota = min(n, budget - updates)
        l1_total = 0.0
        for start in range(0, quota, config.batch_size):
            batch = order[start:min(start + config.batch_size, quota)]
            grad = GradientEstimate.zeros_like(params)
            for index in batch:
                doc = documents[index]
                s = onehot(doc.sentiment, S) if S else None
                grad.accumulate(cd_step(params, doc, s, config.cd_steps, sampling_rng), weight=1.0 / len(batch))
            l1_total += grad.reconstruction_l1 * len(batch)
            if config.weight_decay > 0:
                grad.dW -= config.weight_decay * params.W
                if grad.dU is not None:
                    grad.dU -= config.weight_decay * params.U
            if velocity is not None:
                for name, block in velocity.blocks().items():
                    block *= config.momentum
                    block += grad.blocks()[name]
                grad = velocity
            updates += len(batch)
            apply_update(params, grad, config.learning_rate, inplace=True, update=updates)
            bar.update(len(batch))

        log.append(TrainingLogEntry(epoch=epoch, doc_index=quota, metric_name="reconstruction_l1", value=l1_total / quota))
        logger.info("epoch %d: reconstruction_l1 = %.4f", epoch, l1_total / quota)
        if config.checkpoint_every and epoch % config.checkpoint_every == 0:
            _checkpoint(params, config, epoch, metadata)
        if epoch < n_epochs:
            run_callbacks(epoch)
    bar.close()
    if n_epochs > 0:
        run_callbacks(n_epochs, final=True)
    return TrainingResult(params=params, log=log, epochs=n_epochs, updates=updates)
