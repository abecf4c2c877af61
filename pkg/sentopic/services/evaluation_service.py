"""
Likelihood evaluation

Exact partition functions by enumerating count vectors, Annealed
Importance Sampling for realistic sizes, and perplexity. Z depends on the
document length D, so every estimate is for one D.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations_with_replacement, islice
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp
from tqdm import tqdm

from sentopic.core.errors import EmptyDocumentError, EnumerationBoundError, MissingLengthError, ModeError
from sentopic.core.random import RandomStreams
from sentopic.models.rbm import (
    free_energy_array,
    gibbs_step,
    log_unnormalized,
    marginal_free_energy_array,
    onehot,
    sentiment_vector,
)
from sentopic.schemas.corpus import Document
from sentopic.schemas.evaluation import (
    AISConfig,
    PartitionEstimate,
    PartitionMethod,
    PartitionTableConfig,
    PerplexityReport,
)
from sentopic.schemas.model import ModelMode, ModelParams

logger = logging.getLogger(__name__)

# count vectors x sentiment values
ENUMERATION_BOUND = 10 ** 6

LogZ = Union[float, PartitionEstimate]


# Enumeration


def state_count(K: int, D: int, S: int = 0) -> int:
    """C(D+K-1, K-1) count vectors times the S sentiment values"""
    return math.comb(D + K - 1, K - 1) * max(S, 1)


def _enumerated_sentiments(params: ModelParams, sentiment: Optional[int]) -> int:
    return params.S if params.is_joint and sentiment is None else 0


def check_enumeration_bound(params: ModelParams, D: int, sentiment: Optional[int] = None) -> None:
    states = state_count(params.K, D, _enumerated_sentiments(params, sentiment))
    if states > ENUMERATION_BOUND:
        raise EnumerationBoundError(
            f"exact enumeration of K={params.K}, D={D} needs {states} states "
            f"(bound {ENUMERATION_BOUND}); use AIS instead"
        )


def count_vectors(K: int, D: int, chunk_size: int = 4096) -> Iterator[np.ndarray]:
    """Every count vector of length D over K words, in chunks of shape (m, K)"""
    combos = combinations_with_replacement(range(K), D)
    while True:
        chunk = list(islice(combos, chunk_size))
        if not chunk:
            return
        words = np.array(chunk, dtype=np.int64).reshape(len(chunk), D)
        counts = np.zeros((len(chunk), K), dtype=np.int64)
        np.add.at(counts, (np.repeat(np.arange(len(chunk)), D), words.ravel()), 1)
        yield counts


def log_multiplicity(counts: np.ndarray) -> np.ndarray:
    """log D! / prod_k v_k!: the number of word sequences behind a count vector"""
    counts = np.asarray(counts)
    return gammaln(counts.sum(axis=-1) + 1.0) - gammaln(counts + 1.0).sum(axis=-1)


def _log_weights(params: ModelParams, counts: np.ndarray, D: int, sentiment: Optional[int]) -> np.ndarray:
    if sentiment is None:
        free = marginal_free_energy_array(params, counts, D)
    else:
        free = free_energy_array(params, counts, D, onehot(sentiment, params.S))
    return log_multiplicity(counts) + free


def exact_log_z(params: ModelParams, D: int, sentiment: Optional[int] = None) -> PartitionEstimate:
    """
    log Z(D) = log sum_v multiplicity(v) sum_s exp F(v, s)

    The hidden layer is summed out analytically. With sentiment given, the
    sentiment layer is clamped to it and Z_s(D) is returned.

    Raises:
        EnumerationBoundError: more than ENUMERATION_BOUND states
    """
    if sentiment is not None:
        sentiment_vector(params, sentiment)
    check_enumeration_bound(params, D, sentiment)
    parts = [logsumexp(_log_weights(params, counts, D, sentiment)) for counts in count_vectors(params.K, D)]
    return PartitionEstimate(
        log_z=float(logsumexp(parts)),
        method=PartitionMethod.EXACT,
        base_doc_length=D,
        sentiment=sentiment,
    )


# Annealed Importance Sampling


def annealing_schedule(n_temps: int, schedule: str = "geometric", min_beta: float = 1e-3) -> np.ndarray:
    """Inverse temperatures 0 = beta_0 < ... < beta_n_temps = 1"""
    if schedule == "linear":
        return np.linspace(0.0, 1.0, n_temps + 1)
    return np.concatenate([[0.0], np.geomspace(min_beta, 1.0, n_temps)])


def base_log_z(params: ModelParams, D: int, clamped: bool = False) -> float:
    """log Z of the all-zero model: D log K + H log 2 (+ log S)"""
    value = D * math.log(params.K) + params.H * math.log(2.0)
    if params.is_joint and not clamped:
        value += math.log(params.S)
    return value


def ais_log_z(
    params: ModelParams,
    D: int,
    n_runs: int,
    n_temps: int,
    rng: np.random.Generator,
    sentiment: Optional[int] = None,
    schedule: str = "geometric",
    n_bootstrap: int = 200,
    min_beta: float = 1e-3,
) -> PartitionEstimate:
    """
    AIS estimate of log Z(D)

    Anneals from the all-zero model, whose log Z is closed form, to params
    through the tempered models beta * params. Each run carries a visible
    state (v, s) moved by one block-Gibbs sweep per temperature.

    Args:
        params: Target model
        D: Document length
        n_runs: Independent annealing chains
        n_temps: Number of intermediate temperatures
        rng: Stream for the chains and the bootstrap
        sentiment: Clamp the sentiment layer to this label (Z_s)
        schedule: "geometric" or "linear" spacing of beta
        n_bootstrap: Resamples used for the standard error

    Returns:
        PartitionEstimate with the log mean importance weight added to the
        base log Z and a bootstrap stderr over runs
    """
    config = AISConfig(n_runs=n_runs, n_temps=n_temps, schedule=schedule, n_bootstrap=n_bootstrap, min_beta=min_beta)
    if sentiment is not None:
        sentiment_vector(params, sentiment)
    betas = annealing_schedule(config.n_temps, config.schedule, config.min_beta)
    lengths = np.full(config.n_runs, D, dtype=np.int64)

    counts = rng.multinomial(D, np.full(params.K, 1.0 / params.K), size=config.n_runs)
    clamp = None
    s = None
    if params.is_joint:
        if sentiment is not None:
            clamp = np.broadcast_to(onehot(sentiment, params.S), (config.n_runs, params.S))
            s = clamp
        else:
            s = np.eye(params.S)[rng.integers(params.S, size=config.n_runs)]

    log_w = np.zeros(config.n_runs)
    previous = free_energy_array(params.scaled(betas[0]), counts, lengths, s)
    last = len(betas) - 1
    for step in range(1, len(betas)):
        model = params.scaled(betas[step])
        log_w += free_energy_array(model, counts, lengths, s) - previous
        if step == last:
            break
        counts, s, _ = gibbs_step(model, counts, lengths, s, rng, clamp=clamp)
        previous = free_energy_array(model, counts, lengths, s)

    log_n = math.log(config.n_runs)
    resamples = rng.integers(config.n_runs, size=(config.n_bootstrap, config.n_runs))
    boot = logsumexp(log_w[resamples], axis=1) - log_n
    return PartitionEstimate(
        log_z=base_log_z(params, D, clamped=sentiment is not None) + float(logsumexp(log_w)) - log_n,
        method=PartitionMethod.AIS,
        base_doc_length=D,
        ais_runs=config.n_runs,
        log_z_stderr=float(np.std(boot, ddof=1)),
        sentiment=sentiment,
    )


# Partition tables


def length_buckets(lengths: Sequence[int], n_buckets: int = 32) -> Dict[int, int]:
    """Map each length to the nearest of n_buckets geometrically spaced lengths"""
    distinct = np.array(sorted(set(int(D) for D in lengths)), dtype=np.int64)
    if len(distinct) == 0:
        return {}
    low = max(int(distinct[0]), 1)
    grid = np.unique(np.rint(np.geomspace(low, max(int(distinct[-1]), low), n_buckets)).astype(np.int64))
    nearest = np.abs(distinct[:, None] - grid[None, :]).argmin(axis=1)
    return {int(D): int(grid[i]) for D, i in zip(distinct, nearest)}


def estimate_log_z(
    params: ModelParams,
    D: int,
    config: PartitionTableConfig,
    rng: np.random.Generator,
    sentiment: Optional[int] = None,
) -> PartitionEstimate:
    """Exact when asked for or within the bound (method auto), AIS otherwise."""
    within = state_count(params.K, D, _enumerated_sentiments(params, sentiment)) <= ENUMERATION_BOUND
    if config.method == "exact" or (config.method == "auto" and within):
        return exact_log_z(params, D, sentiment=sentiment)
    ais = config.ais
    return ais_log_z(
        params,
        D,
        ais.n_runs,
        ais.n_temps,
        rng,
        sentiment=sentiment,
        schedule=ais.schedule,
        n_bootstrap=ais.n_bootstrap,
        min_beta=ais.min_beta,
    )


def partition_table(
    params: ModelParams,
    lengths: Sequence[int],
    config: Optional[PartitionTableConfig] = None,
    seed: int = 0,
    sentiment: Optional[int] = None,
    progress: bool = False,
) -> Dict[int, PartitionEstimate]:
    """
    z_by_length for every distinct length

    Each length gets its own "ais" stream keyed by (D, sentiment), so the
    table does not depend on thread scheduling. With bucketing, lengths
    share the estimate of their bucket representative.
    """
    config = config or PartitionTableConfig()
    distinct = sorted(set(int(D) for D in lengths))
    mapping = length_buckets(distinct, config.n_buckets) if config.bucketed else {D: D for D in distinct}
    targets = sorted(set(mapping.values()))
    streams = RandomStreams(seed)
    sentiment_key = 0 if sentiment is None else sentiment + 1

    def estimate(D: int) -> PartitionEstimate:
        result = estimate_log_z(params, D, config, streams.generator("ais", D, sentiment_key), sentiment)
        logger.debug("log Z(%d) = %.6f (%s, stderr %.4g)", D, result.log_z, result.method.value, result.log_z_stderr)
        return result

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        estimates = list(tqdm(pool.map(estimate, targets), total=len(targets), desc="log Z", disable=not progress))
    by_target = dict(zip(targets, estimates))
    return {D: by_target[mapping[D]] for D in distinct}


def conditional_partition_table(
    params: ModelParams,
    docs: Sequence[Document],
    config: Optional[PartitionTableConfig] = None,
    seed: int = 0,
) -> Dict[Tuple[int, int], PartitionEstimate]:
    """Z_s(D) for every (length, gold sentiment) pair in docs"""
    if not params.is_joint:
        raise ModeError("conditional partition functions need joint-mode parameters")
    table: Dict[Tuple[int, int], PartitionEstimate] = {}
    labels = sorted({doc.sentiment for doc in docs if doc.sentiment is not None})
    for label in labels:
        lengths = [doc.length for doc in docs if doc.sentiment == label and not doc.is_empty]
        for D, estimate in partition_table(params, lengths, config, seed, sentiment=label).items():
            table[(D, label)] = estimate
    return table


# Perplexity


def _log_z_value(entry: LogZ) -> float:
    return entry.log_z if isinstance(entry, PartitionEstimate) else float(entry)


def _scored(docs: Sequence[Document]) -> List[Tuple[int, Document]]:
    scored = [(i, doc) for i, doc in enumerate(docs) if not doc.is_empty]
    skipped = len(docs) - len(scored)
    if skipped:
        logger.warning("Skipped %d empty documents", skipped)
    if not scored:
        raise EmptyDocumentError("no non-empty documents to evaluate")
    return scored


def perplexity(
    params: ModelParams,
    docs: Sequence[Document],
    z_by_length: Mapping[int, LogZ],
    mode: Optional[ModelMode] = None,
) -> PerplexityReport:
    """
    exp(-sum_n log p(v_n) / sum_n D_n)

    log p(v) = log sum_s exp F(v, s) - log Z(D) in joint mode (the
    sentiment layer is marginalized) and F(v) - log Z(D) in RS mode.

    Raises:
        MissingLengthError: z_by_length lacks a test-document length
        ModeError: mode disagrees with params
    """
    if mode is not None and ModelMode(mode) != params.mode:
        raise ModeError(f"{ModelMode(mode).value} perplexity requested for {params.mode.value} parameters")
    report = PerplexityReport()
    for i, doc in _scored(docs):
        if doc.length not in z_by_length:
            raise MissingLengthError(f"no log Z estimate for document length {doc.length} (document {i})")
        report.doc_ids.append(i)
        report.lengths.append(doc.length)
        report.per_doc_log_p.append(log_unnormalized(params, doc) - _log_z_value(z_by_length[doc.length]))
    return report


def conditional_perplexity(
    params: ModelParams,
    docs: Sequence[Document],
    z_by_length_and_sentiment: Mapping[Tuple[int, int], LogZ],
) -> PerplexityReport:
    """Perplexity of p(v | gold s) = exp F(v, s) / Z_s(D)"""
    if not params.is_joint:
        raise ModeError("conditional perplexity needs joint-mode parameters")
    report = PerplexityReport()
    for i, doc in _scored(docs):
        s = sentiment_vector(params, doc.sentiment)
        key = (doc.length, doc.sentiment)
        if key not in z_by_length_and_sentiment:
            raise MissingLengthError(
                f"no log Z estimate for length {doc.length} with sentiment {doc.sentiment} (document {i})"
            )
        report.doc_ids.append(i)
        report.lengths.append(doc.length)
        report.per_doc_log_p.append(
            float(free_energy_array(params, doc.counts, doc.length, s)) - _log_z_value(z_by_length_and_sentiment[key])
        )
    return report


def exact_log_likelihood(
    params: ModelParams,
    docs: Sequence[Document],
    labels: Optional[Sequence[int]] = None,
) -> float:
    """
    sum_n log p(v_n, s_n) by enumeration

    Word-sequence probabilities (no multiplicity), the objective
    exact_gradient differentiates. In joint mode without labels the
    sentiment layer is marginalized.
    """
    cache: Dict[int, float] = {}
    total = 0.0
    for n, doc in enumerate(docs):
        if doc.length not in cache:
            cache[doc.length] = exact_log_z(params, doc.length).log_z
        label = None if labels is None else labels[n]
        if params.is_joint and label is not None:
            free = float(free_energy_array(params, doc.counts, doc.length, sentiment_vector(params, label)))
        else:
            free = log_unnormalized(params, doc)
        total += free - cache[doc.length]
    return total


class PerplexityProbe:
    """
    Training callback: perplexity of held-out documents at a snapshot

    Builds a fresh partition table for the snapshot every time it runs.
    """

    def __init__(
        self,
        docs: Sequence[Document],
        every: int = 10,
        config: Optional[PartitionTableConfig] = None,
        seed: int = 0,
        name: str = "perplexity",
    ):
        self.docs = [doc for doc in docs if not doc.is_empty]
        self.every = every
        self.config = config or PartitionTableConfig()
        self.seed = seed
        self.name = name

    def __call__(self, epoch: int, params: ModelParams) -> Dict[str, float]:
        table = partition_table(params, [doc.length for doc in self.docs], self.config, self.seed)
        value = perplexity(params, self.docs, table).perplexity
        logger.info("epoch %d: %s = %.4f", epoch, self.name, value)
        return {self.name: value}
