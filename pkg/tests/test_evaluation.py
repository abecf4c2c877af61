import math

import numpy as np
import pytest
from scipy.special import logsumexp

from sentopic.core.errors import EmptyDocumentError, EnumerationBoundError, MissingLengthError, ModeError
from sentopic.models.rbm import marginal_free_energy_array
from sentopic.schemas.corpus import Document
from sentopic.schemas.evaluation import AISConfig, PartitionMethod, PartitionTableConfig
from sentopic.schemas.model import ModelMode, ModelParams
from sentopic.services.evaluation_service import (
    PerplexityProbe,
    ais_log_z,
    annealing_schedule,
    base_log_z,
    conditional_partition_table,
    conditional_perplexity,
    count_vectors,
    exact_log_likelihood,
    exact_log_z,
    length_buckets,
    log_multiplicity,
    partition_table,
    perplexity,
    state_count,
)


class TestEnumeration:
    def test_count_vectors(self):
        vectors = np.vstack(list(count_vectors(3, 2)))
        assert vectors.shape == (6, 3)
        assert np.all(vectors.sum(axis=1) == 2)
        assert len({tuple(v) for v in vectors}) == 6

    def test_count_vectors_chunked(self):
        chunks = list(count_vectors(4, 3, chunk_size=7))
        assert sum(len(chunk) for chunk in chunks) == math.comb(6, 3)

    def test_multiplicities_cover_all_sequences(self):
        vectors = np.vstack(list(count_vectors(4, 3)))
        assert np.exp(log_multiplicity(vectors)).sum() == pytest.approx(4 ** 3)

    def test_state_count(self):
        assert state_count(3, 2) == 6
        assert state_count(3, 2, 2) == 12

    def test_bound(self):
        with pytest.raises(EnumerationBoundError):
            exact_log_z(ModelParams.zeros(40, 2), 20)


class TestExactLogZ:
    @pytest.mark.parametrize("S", [0, 2, 3])
    def test_zero_model_closed_form(self, S):
        params = ModelParams.zeros(4, 3, S)
        expected = 5 * math.log(4) + 3 * math.log(2) + (math.log(S) if S else 0.0)
        estimate = exact_log_z(params, 5)
        assert estimate.log_z == pytest.approx(expected, rel=1e-12)
        assert estimate.method is PartitionMethod.EXACT and estimate.base_doc_length == 5
        assert base_log_z(params, 5) == pytest.approx(expected, rel=1e-12)

    def test_hand_computed(self):
        # Z = 2^H * (1 + 3)^D with H = 1, D = 2
        params = ModelParams(W=np.zeros((2, 1)), a=[0.0, math.log(3.0)], b=[0.0])
        assert exact_log_z(params, 2).log_z == pytest.approx(math.log(32.0), rel=1e-12)

    def test_sentiment_components_sum_to_total(self, rng, oracle):
        params = oracle.random_params(rng, 3, 2, 3)
        parts = [exact_log_z(params, 4, sentiment=label).log_z for label in range(3)]
        assert logsumexp(parts) == pytest.approx(exact_log_z(params, 4).log_z, rel=1e-12)

    def test_probabilities_normalize(self, rng, oracle):
        params = oracle.random_params(rng, 3, 2, 2)
        vectors = np.vstack(list(count_vectors(3, 4)))
        log_p = log_multiplicity(vectors) + marginal_free_energy_array(params, vectors, 4) - exact_log_z(params, 4).log_z
        assert logsumexp(log_p) == pytest.approx(0.0, abs=1e-12)


class TestPerplexity:
    @pytest.mark.parametrize("S", [0, 2])
    def test_zero_model_is_uniform(self, S):
        params = ModelParams.zeros(5, 3, S)
        docs = [Document(counts=[1, 0, 2, 0, 0]), Document(counts=[0, 1, 0, 0, 0], sentiment=1)]
        report = perplexity(params, docs, partition_table(params, [d.length for d in docs]))
        assert report.perplexity == pytest.approx(5.0, rel=1e-12)
        assert report.total_words == 4

    def test_additive_visible_bias_invariance(self, rng, oracle):
        params = oracle.random_params(rng, 3, 2, 2)
        shifted = ModelParams(W=params.W, U=params.U, a=params.a + 1.7, b=params.b, c=params.c)
        docs = [Document(counts=[1, 2, 0], sentiment=0), Document(counts=[0, 1, 1], sentiment=1)]
        lengths = [d.length for d in docs]
        original = perplexity(params, docs, partition_table(params, lengths)).perplexity
        moved = perplexity(shifted, docs, partition_table(shifted, lengths)).perplexity
        assert moved == pytest.approx(original, rel=1e-10)

    def test_document_order_does_not_matter(self, rng, oracle):
        params = oracle.random_params(rng, 4, 3, 2)
        docs = [Document(counts=rng.integers(0, 3, size=4)) for _ in range(12)]
        docs = [doc for doc in docs if not doc.is_empty]
        table = partition_table(params, [d.length for d in docs])
        original = perplexity(params, docs, table).perplexity
        shuffled = [docs[i] for i in rng.permutation(len(docs))]
        assert perplexity(params, shuffled, table).perplexity == pytest.approx(original, rel=1e-12)

    def test_repeated_document_scores_alike(self, rng, oracle):
        params = oracle.random_params(rng, 3, 2)
        doc = Document(counts=[1, 2, 0])
        report = perplexity(params, [doc, doc], partition_table(params, [3]))
        assert report.per_doc_log_p[0] == report.per_doc_log_p[1]

    def test_matches_exact_log_likelihood(self, rng, oracle, tiny_labeled_corpus):
        params = oracle.random_params(rng, 3, 2, 2)
        docs = tiny_labeled_corpus.train_documents
        report = perplexity(params, docs, partition_table(params, [d.length for d in docs]))
        assert sum(report.per_doc_log_p) == pytest.approx(exact_log_likelihood(params, docs), rel=1e-12)

    def test_plain_floats_accepted(self):
        params = ModelParams.zeros(2, 1)
        table = {1: math.log(2.0) + math.log(2.0)}
        assert perplexity(params, [Document(counts=[1, 0])], table).perplexity == pytest.approx(2.0)

    def test_empty_documents_skipped(self):
        params = ModelParams.zeros(3, 1)
        docs = [Document(counts=[0, 0, 0]), Document(counts=[1, 1, 0])]
        report = perplexity(params, docs, partition_table(params, [2]))
        assert report.doc_ids == [1]

    def test_only_empty_documents(self):
        with pytest.raises(EmptyDocumentError):
            perplexity(ModelParams.zeros(3, 1), [Document(counts=[0, 0, 0])], {})

    def test_missing_length(self):
        params = ModelParams.zeros(3, 1)
        with pytest.raises(MissingLengthError):
            perplexity(params, [Document(counts=[1, 1, 0])], partition_table(params, [3]))

    def test_mode_mismatch(self):
        params = ModelParams.zeros(3, 1, 2)
        with pytest.raises(ModeError):
            perplexity(params, [Document(counts=[1, 0, 0])], partition_table(params, [1]), mode=ModelMode.RS)

    def test_conditional_zero_model(self):
        params = ModelParams.zeros(4, 2, 2)
        docs = [Document(counts=[1, 1, 0, 0], sentiment=0), Document(counts=[0, 0, 3, 0], sentiment=1)]
        table = conditional_partition_table(params, docs)
        assert set(table) == {(2, 0), (3, 1)}
        assert conditional_perplexity(params, docs, table).perplexity == pytest.approx(4.0, rel=1e-12)

    def test_conditional_needs_joint(self):
        with pytest.raises(ModeError):
            conditional_partition_table(ModelParams.zeros(3, 1), [Document(counts=[1, 0, 0], sentiment=0)])

    def test_probe(self):
        probe = PerplexityProbe([Document(counts=[1, 2, 0]), Document(counts=[0, 0, 0])], every=3)
        assert probe(0, ModelParams.zeros(3, 2, 2)) == {"perplexity": pytest.approx(3.0)}


class TestAIS:
    def test_schedules(self):
        geometric = annealing_schedule(100)
        assert geometric[0] == 0.0 and geometric[1] == pytest.approx(1e-3) and geometric[-1] == 1.0
        assert len(geometric) == 101 and np.all(np.diff(geometric) > 0)
        np.testing.assert_allclose(annealing_schedule(100, "linear"), np.linspace(0, 1, 101))

    def test_zero_model_is_exact(self, rng):
        params = ModelParams.zeros(6, 4, 2)
        estimate = ais_log_z(params, 9, 20, 100, rng)
        assert estimate.log_z == pytest.approx(base_log_z(params, 9), rel=1e-12)
        assert estimate.log_z_stderr == pytest.approx(0.0, abs=1e-12)
        assert estimate.method is PartitionMethod.AIS and estimate.ais_runs == 20

    def test_clamped_zero_model(self, rng):
        params = ModelParams.zeros(6, 4, 2)
        estimate = ais_log_z(params, 9, 20, 100, rng, sentiment=1)
        assert estimate.log_z == pytest.approx(9 * math.log(6) + 4 * math.log(2), rel=1e-12)
        assert estimate.sentiment == 1

    def test_config_validation(self, rng):
        with pytest.raises(ValueError):
            ais_log_z(ModelParams.zeros(3, 2), 4, 5, 100, rng)

    @pytest.mark.parametrize("S", [0, 2])
    def test_close_to_exact(self, S):
        rng = np.random.default_rng(17)
        params = ModelParams(
            W=rng.normal(0, 0.5, (5, 8)),
            U=rng.normal(0, 0.5, (S, 8)) if S else None,
            a=rng.normal(0, 0.5, 5),
            b=rng.normal(0, 0.5, 8),
            c=rng.normal(0, 0.5, S) if S else None,
        )
        exact = exact_log_z(params, 10).log_z
        estimate = ais_log_z(params, 10, 100, 1000, np.random.default_rng(5))
        assert abs(estimate.log_z - exact) <= 0.02 * abs(exact)
        assert estimate.log_z_stderr > 0

    def test_stderr_shrinks_with_runs(self):
        rng = np.random.default_rng(31)
        params = ModelParams(
            W=rng.normal(0, 0.5, (5, 6)), U=rng.normal(0, 0.5, (2, 6)), a=rng.normal(0, 0.5, 5), b=rng.normal(0, 0.5, 6),
            c=rng.normal(0, 0.5, 2),
        )

        def mean_stderr(n_runs):
            return np.mean([ais_log_z(params, 8, n_runs, 100, np.random.default_rng(seed)).log_z_stderr for seed in range(8)])

        ratio = mean_stderr(50) / mean_stderr(200)
        # 1/sqrt(n_runs) predicts 2
        assert 0.5 <= ratio / 2.0 <= 2.0

    def test_deterministic_for_a_seed(self, rng, oracle):
        params = oracle.random_params(rng, 4, 3, 2)
        first = ais_log_z(params, 6, 10, 100, np.random.default_rng(1))
        second = ais_log_z(params, 6, 10, 100, np.random.default_rng(1))
        assert first.log_z == second.log_z


class TestPartitionTable:
    def test_length_buckets(self):
        mapping = length_buckets(range(1, 501), 32)
        assert set(mapping) == set(range(1, 501))
        assert len(set(mapping.values())) <= 32
        assert mapping[1] == 1 and mapping[500] == 500

    def test_bucketing_shares_estimates(self):
        params = ModelParams.zeros(3, 1)
        config = PartitionTableConfig(bucketed=True, n_buckets=2)
        table = partition_table(params, [1, 2, 9, 10], config)
        assert table[1] is table[2] and table[9] is table[10]

    def test_thread_count_does_not_change_estimates(self, rng, oracle):
        params = oracle.random_params(rng, 30, 4, 2)
        lengths = [8, 12, 15, 20]
        ais = AISConfig(n_runs=10, n_temps=100)
        one = partition_table(params, lengths, PartitionTableConfig(method="ais", ais=ais, threads=1), seed=3)
        four = partition_table(params, lengths, PartitionTableConfig(method="ais", ais=ais, threads=4), seed=3)
        assert {D: e.log_z for D, e in one.items()} == {D: e.log_z for D, e in four.items()}

    def test_auto_uses_ais_above_bound(self, rng, oracle):
        params = oracle.random_params(rng, 40, 2)
        config = PartitionTableConfig(ais=AISConfig(n_runs=10, n_temps=100))
        table = partition_table(params, [2, 20], config)
        assert table[2].method is PartitionMethod.EXACT
        assert table[20].method is PartitionMethod.AIS
