import numpy as np
import pytest

from sentopic.core.errors import DataError, DimensionMismatchError, EmptyDocumentError, ModeError, NumericalInstabilityError
from sentopic.models.persistence import load_params
from sentopic.models.rbm import onehot
from sentopic.schemas.corpus import Corpus, Document, Vocabulary
from sentopic.schemas.model import ModelMode, ModelParams
from sentopic.schemas.training import HIDDEN_GRID, GradientEstimate, TrainConfig
from sentopic.services.evaluation_service import exact_log_likelihood
from sentopic.services.training_service import apply_update, cd_step, exact_gradient, init_params, train


def _finite_difference(params, docs, labels, eps=1e-5):
    """Central differences of the enumerated log-likelihood, per block"""
    result = {}
    for name, block in params.blocks().items():
        grad = np.zeros_like(block)
        for index in np.ndindex(block.shape):
            plus, minus = params.copy(), params.copy()
            plus.blocks()[name][index] += eps
            minus.blocks()[name][index] -= eps
            grad[index] = (
                exact_log_likelihood(plus, docs, labels) - exact_log_likelihood(minus, docs, labels)
            ) / (2 * eps)
        result[name] = grad
    return result


class TestInitParams:
    def test_same_seed_identical(self):
        config = TrainConfig(seed=11)
        first, second = init_params(6, 4, 2, config), init_params(6, 4, 2, config)
        for name, block in first.blocks().items():
            np.testing.assert_array_equal(block, second.blocks()[name])

    def test_different_seed_differs(self):
        assert not np.array_equal(init_params(6, 4, 2, TrainConfig(seed=1)).W, init_params(6, 4, 2, TrainConfig(seed=2)).W)

    def test_hidden_bias_starts_at_zero(self):
        np.testing.assert_array_equal(init_params(6, 4, 2, TrainConfig(seed=5)).b, np.zeros(4))

    def test_rs_mode_has_no_sentiment_blocks(self):
        params = init_params(6, 4, 0, TrainConfig())
        assert params.mode is ModelMode.RS

    def test_rs_and_joint_share_word_blocks(self):
        config = TrainConfig(seed=8, init_sigma=0.01)
        rs, joint = init_params(6, 4, 0, config), init_params(6, 4, 2, config)
        np.testing.assert_array_equal(rs.W, joint.W)
        np.testing.assert_array_equal(rs.a, joint.a)
        assert np.all(np.abs(joint.U) < 0.1)

    def test_gaussian_moments(self):
        params = init_params(1000, 1000, 0, TrainConfig(seed=3, init_sigma=1.0))
        n = params.W.size
        assert abs(params.W.mean()) < 4.0 / np.sqrt(n)
        assert abs(params.W.std() - 1.0) < 4.0 * np.sqrt(1.0 / (2 * n))


class TestCdStep:
    def test_empty_document_rejected(self, rng):
        with pytest.raises(EmptyDocumentError):
            cd_step(ModelParams.zeros(3, 2), Document(counts=[0, 0, 0]), None, 1, rng)

    def test_joint_mode_needs_sentiment(self, rng):
        with pytest.raises(ModeError):
            cd_step(ModelParams.zeros(3, 2, 2), Document(counts=[1, 0, 0]), None, 1, rng)

    def test_block_shapes(self, rng, oracle):
        params = oracle.random_params(rng, 5, 3, 2)
        grad = cd_step(params, Document(counts=[1, 0, 2, 0, 1]), onehot(1, 2), 2, rng)
        assert grad.dW.shape == (5, 3) and grad.dU.shape == (2, 3)
        assert grad.da.shape == (5,) and grad.db.shape == (3,) and grad.dc.shape == (2,)
        assert grad.is_finite()
        # reconstruction keeps D, so da sums to zero
        assert grad.da.sum() == pytest.approx(0.0)

    def test_zero_model_expectation(self):
        # K=2, D=1, H=1, S=2: E[dW_w] = 0.5 * (v_w - 0.5)
        params = ModelParams.zeros(2, 1, 2)
        doc = Document(counts=[1, 0])
        rng = np.random.default_rng(0)
        trials = 20000
        total = np.zeros((2, 1))
        for _ in range(trials):
            total += cd_step(params, doc, onehot(1, 2), 1, rng).dW
        np.testing.assert_allclose(total[:, 0] / trials, [0.25, -0.25], atol=0.01)

    def test_identical_phases_zero_visible_and_sentiment_terms(self):
        params = ModelParams.zeros(2, 1, 2)
        doc = Document(counts=[1, 0])
        s = onehot(0, 2)
        rng = np.random.default_rng(1)
        for _ in range(200):
            grad = cd_step(params, doc, s, 1, rng)
            if np.all(grad.da == 0) and np.all(grad.dc == 0):
                # zero model: h+ and h- are both 0.5
                np.testing.assert_allclose(grad.dW, 0.0)
                np.testing.assert_allclose(grad.db, 0.0)
                return
        pytest.fail("no identical reconstruction in 200 draws")


class TestExactGradient:
    def test_matches_finite_differences(self, rng, oracle):
        for _ in range(20):
            K = int(rng.integers(2, 4))
            H = int(rng.integers(1, 4))
            S = int(rng.choice([0, 2]))
            params = oracle.random_params(rng, K, H, S)
            docs = [oracle.sequence_document(rng.integers(K, size=int(rng.integers(1, 4))), K) for _ in range(3)]
            labels = [int(rng.integers(S)) for _ in docs] if S else None
            grad = exact_gradient(params, docs, labels)
            numeric = _finite_difference(params, docs, labels)
            for name, block in grad.blocks().items():
                np.testing.assert_allclose(block, numeric[name], atol=1e-6, err_msg=name)

    def test_zero_model_visible_bias(self, tiny_labeled_corpus):
        docs = tiny_labeled_corpus.train_documents
        labels = [doc.sentiment for doc in docs]
        grad = exact_gradient(ModelParams.zeros(3, 2, 2), docs, labels)
        data = np.sum([doc.counts for doc in docs], axis=0)
        model = sum(doc.length for doc in docs) / 3.0
        np.testing.assert_allclose(grad.da, data - model, atol=1e-12)

    def test_joint_needs_labels(self, tiny_labeled_corpus):
        with pytest.raises(ModeError):
            exact_gradient(ModelParams.zeros(3, 2, 2), tiny_labeled_corpus.train_documents)


class TestApplyUpdate:
    def test_zero_gradient_unchanged(self, rng, oracle):
        params = oracle.random_params(rng, 3, 2, 2)
        updated = apply_update(params, GradientEstimate.zeros_like(params), 0.1)
        for name, block in params.blocks().items():
            np.testing.assert_array_equal(updated.blocks()[name], block)

    def test_zero_learning_rate_unchanged(self, rng, oracle):
        params = oracle.random_params(rng, 3, 2)
        grad = GradientEstimate(dW=np.ones((3, 2)), da=np.ones(3), db=np.ones(2))
        np.testing.assert_array_equal(apply_update(params, grad, 0.0).W, params.W)

    def test_single_coordinate(self):
        params = ModelParams(W=[[1.0]], a=[0.0], b=[0.0])
        grad = GradientEstimate(dW=np.array([[2.0]]), da=np.zeros(1), db=np.zeros(1))
        assert apply_update(params, grad, 0.001).W[0, 0] == pytest.approx(1.002, abs=1e-15)

    def test_not_inplace_by_default(self):
        params = ModelParams(W=[[1.0]], a=[0.0], b=[0.0])
        apply_update(params, GradientEstimate(dW=np.array([[2.0]]), da=np.zeros(1), db=np.zeros(1)), 0.5)
        assert params.W[0, 0] == 1.0

    def test_mode_mismatch(self):
        params = ModelParams.zeros(3, 2, 2)
        with pytest.raises(DimensionMismatchError):
            apply_update(params, GradientEstimate.zeros_like(ModelParams.zeros(3, 2)), 0.1)

    def test_non_finite_result(self):
        params = ModelParams.zeros(2, 1)
        grad = GradientEstimate(dW=np.array([[np.inf], [0.0]]), da=np.zeros(2), db=np.zeros(1))
        with pytest.raises(NumericalInstabilityError) as info:
            apply_update(params, grad, 0.1, update=4)
        assert info.value.block == "W" and info.value.update == 4


class _RecordingProbe:
    def __init__(self, every):
        self.every = every
        self.epochs = []

    def __call__(self, epoch, params):
        self.epochs.append(epoch)
        return {"probe": float(epoch)}


class TestTrain:
    def test_zero_iterations_returns_init(self, small_corpus):
        config = TrainConfig(iterations=0, hidden_units=4, seed=9)
        result = train(small_corpus, config, ModelMode.JOINT)
        expected = init_params(small_corpus.vocabulary.size, 4, 2, config)
        np.testing.assert_array_equal(result.params.W, expected.W)
        np.testing.assert_array_equal(result.params.U, expected.U)
        assert result.updates == 0

    def test_deterministic(self, small_corpus):
        config = TrainConfig(iterations=2, hidden_units=4, seed=4, learning_rate=0.01)
        first = train(small_corpus, config, ModelMode.JOINT)
        second = train(small_corpus, config, ModelMode.JOINT)
        for name, block in first.params.blocks().items():
            np.testing.assert_array_equal(block, second.params.blocks()[name])
        assert [e.value for e in first.log] == [e.value for e in second.log]

    def test_rs_mode(self, small_corpus):
        result = train(small_corpus, TrainConfig(iterations=1, hidden_units=3), ModelMode.RS)
        assert result.params.mode is ModelMode.RS

    def test_joint_requires_labels(self):
        vocab = Vocabulary(words=("a", "b"))
        corpus = Corpus.from_documents(vocab, [Document(counts=[1, 1]), Document(counts=[2, 0], sentiment=1)])
        with pytest.raises(DataError):
            train(corpus, TrainConfig(iterations=1, hidden_units=2), ModelMode.JOINT)

    def test_update_unit_counts_documents(self, small_corpus):
        n = len(small_corpus.train_documents)
        result = train(small_corpus, TrainConfig(iterations=n + 5, iteration_unit="update", hidden_units=3), ModelMode.RS)
        assert result.updates == n + 5
        assert result.epochs == 2
        l1 = [entry for entry in result.log if entry.metric_name == "reconstruction_l1"]
        assert [entry.doc_index for entry in l1] == [n, 5]

    def test_callbacks_schedule(self, small_corpus):
        probe = _RecordingProbe(every=2)
        result = train(small_corpus, TrainConfig(iterations=5, hidden_units=3), ModelMode.RS, callbacks=[probe])
        assert probe.epochs == [0, 2, 4, 5]
        assert [e.epoch for e in result.log if e.metric_name == "probe"] == [0, 2, 4, 5]

    def test_empty_documents_skipped(self):
        vocab = Vocabulary(words=("a", "b"))
        docs = [Document(counts=[0, 0], sentiment=0), Document(counts=[2, 1], sentiment=1), Document(counts=[1, 2], sentiment=0)]
        result = train(Corpus.from_documents(vocab, docs), TrainConfig(iterations=1, hidden_units=2), ModelMode.JOINT)
        assert result.updates == 2

    def test_checkpoints_written(self, small_corpus, tmp_path):
        config = TrainConfig(iterations=4, hidden_units=3, checkpoint_every=2, checkpoint_dir=tmp_path)
        result = train(small_corpus, config, ModelMode.JOINT)
        written = sorted(p.name for p in tmp_path.iterdir())
        assert written == ["checkpoint-epoch00002.rbm", "checkpoint-epoch00004.rbm"]
        np.testing.assert_array_equal(load_params(tmp_path / written[-1]).W, result.params.W)

    def test_momentum_and_weight_decay_change_trajectory(self, small_corpus):
        plain = train(small_corpus, TrainConfig(iterations=1, hidden_units=3, seed=2), ModelMode.JOINT)
        extras = train(
            small_corpus,
            TrainConfig(iterations=1, hidden_units=3, seed=2, momentum=0.5, weight_decay=0.01),
            ModelMode.JOINT,
        )
        assert not np.array_equal(plain.params.W, extras.params.W)

    def test_hidden_grid(self):
        assert HIDDEN_GRID[0] == 5 and HIDDEN_GRID[-1] == 90 and len(HIDDEN_GRID) == 14


@pytest.mark.slow
class TestTrainingBehaviour:
    def test_reconstruction_error_decreases_on_repeated_document(self):
        vocab = Vocabulary(words=tuple(f"w{k}" for k in range(8)))
        doc = Document(counts=[5, 3, 0, 0, 1, 0, 0, 1], sentiment=1)
        corpus = Corpus.from_documents(vocab, [doc] * 10)
        drops = []
        for seed in range(5):
            config = TrainConfig(iterations=40, hidden_units=4, learning_rate=0.01, seed=seed)
            log = train(corpus, config, ModelMode.RS).log
            l1 = [e.value for e in log if e.metric_name == "reconstruction_l1"]
            drops.append(np.mean(l1[:5]) - np.mean(l1[-5:]))
        assert np.median(drops) > 0

    def test_long_chain_cd_points_along_exact_gradient(self, oracle):
        rng = np.random.default_rng(8)
        params = oracle.random_params(rng, 2, 2, 2)
        doc = Document(counts=[2, 0])
        exact = exact_gradient(params, [doc], [1]).as_vector()
        total = np.zeros_like(exact)
        for _ in range(2000):
            total += cd_step(params, doc, onehot(1, 2), 50, rng).as_vector()
        estimate = total / 2000
        cosine = estimate @ exact / (np.linalg.norm(estimate) * np.linalg.norm(exact))
        assert cosine > 0.95
