"""
Document retrieval by cosine similarity of hidden representations
"""
import logging
from typing import List, NamedTuple, Sequence

import numpy as np
from scipy.special import expit
from sklearn.metrics.pairwise import cosine_similarity

from sentopic.core.errors import DataError
from sentopic.models.rbm import hidden_given_v, hidden_logits
from sentopic.schemas.corpus import Document
from sentopic.schemas.model import ModelParams
from sentopic.schemas.tasks import PRCurve

logger = logging.getLogger(__name__)


class RetrievalHit(NamedTuple):
    index: int
    score: float
    relevant: bool


def hidden_representation(params: ModelParams, doc: Document) -> np.ndarray:
    """p(h | v), the retrieval embedding"""
    return hidden_given_v(params, doc)


def representations(params: ModelParams, docs: Sequence[Document]) -> np.ndarray:
    """hidden_representation for a batch, shape (N, H)"""
    if not docs:
        return np.zeros((0, params.H))
    counts = np.vstack([doc.counts for doc in docs])
    lengths = np.array([doc.length for doc in docs])
    return expit(hidden_logits(params, counts, lengths))


def rank(similarities: np.ndarray) -> np.ndarray:
    """Indices by descending similarity per row; ties keep index order"""
    return np.argsort(-np.atleast_2d(similarities), axis=1, kind="stable")


def retrieve(query_doc: Document, train_docs: Sequence[Document], params: ModelParams) -> List[RetrievalHit]:
    """
    Rank training documents against a query

    Relevance is topic equality with the query. Zero vectors have cosine 0
    with everything.
    """
    if query_doc.topic is None or any(doc.topic is None for doc in train_docs):
        raise DataError("retrieval needs topic labels on the query and every training document")
    scores = cosine_similarity(hidden_representation(params, query_doc)[None, :], representations(params, train_docs))[0]
    return [
        RetrievalHit(index=int(i), score=float(scores[i]), relevant=train_docs[i].topic == query_doc.topic)
        for i in rank(scores)[0]
    ]


def pr_curve_from_representations(
    query_reps: np.ndarray,
    query_topics: Sequence[int],
    train_reps: np.ndarray,
    train_topics: Sequence[int],
    k_grid: Sequence[int],
) -> PRCurve:
    """
    precision@k and recall@k averaged over queries

    Depths beyond the training set size are truncated to it. Recall is
    relative to the number of training documents sharing the query's topic
    (0 for a query whose topic is absent).
    """
    query_topics = np.asarray(query_topics)
    train_topics = np.asarray(train_topics)
    n_train = len(train_topics)
    if n_train == 0 or len(query_topics) == 0:
        raise DataError("retrieval needs at least one query and one training document")
    order = rank(cosine_similarity(query_reps, train_reps))
    relevant = train_topics[order] == query_topics[:, None]
    found = np.cumsum(relevant, axis=1)
    total = relevant.sum(axis=1)

    depths = sorted(min(int(k), n_train) for k in k_grid)
    points = []
    for k in depths:
        hits = found[:, k - 1]
        recall = np.divide(hits, total, out=np.zeros(len(hits)), where=total > 0)
        points.append((float(recall.mean()), float((hits / k).mean())))
    return PRCurve(k_grid=depths, points=points)


def pr_curve(
    test_docs: Sequence[Document],
    train_docs: Sequence[Document],
    params: ModelParams,
    k_grid: Sequence[int],
) -> PRCurve:
    """Every test document queries the training set."""
    for name, docs in (("test", test_docs), ("training", train_docs)):
        if any(doc.topic is None for doc in docs):
            raise DataError(f"retrieval needs topic labels on every {name} document")
    curve = pr_curve_from_representations(
        representations(params, test_docs),
        [doc.topic for doc in test_docs],
        representations(params, train_docs),
        [doc.topic for doc in train_docs],
        k_grid,
    )
    logger.info("PR curve over %d queries at depths %s", len(test_docs), curve.k_grid)
    return curve
