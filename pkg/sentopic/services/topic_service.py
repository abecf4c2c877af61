"""
Topic sentiment tagging

Hidden units act as topics. Each is scored by the lexicon mass of its
visible weights, the extremes are tagged positive or negative, and the
tags are checked against the unit's connections to the sentiment layer.
"""
import logging
from typing import Optional

import numpy as np

from sentopic.core.errors import DataError
from sentopic.models.rbm import require_joint
from sentopic.schemas.corpus import SENTIMENT_NEGATIVE, SENTIMENT_POSITIVE, SentimentLexicon, Vocabulary
from sentopic.schemas.model import ModelParams
from sentopic.schemas.tasks import TopicSentimentReport, TopicTag
from sentopic.services.text_service import lexicon_intersection

logger = logging.getLogger(__name__)

POSITIVE_TAG = "positive"
NEGATIVE_TAG = "negative"
TAGS_PER_POLARITY = 5


def topic_masses(params: ModelParams, positive, negative):
    """Per hidden unit: summed W over positive words and over negative words"""
    return params.W[list(positive)].sum(axis=0), params.W[list(negative)].sum(axis=0)


def topic_order(differences: np.ndarray) -> np.ndarray:
    """Units by descending (positive - negative) mass; ties in index order"""
    return np.argsort(-differences, kind="stable")


def topic_sentiment_report(
    params: ModelParams,
    vocab: Vocabulary,
    lex: SentimentLexicon,
    tags_per_polarity: Optional[int] = None,
) -> TopicSentimentReport:
    """
    Tag the most positive and most negative hidden units

    The top tags_per_polarity units by mass difference are tagged
    positive and the bottom ones negative (5 each; H // 2 each when H < 10).
    A positive tag agrees when U[positive, j] > U[negative, j], a negative
    tag when the reverse holds. precision is the share of agreeing tags.

    Raises:
        ModeError: params are RS
        DataError: the vocabulary shares no positive or no negative lexicon word
    """
    require_joint(params, "topic_sentiment_report")
    if params.S <= max(SENTIMENT_POSITIVE, SENTIMENT_NEGATIVE):
        raise DataError(f"topic tagging needs a positive and a negative sentiment unit, model has S={params.S}")
    shared = lexicon_intersection(vocab, lex)
    if not shared.positive or not shared.negative:
        raise DataError(
            f"vocabulary shares {len(shared.positive)} positive and {len(shared.negative)} negative lexicon words; "
            "both must be non-empty"
        )

    notes = []
    if tags_per_polarity is None:
        tags_per_polarity = TAGS_PER_POLARITY
        if params.H < 2 * TAGS_PER_POLARITY:
            tags_per_polarity = params.H // 2
            notes.append(f"H={params.H} < {2 * TAGS_PER_POLARITY}: tagged {tags_per_polarity} topics per polarity")
    tags_per_polarity = min(tags_per_polarity, params.H // 2)

    positive_mass, negative_mass = topic_masses(params, shared.positive, shared.negative)
    differences = positive_mass - negative_mass
    order = topic_order(differences)
    tags = {}
    if tags_per_polarity:
        tags.update({int(j): POSITIVE_TAG for j in order[:tags_per_polarity]})
        tags.update({int(j): NEGATIVE_TAG for j in order[-tags_per_polarity:]})

    U = params.U
    per_topic = []
    for j in order:
        j = int(j)
        tag = tags.get(j)
        agrees = None
        if tag == POSITIVE_TAG:
            agrees = bool(U[SENTIMENT_POSITIVE, j] > U[SENTIMENT_NEGATIVE, j])
        elif tag == NEGATIVE_TAG:
            agrees = bool(U[SENTIMENT_NEGATIVE, j] > U[SENTIMENT_POSITIVE, j])
        per_topic.append(
            TopicTag(
                topic=j,
                positive_mass=float(positive_mass[j]),
                negative_mass=float(negative_mass[j]),
                tag=tag,
                agrees=agrees,
            )
        )

    checked = [entry.agrees for entry in per_topic if entry.agrees is not None]
    if not checked:
        notes.append("no topics tagged")
    degenerate = bool(np.all(differences == differences[0]))
    if degenerate:
        notes.append("all mass differences are equal; tags follow index order")
    report = TopicSentimentReport(
        per_topic=per_topic,
        precision=sum(checked) / len(checked) if checked else 0.0,
        tags_per_polarity=tags_per_polarity,
        degenerate=degenerate,
        notes=notes,
    )
    logger.info("Topic tagging precision %.4f over %d tags", report.precision, len(checked))
    return report
