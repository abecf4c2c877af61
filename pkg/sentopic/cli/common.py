"""
Helpers shared by the command modules
"""
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import click

from sentopic.core.config import RunConfig
from sentopic.core.errors import DimensionMismatchError
from sentopic.core.logging import log_resolved_config
from sentopic.models.persistence import load_params_with_metadata
from sentopic.schemas.corpus import Corpus
from sentopic.schemas.model import ModelParams
from sentopic.services.corpus_io import load_corpus

logger = logging.getLogger(__name__)

seed_option = click.option("--seed", type=click.IntRange(min=0), default=None, help="Root seed (SENTOPIC_SEED)")


def resolve_seed(ctx: click.Context, seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    return ctx.find_object(dict)["settings"].seed


def threads(ctx: click.Context) -> int:
    return ctx.find_object(dict)["threads"]


def progress(ctx: click.Context) -> bool:
    return ctx.find_object(dict)["settings"].progress


def resolved_config(ctx: click.Context, **resolved) -> RunConfig:
    """
    The command's parameters after defaults, config file and environment,
    logged and returned for artifact headers
    """
    values = dict(ctx.params)
    values.update(resolved)
    values["command"] = ctx.command_path.split(" ", 1)[-1]
    config = RunConfig.from_params(values)
    log_resolved_config(logger, config.values)
    return config


def parse_int_list(value: str) -> List[int]:
    try:
        return [int(part) for part in str(value).split(",") if part.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}") from exc


def load_model_and_corpus(model_path: Path, dataset: Path) -> Tuple[ModelParams, dict, Corpus]:
    """
    Load a model file and a dataset directory

    Raises:
        DimensionMismatchError: the model's K differs from the vocabulary size
    """
    params, metadata = load_params_with_metadata(model_path)
    corpus = load_corpus(dataset)
    if params.K != corpus.vocabulary.size:
        raise DimensionMismatchError(
            f"model has K={params.K} but the dataset vocabulary has {corpus.vocabulary.size} words"
        )
    return params, metadata, corpus
