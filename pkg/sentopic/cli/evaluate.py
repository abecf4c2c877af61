"""
Evaluation commands: perplexity, classification, retrieval, topic tags, MLP
"""
import logging
from pathlib import Path

import click
import pandas as pd

from sentopic.cli.common import (
    load_model_and_corpus,
    parse_int_list,
    progress,
    resolve_seed,
    resolved_config,
    seed_option,
    threads,
)
from sentopic.core.errors import DataError
from sentopic.core.random import RandomStreams
from sentopic.schemas.corpus import TEST, TRAIN
from sentopic.schemas.evaluation import AISConfig, PartitionTableConfig
from sentopic.schemas.tasks import BaselineConfig
from sentopic.services.artifacts import (
    classification_frame,
    perplexity_footer,
    perplexity_frame,
    pr_curve_frame,
    topic_frame,
    write_csv,
)
from sentopic.services.classification_service import baseline_corpus, classify_corpus, mlp_finetune
from sentopic.services.evaluation_service import (
    conditional_partition_table,
    conditional_perplexity,
    partition_table,
    perplexity,
)
from sentopic.services.retrieval_service import pr_curve
from sentopic.services.text_service import load_lexicon
from sentopic.services.topic_service import topic_sentiment_report

logger = logging.getLogger(__name__)

SENTIMENT_COLUMNS = ("neg", "pos")

model_option = click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                            required=True, help="Model file")
dataset_option = click.option("--dataset", type=click.Path(exists=True, file_okay=False, path_type=Path),
                              required=True, help="Dataset directory")
part_option = click.option("--part", type=click.Choice([TRAIN, TEST]), default=TEST, show_default=True,
                           help="Split to evaluate")
out_option = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="CSV artifact")


def _documents(corpus, part):
    return corpus.train_documents if part == TRAIN else corpus.test_documents


@click.group(name="eval")
def evaluate():
    """Evaluate a trained model."""


@evaluate.command(name="perplexity")
@model_option
@dataset_option
@part_option
@click.option("--method", type=click.Choice(["auto", "exact", "ais"]), default="auto", show_default=True,
              help="Partition function estimator")
@click.option("--bucketed/--no-bucketed", default=False, show_default=True,
              help="Share log Z across 32 geometric length buckets")
@click.option("--ais-runs", type=click.IntRange(min=10), default=100, show_default=True)
@click.option("--ais-temps", type=click.IntRange(min=100), default=1000, show_default=True)
@click.option("--schedule", type=click.Choice(["geometric", "linear"]), default="geometric", show_default=True)
@click.option("--conditional/--marginal", default=False, show_default=True,
              help="p(v | gold s) instead of marginalizing the sentiment layer")
@seed_option
@out_option
@click.pass_context
def perplexity_command(ctx, model_path, dataset, part, method, bucketed, ais_runs, ais_temps, schedule, conditional,
                       seed, out):
    """Test-set perplexity."""
    seed = resolve_seed(ctx, seed)
    config = resolved_config(ctx, seed=seed, threads=threads(ctx))
    params, _, corpus = load_model_and_corpus(model_path, dataset)
    docs = _documents(corpus, part)
    table_config = PartitionTableConfig(
        method=method,
        bucketed=bucketed,
        threads=threads(ctx),
        ais=AISConfig(n_runs=ais_runs, n_temps=ais_temps, schedule=schedule),
    )
    if conditional:
        table = conditional_partition_table(params, docs, table_config, seed)
        report = conditional_perplexity(params, docs, table)
    else:
        table = partition_table(params, [doc.length for doc in docs], table_config, seed, progress=progress(ctx))
        report = perplexity(params, docs, table)
    if out:
        write_csv(perplexity_frame(report), out, config.header_lines(), perplexity_footer(report))
    click.echo(f"perplexity={report.perplexity!r}")


@evaluate.command()
@model_option
@dataset_option
@part_option
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="Lexicon for the word-count baseline")
@click.option("--tie-label", type=click.IntRange(0, 1), default=0, show_default=True,
              help="Baseline label on ties (0 negative, 1 positive)")
@out_option
@click.pass_context
def classify(ctx, model_path, dataset, part, lexicon_path, tie_label, out):
    """Sentiment classification accuracy, with the lexicon baseline."""
    config = resolved_config(ctx)
    params, _, corpus = load_model_and_corpus(model_path, dataset)
    docs = _documents(corpus, part)
    report = classify_corpus(params, docs)
    labels = SENTIMENT_COLUMNS if params.S == len(SENTIMENT_COLUMNS) else None
    frame = classification_frame(report, labels)
    click.echo(f"model_accuracy={report.accuracy!r}")
    if lexicon_path:
        baseline = baseline_corpus(docs, corpus.vocabulary, load_lexicon(lexicon_path), BaselineConfig(tie_label=tie_label))
        frame.insert(3, "baseline", [row.predicted for row in baseline.rows])
        click.echo(f"baseline_accuracy={baseline.accuracy!r}")
    if out:
        write_csv(frame, out, config.header_lines())


@evaluate.command()
@model_option
@dataset_option
@click.option("--k-grid", default="1,3,5,10,20,50,100", show_default=True, help="Comma-separated retrieval depths")
@out_option
@click.pass_context
def retrieve(ctx, model_path, dataset, k_grid, out):
    """Precision-recall curve: test documents query the training set."""
    config = resolved_config(ctx)
    depths = parse_int_list(k_grid)
    if not depths or min(depths) < 1:
        raise click.BadParameter("depths must be positive integers", param_hint="--k-grid")
    params, _, corpus = load_model_and_corpus(model_path, dataset)
    curve = pr_curve(corpus.test_documents, corpus.train_documents, params, depths)
    frame = pr_curve_frame(curve)
    if out:
        write_csv(frame, out, config.header_lines())
    for k, recall, precision in frame.itertuples(index=False):
        click.echo(f"k={k} recall={recall:.4f} precision={precision:.4f}")


@evaluate.command()
@model_option
@dataset_option
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--tags", type=click.IntRange(min=0), default=None, help="Topics tagged per polarity (default 5)")
@out_option
@click.pass_context
def topics(ctx, model_path, dataset, lexicon_path, tags, out):
    """Tag hidden units as positive or negative topics."""
    config = resolved_config(ctx)
    params, _, corpus = load_model_and_corpus(model_path, dataset)
    report = topic_sentiment_report(params, corpus.vocabulary, load_lexicon(lexicon_path), tags)
    if out:
        write_csv(topic_frame(report), out, config.header_lines(), [f"# precision={report.precision!r}"])
    for note in report.notes:
        click.echo(f"note: {note}")
    click.echo(f"positive={report.tagged('positive')} negative={report.tagged('negative')}")
    click.echo(f"precision={report.precision!r}")


@evaluate.command()
@model_option
@dataset_option
@click.option("--epochs", type=click.IntRange(min=0), default=50, show_default=True)
@click.option("--learning-rate", type=float, default=0.01, show_default=True)
@click.option("--batch-size", type=click.IntRange(min=1), default=1, show_default=True)
@seed_option
@out_option
@click.pass_context
def mlp(ctx, model_path, dataset, epochs, learning_rate, batch_size, seed, out):
    """Fine-tune a network warm-started from the model next to a random one."""
    seed = resolve_seed(ctx, seed)
    config = resolved_config(ctx, seed=seed)
    params, _, corpus = load_model_and_corpus(model_path, dataset)
    if not corpus.test_documents:
        raise DataError("the dataset has no test documents")
    rng = RandomStreams(seed).generator("mlp")
    _, result = mlp_finetune(params, corpus.train_documents, corpus.test_documents, epochs, learning_rate, rng, batch_size)
    if out:
        frame = pd.DataFrame({"arm": ["warm", "random"], "accuracy": [result.warm_accuracy, result.random_accuracy]})
        write_csv(frame, out, config.header_lines())
    click.echo(f"warm_accuracy={result.warm_accuracy!r} random_accuracy={result.random_accuracy!r}")
