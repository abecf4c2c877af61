"""
Training command
"""
import logging
from pathlib import Path

import click

from sentopic.cli.common import progress, resolve_seed, resolved_config, seed_option, threads
from sentopic.models.persistence import save_params
from sentopic.schemas.evaluation import AISConfig, PartitionTableConfig
from sentopic.schemas.model import ModelMode
from sentopic.schemas.training import TrainConfig
from sentopic.services.artifacts import training_log_frame, write_csv
from sentopic.services.corpus_io import load_corpus
from sentopic.services.evaluation_service import PerplexityProbe
from sentopic.services.training_service import train as train_model

logger = logging.getLogger(__name__)


@click.command()
@click.option("--dataset", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--mode", type=click.Choice([m.value for m in ModelMode]), default=ModelMode.JOINT.value, show_default=True)
@click.option("--hidden", type=click.IntRange(min=1), default=10, show_default=True, help="Hidden units H")
@click.option("--epochs", type=click.IntRange(min=0), default=1000, show_default=True,
              help="Iterations; epochs, or document updates with --iteration-unit update")
@click.option("--iteration-unit", type=click.Choice(["epoch", "update"]), default="epoch", show_default=True)
@click.option("--learning-rate", type=float, default=0.001, show_default=True)
@click.option("--batch-size", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--cd-steps", type=click.IntRange(min=1), default=1, show_default=True, help="k in CD-k")
@click.option("--init-sigma", type=float, default=1.0, show_default=True)
@click.option("--momentum", type=float, default=0.0, show_default=True)
@click.option("--weight-decay", type=float, default=0.0, show_default=True)
@click.option("--checkpoint-every", type=click.IntRange(min=0), default=0, show_default=True,
              help="Epochs between checkpoints (0 = none)")
@click.option("--probe-every", type=click.IntRange(min=0), default=0, show_default=True,
              help="Epochs between test perplexity probes (0 = none)")
@click.option("--probe-method", type=click.Choice(["auto", "exact", "ais"]), default="auto", show_default=True)
@click.option("--ais-runs", type=click.IntRange(min=10), default=100, show_default=True)
@click.option("--ais-temps", type=click.IntRange(min=100), default=1000, show_default=True)
@click.option("--bucketed/--no-bucketed", default=False, show_default=True)
@seed_option
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Model file")
@click.option("--log", "log_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Training log CSV (default: model path with .log.csv)")
@click.pass_context
def train(ctx, dataset, mode, hidden, epochs, iteration_unit, learning_rate, batch_size, cd_steps, init_sigma,
          momentum, weight_decay, checkpoint_every, probe_every, probe_method, ais_runs, ais_temps, bucketed,
          seed, out, log_path):
    """Train an RS or joint model with Contrastive Divergence."""
    seed = resolve_seed(ctx, seed)
    log_path = log_path or out.with_suffix(".log.csv")
    config = resolved_config(ctx, seed=seed, log_path=log_path, threads=threads(ctx))
    train_config = TrainConfig(
        learning_rate=learning_rate,
        iterations=epochs,
        iteration_unit=iteration_unit,
        batch_size=batch_size,
        cd_steps=cd_steps,
        init_sigma=init_sigma,
        seed=seed,
        hidden_units=hidden,
        momentum=momentum,
        weight_decay=weight_decay,
        checkpoint_every=checkpoint_every,
        checkpoint_dir=out.parent / f"{out.stem}.checkpoints",
        progress=progress(ctx),
    )
    corpus = load_corpus(dataset)
    callbacks = []
    if probe_every:
        table_config = PartitionTableConfig(
            method=probe_method,
            bucketed=bucketed,
            threads=threads(ctx),
            ais=AISConfig(n_runs=ais_runs, n_temps=ais_temps),
        )
        callbacks.append(PerplexityProbe(corpus.test_documents, every=probe_every, config=table_config, seed=seed))

    result = train_model(corpus, train_config, ModelMode(mode), callbacks=callbacks, metadata=config.values)
    save_params(result.params, out, config.values)
    write_csv(training_log_frame(result.log), log_path, config.header_lines())
    click.echo(f"trained {mode} model K={result.params.K} H={result.params.H} S={result.params.S} "
               f"epochs={result.epochs} updates={result.updates}")
