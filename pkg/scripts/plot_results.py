"""
Figures from the CSV artifacts of a hidden-unit sweep

    python scripts/plot_results.py perplexity results/ --out perplexity.png
    python scripts/plot_results.py pr results/ --hidden 50 --out pr.png
    python scripts/plot_results.py accuracy results/ --out accuracy.png
    python scripts/plot_results.py topics results/ --out topics.png
    python scripts/plot_results.py training results/model_joint_50.log.csv --out l1.png

File names follow scripts/sweep_hidden.sh: ppl_<mode>_<H>.csv, pr_<mode>_<H>.csv,
cls_joint_<H>.csv and topics_joint_<H>.csv.
"""
import re
from pathlib import Path

import click
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from sentopic.services.artifacts import read_csv, read_header  # noqa: E402

SWEEP_NAME = re.compile(r"^(?P<kind>ppl|pr|cls|topics)_(?P<mode>rs|joint)_(?P<hidden>\d+)$")
MODE_LABELS = {"rs": "RS", "joint": "RS + sentiment"}


def _sweep_files(directory: Path, kind: str):
    for path in sorted(Path(directory).glob(f"{kind}_*.csv")):
        match = SWEEP_NAME.match(path.stem)
        if match:
            yield path, match.group("mode"), int(match.group("hidden"))


def _save(fig, out: Path) -> None:
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    click.echo(f"wrote {out}")


@click.group()
def plots():
    """Plot sweep artifacts."""
    plt.style.use("ggplot")
    matplotlib.rcParams.update({"font.size": 12})


@plots.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=Path("perplexity.png"))
def perplexity(directory, out):
    """Test perplexity against the number of hidden units, one line per mode."""
    rows = [
        {"mode": mode, "hidden": hidden, "perplexity": float(read_header(path)["perplexity"])}
        for path, mode, hidden in _sweep_files(directory, "ppl")
    ]
    if not rows:
        raise click.ClickException(f"no ppl_<mode>_<H>.csv files in {directory}")
    frame = pd.DataFrame(rows).sort_values("hidden")
    fig, ax = plt.subplots(figsize=(8, 5))
    for mode, group in frame.groupby("mode"):
        ax.plot(group.hidden, group.perplexity, marker="o", label=MODE_LABELS.get(mode, mode))
    ax.set_xlabel("Hidden units")
    ax.set_ylabel("Test perplexity")
    ax.legend(loc="best")
    _save(fig, out)


@plots.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--hidden", type=int, required=True, help="Hidden layer size to compare across modes")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=Path("pr.png"))
def pr(directory, hidden, out):
    """Precision-recall curves of both modes at one hidden layer size."""
    fig, ax = plt.subplots(figsize=(7, 6))
    found = False
    for path, mode, size in _sweep_files(directory, "pr"):
        if size != hidden:
            continue
        curve = read_csv(path)
        ax.plot(curve.recall, curve.precision, marker=".", label=MODE_LABELS.get(mode, mode))
        found = True
    if not found:
        raise click.ClickException(f"no pr_<mode>_{hidden}.csv files in {directory}")
    ax.set_xscale("log")
    ax.set_xlabel("Recall")
    ax.set_ylabel("Precision")
    ax.legend(loc="best")
    _save(fig, out)


@plots.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=Path("accuracy.png"))
def accuracy(directory, out):
    """Sentiment accuracy of the joint model and of the lexicon baseline."""
    rows = []
    for path, _, hidden in _sweep_files(directory, "cls"):
        frame = read_csv(path)
        row = {"hidden": hidden, "model": (frame.gold == frame.predicted).mean()}
        if "baseline" in frame:
            row["baseline"] = (frame.gold == frame.baseline).mean()
        rows.append(row)
    if not rows:
        raise click.ClickException(f"no cls_joint_<H>.csv files in {directory}")
    frame = pd.DataFrame(rows).sort_values("hidden")
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(frame.hidden, frame.model, marker="o", label=MODE_LABELS["joint"])
    if "baseline" in frame:
        ax.plot(frame.hidden, frame.baseline, linestyle="--", label="Lexicon counts")
    ax.set_xlabel("Hidden units")
    ax.set_ylabel("Test accuracy")
    ax.legend(loc="best")
    _save(fig, out)


@plots.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=Path("topics.png"))
def topics(directory, out):
    """Topic tag precision against the number of hidden units."""
    rows = [
        {"hidden": hidden, "precision": float(read_header(path)["precision"])}
        for path, _, hidden in _sweep_files(directory, "topics")
    ]
    if not rows:
        raise click.ClickException(f"no topics_joint_<H>.csv files in {directory}")
    frame = pd.DataFrame(rows).sort_values("hidden")
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.bar(frame.hidden.astype(str), frame.precision)
    ax.set_ylim(0, 1)
    ax.set_xlabel("Hidden units")
    ax.set_ylabel("Tag precision")
    _save(fig, out)


@plots.command()
@click.argument("log_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--metric", default="reconstruction_l1", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=Path("training.png"))
def training(log_path, metric, out):
    """One metric of a training log against the epoch."""
    log = read_csv(log_path)
    series = log[log.metric_name == metric]
    if series.empty:
        raise click.ClickException(f"{log_path} has no {metric} rows")
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(series.epoch, series.value)
    ax.set_xlabel("Epoch")
    ax.set_ylabel(metric)
    _save(fig, out)


if __name__ == "__main__":
    plots()
