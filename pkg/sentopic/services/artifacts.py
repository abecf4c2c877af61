"""
CSV artifacts for plotting

Every file starts with the run's resolved configuration as "# key=value"
lines, then a pandas-written table.
"""
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd

from sentopic.schemas.evaluation import PerplexityReport
from sentopic.schemas.tasks import ClassificationReport, PRCurve, TopicSentimentReport
from sentopic.schemas.training import TrainingLogEntry


def write_csv(frame: pd.DataFrame, path: Path, header: Sequence[str] = (), footer: Sequence[str] = ()) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for line in header:
            handle.write(f"{line}\n")
        frame.to_csv(handle, index=False, lineterminator="\n", float_format="%.17g")
        for line in footer:
            handle.write(f"{line}\n")


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def training_log_frame(log: Iterable[TrainingLogEntry]) -> pd.DataFrame:
    return pd.DataFrame(
        [entry.model_dump() for entry in log],
        columns=["epoch", "doc_index", "metric_name", "value"],
    )


def perplexity_frame(report: PerplexityReport) -> pd.DataFrame:
    return pd.DataFrame({"doc_id": report.doc_ids, "length": report.lengths, "log_p": report.per_doc_log_p})


def perplexity_footer(report: PerplexityReport) -> List[str]:
    return [f"# total_words={report.total_words}", f"# perplexity={report.perplexity!r}"]


def pr_curve_frame(curve: PRCurve) -> pd.DataFrame:
    return pd.DataFrame({"k": curve.k_grid, "recall": curve.recall, "precision": curve.precision})


def classification_frame(report: ClassificationReport, labels: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """doc_id, gold, predicted, then prob_<label> columns when the method yields probabilities"""
    rows = []
    for row in report.rows:
        record = {"doc_id": row.doc_id, "gold": row.gold, "predicted": row.predicted}
        names = labels or [str(i) for i in range(len(row.probs))]
        record.update({f"prob_{name}": p for name, p in zip(names, row.probs)})
        rows.append(record)
    frame = pd.DataFrame(rows, columns=None if rows else ["doc_id", "gold", "predicted"])
    return frame.astype({"gold": "Int64"}) if len(frame) else frame


def topic_frame(report: TopicSentimentReport) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "topic": entry.topic,
                "positive_mass": entry.positive_mass,
                "negative_mass": entry.negative_mass,
                "tag": entry.tag or "",
                "agrees": "" if entry.agrees is None else str(entry.agrees).lower(),
            }
            for entry in report.per_topic
        ],
        columns=["topic", "positive_mass", "negative_mass", "tag", "agrees"],
    )


def read_header(path: Path) -> Dict[str, str]:
    """The "# key=value" lines of an artifact, header and footer alike"""
    values = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.startswith("# ") and "=" in line:
                key, value = line[2:].rstrip("\n").split("=", 1)
                values[key] = value
    return values
