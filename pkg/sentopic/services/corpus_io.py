"""
On-disk formats for vocabularies, documents, splits and raw corpora

Dataset directory layout:
    vocab.txt      one token per line; line order is the index
    documents.txt  label<TAB>topic<TAB>idx:count idx:count ... ('-' = absent)
    split.txt      train or test, one line per document
    topics.txt     topic names, one per line (optional)

Lines starting with '#' at the top of a file are header comments.
"""
import re
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from sentopic.core.errors import DataError, DocumentFormatError
from sentopic.schemas.corpus import TEST, TRAIN, Corpus, Document, Vocabulary

VOCAB_FILE = "vocab.txt"
DOCUMENTS_FILE = "documents.txt"
SPLIT_FILE = "split.txt"
TOPICS_FILE = "topics.txt"

_REVIEW_TEXT = re.compile(r"<review_text>(.*?)</review_text>", re.S)


def _content_lines(path: Path) -> Iterable[Tuple[int, str]]:
    """(line number, line) pairs after the header comments"""
    with open(path, encoding="utf-8") as handle:
        in_header = True
        for line_number, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if in_header and line.startswith("#"):
                continue
            in_header = False
            yield line_number, line


def _write_lines(path: Path, lines: Iterable[str], header: Sequence[str] = ()) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in header:
            handle.write(f"{line}\n")
        for line in lines:
            handle.write(f"{line}\n")


def load_vocabulary(path: Path) -> Vocabulary:
    words = [line.strip() for _, line in _content_lines(path) if line.strip()]
    return Vocabulary(words=tuple(words))


def save_vocabulary(vocab: Vocabulary, path: Path, header: Sequence[str] = ()) -> None:
    _write_lines(path, vocab.words, header)


def _label(field: str, line_number: int, name: str) -> Optional[int]:
    if field == "-":
        return None
    try:
        value = int(field)
    except ValueError:
        raise DocumentFormatError(line_number, f"{name} {field!r} is not an integer or '-'")
    if value < 0:
        raise DocumentFormatError(line_number, f"{name} must be non-negative")
    return value


def format_document(doc: Document) -> str:
    label = "-" if doc.sentiment is None else str(doc.sentiment)
    topic = "-" if doc.topic is None else str(doc.topic)
    pairs = " ".join(f"{k}:{int(doc.counts[k])}" for k in doc.counts.nonzero()[0])
    return f"{label}\t{topic}\t{pairs}"


def parse_document(line: str, line_number: int, vocab_size: int) -> Document:
    fields = line.split("\t")
    if len(fields) != 3:
        raise DocumentFormatError(line_number, f"expected 3 tab-separated fields, got {len(fields)}")
    counts = [0] * vocab_size
    for pair in fields[2].split():
        index, _, count = pair.partition(":")
        try:
            k, n = int(index), int(count)
        except ValueError:
            raise DocumentFormatError(line_number, f"bad index:count pair {pair!r}")
        if not 0 <= k < vocab_size:
            raise DocumentFormatError(line_number, f"word index {k} outside vocabulary of size {vocab_size}")
        if n < 0:
            raise DocumentFormatError(line_number, f"negative count in {pair!r}")
        counts[k] += n
    return Document(
        counts=counts,
        sentiment=_label(fields[0], line_number, "label"),
        topic=_label(fields[1], line_number, "topic"),
    )


def load_documents(path: Path, vocab_size: int) -> List[Document]:
    return [
        parse_document(line, line_number, vocab_size)
        for line_number, line in _content_lines(path)
        if line.strip()
    ]


def save_documents(documents: Iterable[Document], path: Path, header: Sequence[str] = ()) -> None:
    _write_lines(path, (format_document(doc) for doc in documents), header)


def load_split(path: Path) -> List[str]:
    split = []
    for line_number, line in _content_lines(path):
        value = line.strip()
        if not value:
            continue
        if value not in (TRAIN, TEST):
            raise DocumentFormatError(line_number, f"split value {value!r} is not train or test")
        split.append(value)
    return split


def save_corpus(corpus: Corpus, directory: Path, header: Sequence[str] = ()) -> None:
    """Write vocab, documents, split (and topic names) into a dataset directory"""
    directory = Path(directory)
    save_vocabulary(corpus.vocabulary, directory / VOCAB_FILE, header)
    save_documents(corpus.documents, directory / DOCUMENTS_FILE, header)
    _write_lines(directory / SPLIT_FILE, corpus.split, header)
    if corpus.topic_names:
        _write_lines(directory / TOPICS_FILE, corpus.topic_names, header)


def load_corpus(directory: Path, vocab_path: Optional[Path] = None) -> Corpus:
    """
    Read a dataset directory

    Args:
        directory: Directory holding documents.txt and split.txt
        vocab_path: Vocabulary file to use instead of directory/vocab.txt

    Returns:
        Corpus; without split.txt every document is assigned to train
    """
    directory = Path(directory)
    vocab = load_vocabulary(vocab_path or directory / VOCAB_FILE)
    documents = load_documents(directory / DOCUMENTS_FILE, vocab.size)
    split = load_split(directory / SPLIT_FILE) if (directory / SPLIT_FILE).exists() else None
    if split is not None and len(split) != len(documents):
        raise DataError(f"{directory / SPLIT_FILE} has {len(split)} entries for {len(documents)} documents")
    topics_path = directory / TOPICS_FILE
    topic_names = tuple(line.strip() for _, line in _content_lines(topics_path) if line.strip()) if topics_path.exists() else ()
    return Corpus.from_documents(vocab, documents, split, topic_names)


def read_labeled_directory(root: Path) -> Tuple[List[Tuple[str, int]], Tuple[str, ...]]:
    """
    Texts from a directory-per-class corpus (newsgroup folders, pos/neg)

    Returns:
        ([(text, class index)], class names in sorted order)
    """
    root = Path(root)
    classes = tuple(sorted(p.name for p in root.iterdir() if p.is_dir()))
    if not classes:
        raise DataError(f"{root} has no class subdirectories")
    texts = []
    for index, name in enumerate(classes):
        for path in sorted(p for p in (root / name).rglob("*") if p.is_file()):
            texts.append((path.read_text(encoding="utf-8", errors="replace"), index))
    return texts, classes


def read_review_file(path: Path) -> List[str]:
    """Review bodies from a multi-domain review file (<review_text> blocks)"""
    text = Path(path).read_text(encoding="utf-8", errors="replace")
    return [match.strip() for match in _REVIEW_TEXT.findall(text)]
