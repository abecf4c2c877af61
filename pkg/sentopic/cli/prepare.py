"""
Dataset preparation commands
"""
import logging
from pathlib import Path

import click

from sentopic.cli.common import resolve_seed, resolved_config, seed_option
from sentopic.schemas.corpus import TEST, TRAIN, Corpus, PreprocessConfig, SynthSpec
from sentopic.services.corpus_io import (
    load_corpus,
    load_vocabulary,
    read_labeled_directory,
    read_review_file,
    save_corpus,
)
from sentopic.services.dataset_service import (
    build_mrmds,
    corpus_statistics,
    derive_sentiment_tags,
    drop_empty,
    stratified_split,
    synth_corpus,
    synth_lexicon,
)
from sentopic.services.text_service import (
    build_vocabulary,
    lexicon_from_clues,
    load_lexicon,
    preprocess,
    save_lexicon,
    stem_lexicon,
    vectorize,
)

logger = logging.getLogger(__name__)

LEXICON_FILE = "lexicon.txt"


def _report(corpus: Corpus) -> None:
    stats = corpus_statistics(corpus)
    click.echo(
        f"K={stats.vocabulary_size} train={stats.n_train} test={stats.n_test} "
        f"mean_length={stats.mean_length:.2f} std_length={stats.std_length:.2f}"
    )


@click.group()
def prepare():
    """Build dataset directories (vocab.txt, documents.txt, split.txt)."""


@prepare.command()
@click.option("--k", "vocab_size", type=click.IntRange(min=1), default=50, show_default=True, help="Vocabulary size")
@click.option("--docs", type=click.IntRange(min=2), default=200, show_default=True, help="Total documents")
@click.option("--topics", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--sentiments", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--min-length", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("--max-length", type=click.IntRange(min=1), default=40, show_default=True)
@click.option("--sentiment-skew", type=float, default=2.0, show_default=True)
@click.option("--topic-skew", type=float, default=2.0, show_default=True)
@click.option("--sentiment-fraction", type=float, default=0.2, show_default=True,
              help="Share of the vocabulary carrying sentiment")
@click.option("--lexicon-coverage", type=float, default=0.5, show_default=True)
@click.option("--train-fraction", type=float, default=0.5, show_default=True)
@seed_option
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True, help="Dataset directory")
@click.pass_context
def synth(ctx, vocab_size, docs, topics, sentiments, min_length, max_length, sentiment_skew, topic_skew,
          sentiment_fraction, lexicon_coverage, train_fraction, seed, out):
    """Sample a synthetic sentiment/topic corpus and its lexicon."""
    seed = resolve_seed(ctx, seed)
    if docs % sentiments:
        raise click.BadParameter(f"{docs} documents cannot be split evenly over {sentiments} sentiments", param_hint="--docs")
    config = resolved_config(ctx, seed=seed)
    spec = SynthSpec(
        vocab_size=vocab_size,
        n_sentiments=sentiments,
        n_topics=topics,
        docs_per_class=docs // sentiments,
        min_length=min_length,
        max_length=max_length,
        sentiment_skew=sentiment_skew,
        topic_skew=topic_skew,
        sentiment_word_fraction=sentiment_fraction,
        lexicon_coverage=lexicon_coverage,
        train_fraction=train_fraction,
    )
    corpus = synth_corpus(spec, seed)
    save_corpus(corpus, out, config.header_lines())
    save_lexicon(synth_lexicon(spec), out / LEXICON_FILE, config.header_lines())
    _report(corpus)


@prepare.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--format", "input_format", type=click.Choice(["directory", "reviews"]), default="directory",
              show_default=True, help="directory: one subdirectory per class; reviews: one review file per class")
@click.option("--label-kind", type=click.Choice(["topic", "sentiment"]), default="topic", show_default=True,
              help="What the class index labels")
@click.option("--test-input", multiple=True, type=click.Path(exists=True, path_type=Path),
              help="Held-out inputs with the same classes, assigned to test")
@click.option("--max-vocab", type=click.IntRange(min=1), default=2000, show_default=True)
@click.option("--vocab", "vocab_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="External dictionary to use instead of building one")
@click.option("--split-per-class", type=click.IntRange(min=1), default=None,
              help="Stratified split: this many training documents per class")
@click.option("--stemmer", type=click.Choice(["porter", "snowball", "none"]), default="porter", show_default=True)
@click.option("--lemmatize/--no-lemmatize", default=False, show_default=True)
@seed_option
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def raw(ctx, inputs, input_format, label_kind, test_input, max_vocab, vocab_path, split_per_class, stemmer,
        lemmatize, seed, out):
    """
    Preprocess raw text into a dataset.

    With --format reviews, the class index of each file is its position
    among the inputs.
    """
    seed = resolve_seed(ctx, seed)
    config = resolved_config(ctx, seed=seed)
    preprocess_config = PreprocessConfig(stemmer=stemmer, lemmatize=lemmatize)

    def read(paths):
        if input_format == "directory":
            texts, names = [], ()
            for path in paths:
                found, names = read_labeled_directory(path)
                texts.extend(found)
            return texts, names
        texts = [(text, index) for index, path in enumerate(paths) for text in read_review_file(path)]
        return texts, tuple(path.stem for path in paths)

    train_texts, class_names = read(inputs)
    test_texts, _ = read(test_input) if test_input else ([], ())
    train_tokens = [preprocess(text, preprocess_config) for text, _ in train_texts]
    test_tokens = [preprocess(text, preprocess_config) for text, _ in test_texts]
    vocab = load_vocabulary(vocab_path) if vocab_path else build_vocabulary(train_tokens, max_vocab)

    def label(index):
        return {"sentiment": index} if label_kind == "sentiment" else {"topic": index}

    documents = [vectorize(tokens, vocab, **label(index)) for tokens, (_, index) in zip(train_tokens, train_texts)]
    documents += [vectorize(tokens, vocab, **label(index)) for tokens, (_, index) in zip(test_tokens, test_texts)]
    split = [TRAIN] * len(train_texts) + [TEST] * len(test_texts)
    if split_per_class is not None:
        key = (lambda doc: doc.sentiment) if label_kind == "sentiment" else (lambda doc: doc.topic)
        split = stratified_split(documents, split_per_class, seed, key=key)
    corpus = Corpus.from_documents(
        vocab,
        documents,
        split,
        topic_names=class_names if label_kind == "topic" else (),
    )
    corpus = drop_empty(corpus)
    save_corpus(corpus, out, config.header_lines())
    _report(corpus)


@prepare.command()
@click.option("--dataset", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def tag(ctx, dataset, lexicon_path, out):
    """Label documents by lexicon word majority; ties are dropped."""
    config = resolved_config(ctx)
    corpus = derive_sentiment_tags(load_corpus(dataset), load_lexicon(lexicon_path))
    save_corpus(corpus, out, config.header_lines())
    _report(corpus)


@prepare.command()
@click.option("--mr", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True,
              help="Prepared movie review dataset")
@click.option("--mds", multiple=True, type=click.Path(exists=True, file_okay=False, path_type=Path), required=True,
              help="Prepared book, dvd, electronics and kitchen datasets, in that order")
@click.option("--vocab", "vocab_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--per-class", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--train-per-class", type=click.IntRange(min=0), default=750, show_default=True)
@seed_option
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_context
def merge(ctx, mr, mds, vocab_path, per_class, train_per_class, seed, out):
    """Merge the movie and product review datasets into one five-topic corpus."""
    seed = resolve_seed(ctx, seed)
    config = resolved_config(ctx, seed=seed)
    vocab = load_vocabulary(vocab_path)
    parts = [load_corpus(path, vocab_path) for path in mds]
    corpus = build_mrmds(load_corpus(mr, vocab_path), parts, vocab, seed, per_class, train_per_class)
    save_corpus(corpus, out, config.header_lines())
    _report(corpus)


@prepare.command()
@click.option("--clues", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True,
              help="Subjectivity clue file (word1=... priorpolarity=...)")
@click.option("--stemmer", type=click.Choice(["porter", "snowball", "none"]), default="none", show_default=True,
              help="Stem lexicon words to match a stemmed vocabulary")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_context
def lexicon(ctx, clues, stemmer, out):
    """Convert subjectivity clues into a three-weight lexicon."""
    config = resolved_config(ctx)
    converted = lexicon_from_clues(clues)
    if stemmer != "none":
        converted = stem_lexicon(converted, stemmer)
    save_lexicon(converted, out, config.header_lines())
    click.echo(f"{len(converted)} words: {converted.positive_count} positive, {converted.negative_count} negative")
