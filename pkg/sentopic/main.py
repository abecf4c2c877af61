"""
Command-line entry point

Command groups live in their own modules under sentopic.cli and are
attached to the root group here.
"""
import logging
import sys

import click
from pydantic import ValidationError

from sentopic import __version__
from sentopic.cli import evaluate, prepare, train
from sentopic.core.config import RunConfig, get_settings
from sentopic.core.errors import NumericalInstabilityError, SentopicError
from sentopic.core.logging import configure_logging

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2


def _nested_defaults(command: click.Command, values: dict) -> dict:
    """The flat config for this command and, recursively, for every subcommand"""
    defaults = dict(values)
    if isinstance(command, click.Group):
        for name, sub in command.commands.items():
            defaults[name] = _nested_defaults(sub, values)
    return defaults


class SentopicGroup(click.Group):
    """Root group mapping errors to exit codes: 1 usage, 2 data, 3 numeric."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
            code = result if isinstance(result, int) else 0
        except click.UsageError as exc:
            exc.show()
            code = EXIT_USAGE
        except click.ClickException as exc:
            exc.show()
            code = exc.exit_code
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_USAGE
        except NumericalInstabilityError as exc:
            logger.error("Numerical failure in block %s at update %s", exc.block, exc.update)
            click.echo(f"Error: {exc}", err=True)
            code = exc.exit_code
        except SentopicError as exc:
            click.echo(f"Error: {exc}", err=True)
            code = exc.exit_code
        except ValidationError as exc:
            click.echo(f"Error: invalid value\n{exc}", err=True)
            code = EXIT_DATA
        except (FileNotFoundError, IsADirectoryError) as exc:
            click.echo(f"Error: {exc}", err=True)
            code = EXIT_USAGE
        if not standalone_mode:
            return code
        sys.exit(code)


@click.group(cls=SentopicGroup)
@click.version_option(__version__, prog_name="sentopic")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Flat key=value file; keys are option names")
@click.option("--log-level", default=None, help="Logging level (SENTOPIC_LOG_LEVEL)")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Cap on evaluation fan-out (SENTOPIC_THREADS)")
@click.pass_context
def cli(ctx, config_path, log_level, threads):
    """Sentiment-augmented Replicated Softmax topic models."""
    settings = get_settings()
    values = RunConfig.from_file(config_path).values if config_path else {}
    log_level = log_level or values.get("log_level") or settings.log_level
    threads = threads or int(values.get("threads") or settings.threads)
    configure_logging(log_level)
    ctx.default_map = _nested_defaults(ctx.command, values)
    ctx.obj = {"settings": settings, "threads": threads, "config_path": config_path}


cli.add_command(prepare.prepare)
cli.add_command(train.train)
cli.add_command(evaluate.evaluate)


if __name__ == "__main__":
    cli()
