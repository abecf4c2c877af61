"""
Logging setup
"""
import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """Configure the root logger once for a CLI run."""
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, force=True)


def log_resolved_config(logger: logging.Logger, config: dict) -> None:
    """Log a resolved run configuration verbatim, one key per line."""
    logger.info("=== RESOLVED CONFIG ===")
    for key in sorted(config):
        logger.info("  %s=%s", key, config[key])
