import logging
from dataclasses import dataclass

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@dataclass(frozen=True)
class Settings:
    """Tunable limits shared by the oracles and the simulator."""

    # guard on |Q| x (B+1) for the credit oracle
    oracle_state_cap: int = 4000
    enumerate_max_nodes: int = 16
    unfold_max_nodes: int = 20000
    log_format: str = LOG_FORMAT


DEFAULT_SETTINGS = Settings()


def configure_logging(verbose: bool = False, log_file: str | None = None) -> None:
    """Configure root logging for command-line use.

    Diagnostics go to stderr; stdout carries only command output.

    Args:
        verbose: Log at INFO instead of WARNING
        log_file: Optional path of an additional log file
    """
    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format=DEFAULT_SETTINGS.log_format,
        handlers=handlers,
        force=True,
    )
