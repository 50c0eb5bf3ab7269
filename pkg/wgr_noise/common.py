"""
Shared helpers: component loggers and environment defaults.
"""

import logging
import os

from dotenv import load_dotenv

ENV_MATERIAL = "WGR_NOISE_MATERIAL"
ENV_THREADS = "WGR_NOISE_THREADS"
ENV_LOG_LEVEL = "WGR_NOISE_LOG_LEVEL"

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


class ComponentLogger(logging.LoggerAdapter):
    """
    Logger bound to a named component, prefixing every record with the component name.
    """

    def __init__(self, component: str):
        super().__init__(logging.getLogger(f"wgr_noise.{component}"), {"component": component})
        self.component = component

    def process(self, msg, kwargs):
        return f"[{self.component}] {msg}", kwargs


def configure_logging(level: str | None = None) -> None:
    """
    Configure the root handler once for command-line use.

    Parameters
    ----------
    level : str, optional
        Logging level name. If None, sources ``WGR_NOISE_LOG_LEVEL`` and falls back to INFO.

    """
    level = (level or os.getenv(ENV_LOG_LEVEL) or "INFO").upper()
    logging.basicConfig(level=level, format=LOG_FORMAT)
    # numba's compiler logs are noise at DEBUG
    logging.getLogger("numba").setLevel(logging.WARNING)


def load_environment(dotenv_path: str | None = None) -> dict[str, str | None]:
    """
    Load ``.env`` (if present) and return the environment defaults this package reads.
    Values already present in the process environment are not overridden.
    """
    load_dotenv(dotenv_path=dotenv_path, override=False)
    return {
        "material": os.getenv(ENV_MATERIAL),
        "threads": os.getenv(ENV_THREADS),
        "log_level": os.getenv(ENV_LOG_LEVEL),
    }
