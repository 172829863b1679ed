"""Clipped stochastic first-order methods under heavy-tailed gradient noise."""

from ._cliplab import *  # noqa: F401,F403
from ._cliplab import __doc__  # noqa: F401


def load_config(path, overrides=()):
    """Parse a config file; ``overrides`` are "section.key=value" strings."""
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read(), list(overrides))  # noqa: F405
