#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Logging setup and JSON configuration files."""


import json
import logging
import logging.handlers
import os
from typing import Any, Dict, Optional

from bispecar.util import ConfigError, atomic_writer, uninterruptible

log = logging.getLogger(__name__)

#: Environment variable holding the log level
LOG_LEVEL_ENV = "BISPECAR_LOG_LEVEL"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

LOG_FORMAT = "%(asctime)s %(filename)s:%(lineno)s %(levelname)-8s %(message)s"
LOG_DATEFMT = "%H:%M:%S"

#: Defaults of a Monte Carlo configuration file
MC_DEFAULTS: Dict[str, Any] = {
    "alpha": [1.5, 1.8],
    "beta": 0.25,
    "gamma": 1.0,
    "delta": 0.0,
    "T": [100, 200, 500],
    "M": 1000,
    "seed": 0,
    "p": 2,
    "m": 0.5,
    "start": "roots",
    "threads": None,
}


def log_level() -> int:
    """Return level named by ``BISPECAR_LOG_LEVEL`` (``INFO`` by default)."""
    name = os.getenv(LOG_LEVEL_ENV, "INFO").strip().upper()
    if name not in LOG_LEVELS:
        log.warning("unknown %s %r, using INFO", LOG_LEVEL_ENV, name)
        return logging.INFO
    return getattr(logging, name)


def setup_logging(logfile: Optional[str] = None) -> logging.Logger:
    """Configure the ``bispecar`` logger for console and optional file output.

    Calling this again does not add duplicate handlers; a new
    ``logfile`` is attached alongside the existing handlers.

    :param logfile: path of a rotating log file (1 MiB, one backup)
    :returns: the configured :class:`~logging.Logger`

    """
    logger = logging.getLogger("bispecar")
    fmt = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT)

    if not any(getattr(h, "_bispecar_console", False) for h in logger.handlers):
        console = logging.StreamHandler()
        console.setFormatter(fmt)
        console._bispecar_console = True  # type: ignore[attr-defined]
        logger.addHandler(console)

    if logfile:
        path = os.path.abspath(logfile)
        have = [getattr(h, "baseFilename", None) for h in logger.handlers]
        if path not in have:
            handler = logging.handlers.RotatingFileHandler(
                path, maxBytes=1024 * 1024, backupCount=1
            )
            handler.setFormatter(fmt)
            logger.addHandler(handler)

    logger.setLevel(log_level())
    return logger


class Settings(dict):
    """A dictionary loaded from a JSON file and completed from defaults.

    Unlike a plain :func:`json.load`, missing keys are filled from
    ``defaults`` and the result can be written back atomically with
    :meth:`save`. Loading never modifies the file.

    :param filepath: path of the JSON file
    :type filepath: :class:`str`
    :param defaults: default values for missing keys
    :type defaults: :class:`dict`

    """

    def __init__(self, filepath: str, defaults: Optional[Dict[str, Any]] = None) -> None:
        """Create new :class:`Settings` object."""
        super(Settings, self).__init__()
        self._filepath = filepath
        if defaults:
            self.update(defaults)
        if os.path.exists(filepath):
            self.update(self._load())

    @property
    def filepath(self) -> str:
        """Path of the backing JSON file."""
        return self._filepath

    def _load(self) -> Dict[str, Any]:
        try:
            with open(self._filepath, "r") as fp:
                data = json.load(fp)
        except ValueError as err:
            raise ConfigError("invalid JSON in {}: {}".format(self._filepath, err))
        if not isinstance(data, dict):
            raise ConfigError("{} must hold a JSON object".format(self._filepath))
        log.debug("read settings from %s", self._filepath)
        return data

    @uninterruptible
    def save(self) -> None:
        """Write settings to :attr:`filepath` (sorted keys, indent 2)."""
        with atomic_writer(self._filepath, "w") as fp:
            json.dump(dict(self), fp, sort_keys=True, indent=2)
