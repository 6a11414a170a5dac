#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Error hierarchy and file helpers shared by the whole package."""


import functools
import hashlib
import math
import os
import signal
import sys
import threading
from contextlib import contextmanager
from typing import Any, Callable, Iterator, Optional


class BispecarError(Exception):
    """Base class for all errors raised by :mod:`bispecar`.

    Every subclass carries an ``exit_code`` that :mod:`bispecar.cli`
    returns when the error aborts a command.
    """

    exit_code = 1


class DataError(BispecarError):
    """Raised when input data are unusable (non-finite, too short, malformed)."""

    exit_code = 3


class DegenerateError(DataError):
    """Raised if a series has zero variance."""


class ModelError(BispecarError):
    """Raised when a model specification is structurally invalid."""

    exit_code = 4


class DomainError(BispecarError):
    """Raised when a model is evaluated outside its domain (e.g. at a pole)."""

    exit_code = 5


class EstimationError(BispecarError):
    """Raised when estimation cannot produce a usable result."""

    exit_code = 6


class ConfigError(BispecarError):
    """Raised if a configuration file or flag combination is invalid."""

    exit_code = 7


@contextmanager
def atomic_writer(fpath: str, mode: str = "w", **kwargs: Any) -> Iterator[Any]:
    """Atomic file writer.

    Context manager that ensures the file is only written if the write
    succeeds. The data is first written to a temporary file alongside
    ``fpath`` and renamed over it when the block exits cleanly.

    :param fpath: path of file to write to.
    :type fpath: ``str``
    :param mode: same as for :func:`open`
    :type mode: ``str``
    :param kwargs: passed through to :func:`open` (``newline``, ``encoding``)

    """
    suffix = ".{}.{}.tmp".format(os.getpid(), threading.get_ident())
    temppath = fpath + suffix
    with open(temppath, mode, **kwargs) as fp:
        try:
            yield fp
            fp.flush()
            os.replace(temppath, fpath)
        finally:
            try:
                os.remove(temppath)
            except OSError:
                pass


class uninterruptible(object):
    """Decorator that postpones SIGTERM until wrapped function returns.

    Wrap functions that write artifacts to disk. If the process is told
    to terminate while one runs, the signal is handled after the write
    has finished, so no half-written result files are left behind.

    Signal handlers can only be installed from the main thread; called
    from any other thread the wrapped function simply runs.

    """

    def __init__(self, func: Callable) -> None:
        """Decorate `func`."""
        self.func = func
        functools.update_wrapper(self, func)
        self._caught_signal: Optional[tuple] = None

    def signal_handler(self, signum: int, frame: Any) -> None:
        """Called when process receives SIGTERM."""
        self._caught_signal = (signum, frame)

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        """Trap ``SIGTERM`` and call wrapped function."""
        if threading.current_thread() is not threading.main_thread():
            return self.func(*args, **kwargs)

        self._caught_signal = None
        old_signal_handler = signal.getsignal(signal.SIGTERM)
        signal.signal(signal.SIGTERM, self.signal_handler)

        try:
            return self.func(*args, **kwargs)
        finally:
            signal.signal(signal.SIGTERM, old_signal_handler)

            if self._caught_signal is not None:
                signum, frame = self._caught_signal
                if callable(old_signal_handler):
                    old_signal_handler(signum, frame)
                elif old_signal_handler == signal.SIG_DFL:
                    sys.exit(0)

    def __get__(self, obj: Any = None, klass: Any = None) -> "uninterruptible":
        """Decorator API."""
        return self.__class__(self.func.__get__(obj, klass))


def json_float(value: Optional[float]) -> Optional[float]:
    """Return ``value`` as a float, or ``None`` if it is missing or not finite.

    JSON has no literal for infinity or NaN.
    """
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def sha256_file(path: str, blocksize: int = 65536) -> str:
    """Return hex SHA-256 digest of the file at ``path``."""
    h = hashlib.sha256()
    with open(path, "rb") as fp:
        for block in iter(lambda: fp.read(blocksize), b""):
            h.update(block)
    return h.hexdigest()


def resolve_threads(threads: Optional[int]) -> int:
    """Return worker count to use; ``None`` or ``0`` means all cores."""
    if not threads:
        return os.cpu_count() or 1
    if threads < 0:
        raise ConfigError("thread count must be positive: {}".format(threads))
    return threads


@functools.lru_cache(maxsize=1)
def library_version() -> str:
    """Return the version in the ``version`` file shipped with the package."""
    filepath = os.path.join(os.path.dirname(__file__), "version")
    with open(filepath, "r") as fileobj:
        return fileobj.read().strip()
