#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Serializers for result files and the run manifest.

A configured :class:`SerializerManager` is available as :data:`manager`
with ``json`` and ``csv`` registered. Every file is written through
:func:`~bispecar.util.atomic_writer`::

    write("json", {"schema_version": 1}, "out.json")
    frame = read("csv", "rates.csv")

"""


import datetime
import json
import logging
import os
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Sequence

import numpy as np
import pandas as pd

from bispecar.util import (
    ConfigError,
    atomic_writer,
    library_version,
    sha256_file,
    uninterruptible,
)

log = logging.getLogger(__name__)

#: Version of every JSON document this package writes
SCHEMA_VERSION = 1


class SerializerManager(object):
    """Contains registered serializers.

    Use :meth:`register()` to register new (or replace existing)
    serializers, which you can then look up by name.

    """

    def __init__(self) -> None:
        """Create new SerializerManager object."""
        self._serializers: Dict[str, Any] = {}

    def register(self, name: str, serializer: Any) -> None:
        """Register ``serializer`` object under ``name``.

        Raises :class:`AttributeError` if ``serializer`` in invalid.

        :param name: Name to register ``serializer`` under
        :param serializer: object with ``load()`` and ``dump()`` methods

        """
        # Basic validation
        serializer.load
        serializer.dump

        self._serializers[name] = serializer

    def serializer(self, name: str) -> Any:
        """Return serializer object for ``name`` or ``None``."""
        return self._serializers.get(name)

    def unregister(self, name: str) -> Any:
        """Remove and return registered serializer with ``name``.

        Raises a :class:`ValueError` if there is no such registered
        serializer.
        """
        if name not in self._serializers:
            raise ValueError("No such serializer registered : {0}".format(name))
        return self._serializers.pop(name)

    @property
    def serializers(self) -> List[str]:
        """Return names of registered serializers."""
        return sorted(self._serializers.keys())


class BaseSerializer(object):
    """File handling shared by the built-in serializers."""

    #: Extra keyword arguments for :func:`open`
    open_kwargs: Dict[str, Any] = {}

    @classmethod
    @contextmanager
    def atomic_writer(cls, path: str, mode: str = "w") -> Iterator[Any]:
        """Open ``path`` for writing via :func:`~bispecar.util.atomic_writer`."""
        with atomic_writer(path, mode, **cls.open_kwargs) as fp:
            yield fp

    @classmethod
    @contextmanager
    def open(cls, path: str, mode: str = "r") -> Iterator[Any]:
        """Open ``path`` with the serializer's settings."""
        with open(path, mode, **cls.open_kwargs) as fp:
            yield fp


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError("Object of type {} is not JSON serializable".format(type(obj)))


class JSONSerializer(BaseSerializer):
    """Wrapper around :mod:`json`. Sorts keys and sets ``indent``.

    numpy scalars and arrays are converted to plain JSON values.
    """

    open_kwargs = {"encoding": "utf-8"}

    @classmethod
    def load(cls, file_obj: Any) -> Any:
        """Load serialized object from open JSON file."""
        return json.load(file_obj)

    @classmethod
    def dump(cls, obj: Any, file_obj: Any) -> None:
        """Serialize object ``obj`` to open JSON file."""
        json.dump(obj, file_obj, sort_keys=True, indent=2, default=_json_default)
        file_obj.write("\n")


class CSVSerializer(BaseSerializer):
    """Wrapper around :mod:`pandas` CSV I/O. Headered, no index column."""

    open_kwargs = {"encoding": "utf-8", "newline": ""}

    #: Format of floating-point cells
    float_format = "%.12g"

    @classmethod
    def load(cls, file_obj: Any) -> pd.DataFrame:
        """Load :class:`pandas.DataFrame` from open CSV file."""
        return pd.read_csv(file_obj)

    @classmethod
    def dump(cls, obj: pd.DataFrame, file_obj: Any) -> None:
        """Serialize :class:`pandas.DataFrame` ``obj`` to open CSV file."""
        obj.to_csv(file_obj, index=False, float_format=cls.float_format)


# Set up default manager and register built-in serializers
manager = SerializerManager()
manager.register("json", JSONSerializer)
manager.register("csv", CSVSerializer)


def _lookup(name: str) -> Any:
    serializer = manager.serializer(name)
    if serializer is None:
        raise ConfigError("unknown serializer {!r}".format(name))
    return serializer


@uninterruptible
def write(name: str, obj: Any, path: str) -> str:
    """Serialize ``obj`` to ``path`` atomically with serializer ``name``."""
    serializer = _lookup(name)
    with serializer.atomic_writer(path, "w") as fp:
        serializer.dump(obj, fp)
    log.debug("wrote %s", path)
    return path


def read(name: str, path: str) -> Any:
    """Load ``path`` with serializer ``name``."""
    serializer = _lookup(name)
    with serializer.open(path, "r") as fp:
        return serializer.load(fp)


def manifest_path(primary: str) -> str:
    """Return the manifest path belonging to output ``primary``."""
    return primary + ".manifest.json"


class RunManifest(object):
    """Provenance record of one command invocation.

    Attributes:
        command (str): Subcommand name.
        flags (dict): Every parsed flag, defaults included.
        seed (int): Random seed, or ``None``.
        version (str): Library version.
        inputs (dict): Input path to SHA-256 digest.
        outputs (list): Paths of written artifacts.
        created (str): UTC timestamp (ISO 8601).

    """

    def __init__(
        self,
        command: str,
        flags: Dict[str, Any],
        seed: Optional[int] = None,
        inputs: Sequence[str] = (),
        version: Optional[str] = None,
    ) -> None:
        """Create manifest and hash ``inputs``."""
        self.command = command
        self.flags = dict(flags)
        self.seed = seed
        self.version = version or library_version()
        self.inputs = {os.path.abspath(p): sha256_file(p) for p in inputs}
        self.outputs: List[str] = []
        self.created = (
            datetime.datetime.now(datetime.timezone.utc)
            .replace(microsecond=0)
            .isoformat()
        )

    def add_output(self, path: str) -> str:
        """Record ``path`` as an output and return it."""
        self.outputs.append(os.path.abspath(path))
        return path

    def to_dict(self) -> Dict[str, Any]:
        """Return JSON-serializable representation."""
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "flags": self.flags,
            "seed": self.seed,
            "version": self.version,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "created": self.created,
        }

    def write(self, primary: str) -> str:
        """Write manifest next to output ``primary``; return its path."""
        path = manifest_path(primary)
        write("json", self.to_dict(), path)
        log.info("manifest: %s", path)
        return path
