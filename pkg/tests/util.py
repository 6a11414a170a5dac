#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Stuff used in multiple tests."""


import math
import os

import numpy as np

DEFAULT_SETTINGS = {
    "key1": "value1",
    "key2": "hübner",
    "mutable1": ["mutable", "object"],
    "mutable2": {"mutable": ["nested", "object"]},
}


def direct_dft(y):
    """O(T^2) DFT by the defining sum."""
    y = np.asarray(y, dtype=float)
    T = y.size
    t = np.arange(T)
    return np.array(
        [np.sum(y * np.exp(-1j * t * 2.0 * math.pi * j / T)) for j in range(T)]
    )


def random_lag_coeffs(rng, order, min_modulus=1.2, max_modulus=4.0):
    """Coefficients of a stationary lag polynomial with random roots.

    Roots are real or come in conjugate pairs, with moduli in
    ``[min_modulus, max_modulus]``.
    """
    roots = []
    while len(roots) < order:
        mod = rng.uniform(min_modulus, max_modulus)
        if order - len(roots) >= 2 and rng.random() < 0.5:
            angle = rng.uniform(0.2, math.pi - 0.2)
            z = mod * complex(math.cos(angle), math.sin(angle))
            roots.extend([z, z.conjugate()])
        else:
            roots.append(mod * rng.choice([-1.0, 1.0]))
    poly = np.poly(1.0 / np.array(roots, dtype=complex)).real
    return -poly[1:]


def write_csv(path, header, rows):
    """Write ``rows`` under ``header`` to ``path`` and return the path."""
    with open(path, "w") as fp:
        fp.write(",".join(header) + "\n")
        for row in rows:
            fp.write(",".join(str(v) for v in row) + "\n")
    return path


def monthly_dates(n, start_year=1990):
    """Return ``n`` ISO month-start dates."""
    return [
        "{:04d}-{:02d}-01".format(start_year + i // 12, i % 12 + 1) for i in range(n)
    ]


def listdir(path):
    """Sorted directory listing."""
    return sorted(os.listdir(path))
