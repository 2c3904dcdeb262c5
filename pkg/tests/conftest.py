"""Shared fixtures and independent oracles for the test suite.

The Christoffel oracle here deliberately reimplements the symmetric
difference with plain loops, Richardson extrapolation and a halved base
step, so it shares no code path with the package's einsum/stencil
machinery.
"""

import numpy as np
import pytest

from npp3.catalog import (
    elliptic,
    flat_b0nonzero,
    flat_b0zero,
    round_sphere,
    standard_flat,
)
from npp3.tensor import MetricField


def oracle_christoffel(matrix_fn, p, h=1e-4):
    """Independent Christoffel computation: loops, halved step, Richardson."""
    p = np.asarray(p, dtype=float)

    def partial(i, hh):
        e = np.zeros(3)
        e[i] = hh
        return (np.asarray(matrix_fn(p + e)) - np.asarray(matrix_fn(p - e))) / (2 * hh)

    dg = np.empty((3, 3, 3))
    for i in range(3):
        coarse = partial(i, h)
        fine = partial(i, 0.5 * h)
        dg[i] = (4.0 * fine - coarse) / 3.0

    ginv = np.linalg.inv(np.asarray(matrix_fn(p), dtype=float))
    gamma = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                total = 0.0
                for l in range(3):
                    total += ginv[i, l] * (dg[j][l, k] + dg[k][l, j] - dg[l][j, k])
                gamma[i, j, k] = 0.5 * total
    return gamma


def random_perturbed_metric(rng, scale=0.05):
    """delta_ij plus a small random cubic-polynomial symmetric perturbation."""
    exps = [(i, j, k) for i in range(4) for j in range(4) for k in range(4) if i + j + k <= 3]
    coefs = rng.uniform(-1.0, 1.0, size=(6, len(exps)))

    def matrix(p):
        x, y, z = p
        mono = np.array([x**i * y**j * z**k for (i, j, k) in exps])
        m = np.zeros((3, 3))
        it = 0
        for a in range(3):
            for b in range(a, 3):
                m[a, b] = m[b, a] = scale * float(coefs[it] @ mono)
                it += 1
        return np.eye(3) + m

    return MetricField(matrix=matrix, name="perturbed")


def random_unit_candidate(rng):
    base = rng.normal(size=3)
    base /= np.linalg.norm(base)

    def candidate(p):
        return base + 0.1 * np.array([np.sin(p[1]), p[2], p[0] * p[1]])

    return candidate


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def examples():
    return {
        "standard-flat": standard_flat(1.0),
        "round-sphere": round_sphere(1.0),
        "flat-b0zero": flat_b0zero(1.0, (0.0, 1.0)),
        "flat-b0nonzero": flat_b0nonzero(1.0, (1.0,), (0.0, 1.0)),
        "elliptic": elliptic(1.0, (0.0,)),
    }


@pytest.fixture(scope="session")
def spot_points(examples):
    """A few admissible points per example, fixed by the session seed."""
    gen = np.random.default_rng(7)
    return {name: ex.sample_points(4, gen) for name, ex in examples.items()}
