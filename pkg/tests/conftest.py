"""Shared generators for the test suite.

Everything is seeded through numpy Generators passed explicitly, so any
test can be replayed from its seed alone.  Frames produced here are
generic (full realized rank) unless a test asks for a degenerate one.
"""

import numpy as np
import pytest

from cstarframes import (
    AlgebraElement,
    AlgebraShape,
    Frame,
    ModuleVector,
    SampleSet,
    State,
)


def random_shape(rng, max_blocks=3):
    """Shape mixing 1x1 and 2x2 blocks, at least one block."""
    count = int(rng.integers(1, max_blocks + 1))
    dims = tuple(int(rng.choice([1, 2])) for _ in range(count))
    return AlgebraShape(dims)


def random_element(shape, rng, scale=1.0):
    blocks = tuple(
        scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        for n in shape.block_dims
    )
    return AlgebraElement(shape, blocks)


def random_selfadjoint(shape, rng, scale=1.0):
    a = random_element(shape, rng, scale)
    return (a + a.adjoint()) * 0.5


def random_positive(shape, rng, scale=1.0):
    a = random_element(shape, rng, scale)
    return a.adjoint() * a


def random_vector(shape, dim, rng, scale=1.0):
    return ModuleVector(
        shape, tuple(random_element(shape, rng, scale) for _ in range(dim))
    )


def random_unit_vector(shape, dim, rng):
    x = random_vector(shape, dim, rng)
    return x / max(x.norm(), 1e-12)


def random_frame(shape, dim, size, rng):
    """Generic ambient frame; retries the negligible degenerate draws."""
    assert size >= dim, "ambient frames need at least dim vectors"
    for _ in range(20):
        try:
            return Frame(tuple(random_vector(shape, dim, rng) for _ in range(size)))
        except ValueError:
            continue
    raise RuntimeError("could not draw a non-degenerate frame")


def random_state(shape, rng):
    densities = []
    for n in shape.block_dims:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        densities.append(a @ a.conj().T + 1e-3 * np.eye(n))
    total = sum(np.trace(d).real for d in densities)
    return State(shape, tuple(d / total for d in densities))


def prefix_supported_vector(shape, dim, prefix, rng, scale=1.0):
    """Random vector supported on the first `prefix` coordinates."""
    coords = [
        random_element(shape, rng, scale) if i < prefix else AlgebraElement.zero(shape)
        for i in range(dim)
    ]
    return ModuleVector(shape, tuple(coords))


def planted_precompact_sample(shape, dim, prefix, count, rng, scale=0.4):
    """Sample whose coordinates die after `prefix`: tails vanish early."""
    points = tuple(
        prefix_supported_vector(shape, dim, prefix, rng, scale) for _ in range(count)
    )
    return SampleSet(points, label="planted-precompact")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
