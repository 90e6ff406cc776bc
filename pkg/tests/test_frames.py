"""Frames: analysis/synthesis operators, bounds, duals, partial sums.

Frozen oracle: the family {e1, e1, e2} on A^2 has gram realization
diag(2, 1) per block, so its optimal bounds are exactly (1, 2).
"""

import numpy as np
import pytest

from conftest import random_element, random_frame, random_shape, random_vector
from cstarframes import (
    AlgebraElement,
    AlgebraShape,
    DegenerateFrameError,
    Frame,
    ModuleVector,
    inner_product,
    standard_basis_frame,
)

C2 = AlgebraShape((1, 1))
M2 = AlgebraShape((2,))


def test_standard_basis_analysis_is_identity(rng):
    shape = random_shape(rng)
    fr = standard_basis_frame(shape, 3)
    x = random_vector(shape, 3, rng)
    assert (fr.analysis_op(x) - x).norm() <= 1e-14


def test_scaled_singleton_gram():
    x = ModuleVector.basis(C2, 1, 0) * 2.0
    fr = Frame((x,))
    ident = AlgebraElement.identity(C2)
    gram_on_e = fr.gram_op(ModuleVector.basis(C2, 1, 0))
    assert (gram_on_e.coords[0] - ident * 4.0).norm() <= 1e-14
    assert fr.bounds == (pytest.approx(4.0, abs=1e-12), pytest.approx(4.0, abs=1e-12))


def test_repeated_basis_bounds_frozen():
    e1 = ModuleVector.basis(M2, 2, 0)
    e2 = ModuleVector.basis(M2, 2, 1)
    fr = Frame((e1, e1, e2))
    c1, c2 = fr.bounds
    assert c1 == pytest.approx(1.0, abs=1e-12)
    assert c2 == pytest.approx(2.0, abs=1e-12)


def test_analysis_preserves_gram_sum(rng):
    shape = random_shape(rng)
    fr = random_frame(shape, 2, 4, rng)
    x = random_vector(shape, 2, rng)
    lhs = inner_product(fr.analysis_op(x), fr.analysis_op(x))
    rhs = AlgebraElement.zero(shape)
    for v in fr.vectors:
        ip = inner_product(x, v)
        rhs = rhs + ip * ip.adjoint()
    assert (lhs - rhs).norm() <= 1e-10 * max(1.0, x.norm() ** 2)


def test_frame_inequality_element(rng):
    shape = random_shape(rng)
    fr = random_frame(shape, 2, 4, rng)
    c1, c2 = fr.bounds
    x = random_vector(shape, 2, rng)
    gram_sum = AlgebraElement.zero(shape)
    for v in fr.vectors:
        ip = inner_product(x, v)
        gram_sum = gram_sum + ip * ip.adjoint()
    xx = inner_product(x, x)
    scale = max(1.0, c2 * x.norm() ** 2)
    upper = xx * c2 - gram_sum
    lower = gram_sum - xx * c1
    assert upper.min_eigenvalue() >= -1e-8 * scale
    assert lower.min_eigenvalue() >= -1e-8 * scale


def test_parseval_dual_is_itself(rng):
    shape = random_shape(rng)
    fr = standard_basis_frame(shape, 3)
    for v, g in zip(fr.vectors, fr.canonical_dual()):
        assert (v - g).norm() <= 1e-13


def test_scaled_singleton_dual():
    fr = Frame((ModuleVector.basis(C2, 1, 0) * 2.0,))
    (g,) = fr.canonical_dual()
    assert (g - ModuleVector.basis(C2, 1, 0) * 0.5).norm() <= 1e-14


def test_random_reconstruction_residual(rng):
    for _ in range(10):
        shape = random_shape(rng)
        fr = random_frame(shape, 2, 5, rng)
        x = random_vector(shape, 2, rng)
        assert (x - fr.reconstruct(x)).norm() <= 1e-9 * max(1.0, x.norm())


def test_partial_sum_full_and_empty(rng):
    shape = random_shape(rng)
    fr = random_frame(shape, 2, 4, rng)
    full = fr.partial_sum_op(range(fr.size))
    x = random_vector(shape, 2, rng)
    assert (full(x) - x).norm() <= 1e-9 * max(1.0, x.norm())
    empty = fr.partial_sum_op(())
    assert empty.norm() == 0.0


def test_partial_sum_norm_bound(rng):
    for _ in range(5):
        shape = random_shape(rng)
        fr = random_frame(shape, 2, 5, rng)
        c1, c2 = fr.bounds
        indices = [i for i in range(fr.size) if rng.random() < 0.5]
        assert fr.partial_sum_op(indices).norm() <= c2 / c1 + 1e-8


def test_partial_sum_factored_route_agrees(rng):
    shape = random_shape(rng)
    fr = random_frame(shape, 2, 5, rng)
    indices = (0, 2, 3)
    direct = fr.partial_sum_op(indices)
    factored = fr.partial_sum_factored(indices)
    assert (direct - factored).norm() <= 1e-9 * max(1.0, direct.norm())


def test_tail_at_full_size_is_zero(rng):
    shape = random_shape(rng)
    fr = random_frame(shape, 2, 4, rng)
    x = random_vector(shape, 2, rng)
    assert fr.reconstruction_tail(x, fr.size) <= 1e-9 * max(1.0, x.norm())


def test_tail_matches_partial_sum_difference(rng):
    shape = random_shape(rng)
    fr = random_frame(shape, 2, 4, rng)
    x = random_vector(shape, 2, rng)
    for n in range(fr.size + 1):
        via_op = (x - fr.partial_sum_op(range(n))(x)).norm()
        assert fr.reconstruction_tail(x, n) == pytest.approx(via_op, abs=1e-11)


def test_degenerate_frame_rejected():
    with pytest.raises(DegenerateFrameError, match="eigenvalue"):
        Frame((ModuleVector.basis(C2, 2, 0),))


def test_range_frame_on_proper_submodule(rng):
    shape = random_shape(rng)
    x = random_vector(shape, 3, rng)
    fr = Frame((x,), spanning="range")
    c1, c2 = fr.bounds
    assert c1 > 0
    assert c2 >= c1
    z = x * random_element(shape, rng)
    assert (z - fr.reconstruct(z)).norm() <= 1e-9 * max(1.0, z.norm())


def test_range_frame_of_zero_vector_rejected(rng):
    shape = random_shape(rng)
    with pytest.raises(DegenerateFrameError):
        Frame((ModuleVector.zero(shape, 2),), spanning="range")


def test_bounds_are_attained(rng):
    """Optimality: some unit x pushes the gram action to each bound."""
    shape = random_shape(rng)
    fr = random_frame(shape, 2, 5, rng)
    c1, c2 = fr.bounds
    lo_seen = np.inf
    hi_seen = 0.0
    gram = fr.gram_op
    for _ in range(200):
        x = random_vector(shape, 2, rng)
        x = x / max(x.norm(), 1e-12)
        val = inner_product(x, gram(x)).norm()
        lo_seen = min(lo_seen, val)
        hi_seen = max(hi_seen, val)
    assert hi_seen <= c2 + 1e-8
    assert c1 <= lo_seen + c2  # sanity: c1 is a lower spectral point
    assert hi_seen >= 0.3 * c2  # random sampling should get within reach
