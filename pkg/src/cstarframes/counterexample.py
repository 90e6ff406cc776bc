"""Truncated realization of the factorial-growth counterexample.

The algebra is the convergent sequences truncated at level N: N position
coordinates plus an explicit limit coordinate, so the model stays honest
to sequences-with-limit rather than sequences-vanishing-at-infinity.
Over A^M the diagonal operator F pinches coordinate k by the position
indicator delta_k.  Its unit-ball image is approximable from the single
generator v = sum (1/k!) e_k delta_k, but only with coefficients of norm
about k!, and every fixed-prefix reconstruction tail stays pinned at 1.
Positions are 1-based throughout: position k lives in algebra block k-1.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

from ._parallel import pmap
from .algebra import AlgebraElement, AlgebraShape
from .frames import standard_basis_frame
from .modules import ModuleOperator, ModuleVector, inner_product
from .seminorms import SampleSet


@functools.lru_cache(maxsize=4)
def _standard_frame(setting: "TruncatedCSetting"):
    # settings hash by identity; sweeping all prefixes of one setting
    # would otherwise rebuild the same frame dim times
    return standard_basis_frame(setting.shape, setting.dim)


@dataclass(frozen=True, eq=False)
class TruncatedCSetting:
    """Truncation data: sequence level, module dimension, F, and v.

    trunc is the last explicit sequence position (the algebra has
    trunc + 1 one-dimensional blocks, the final one being the limit
    coordinate, where every position indicator vanishes).  dim <= trunc
    so that every indicator the module needs exists.
    """

    trunc: int
    dim: int
    shape: AlgebraShape
    operator: ModuleOperator
    generator: ModuleVector

    def delta(self, k: int) -> AlgebraElement:
        """Indicator of sequence position k, 1 <= k <= trunc."""
        if not 1 <= k <= self.trunc:
            raise ValueError(f"position {k} outside 1..{self.trunc}")
        return AlgebraElement.block_unit(self.shape, k - 1)

    def basis_vector(self, k: int) -> ModuleVector:
        """Free-basis vector e_k of the module, 1 <= k <= dim."""
        if not 1 <= k <= self.dim:
            raise ValueError(f"basis index {k} outside 1..{self.dim}")
        return ModuleVector.basis(self.shape, self.dim, k - 1)

    def witness(self, k: int) -> ModuleVector:
        """The extreme image point e_k * delta_k = F(e_k)."""
        return self.basis_vector(k) * self.delta(k)

    def witnesses(self) -> tuple[ModuleVector, ...]:
        return tuple(self.witness(k) for k in range(1, self.dim + 1))


def build_setting(trunc: int, dim: int | None = None) -> TruncatedCSetting:
    """Construct the truncated counterexample; dim defaults to trunc.

    Verifies the two structural identities before returning: F fixes the
    generator v, and ||F|| <= 1 (the realized blocks are coordinate
    projections).
    """
    if trunc < 1:
        raise ValueError("truncation level must be at least 1")
    if dim is None:
        dim = trunc
    if not 1 <= dim <= trunc:
        raise ValueError(
            f"module dimension {dim} must satisfy 1 <= dim <= trunc={trunc}"
        )
    shape = AlgebraShape((1,) * (trunc + 1))
    zero = AlgebraElement.zero(shape)
    entries = tuple(
        tuple(
            AlgebraElement.block_unit(shape, i) if i == j else zero
            for j in range(dim)
        )
        for i in range(dim)
    )
    operator = ModuleOperator(shape, entries)
    coords = tuple(
        AlgebraElement.block_unit(shape, k - 1) * (1.0 / math.factorial(k))
        for k in range(1, dim + 1)
    )
    generator = ModuleVector(shape, coords)

    if (operator(generator) - generator).norm() > 1e-12:
        raise AssertionError("F does not fix the generator v")
    if operator.norm() > 1.0 + 1e-12:
        raise AssertionError("F is not a contraction")
    return TruncatedCSetting(trunc, dim, shape, operator, generator)


def _min_coeff_norm(setting: TruncatedCSetting, y: ModuleVector, eps: float) -> float:
    """Exact infimum of ||a|| over {a : ||y - v*a|| <= eps}.

    The algebra is commutative, so the solve decouples per block: with
    X_b, G_b the stacked realizations of y and v at block b, the minimal
    |a(b)| placing the residual on the eps boundary solves a real
    quadratic in |a(b)| after aligning the phase with G_b* X_b.  Blocks
    already within eps contribute 0; blocks where v vanishes but y does
    not are unreachable.
    """
    worst = 0.0
    for b in range(setting.shape.num_blocks):
        xb = y.realize_block(b).ravel()
        gb = setting.generator.realize_block(b).ravel()
        nx2 = float((xb.conj() * xb).sum().real)
        ng2 = float((gb.conj() * gb).sum().real)
        if nx2 <= eps * eps:
            continue
        if ng2 == 0.0:
            return math.inf
        cross = abs(complex((gb.conj() * xb).sum()))
        disc = cross * cross - ng2 * (nx2 - eps * eps)
        if disc < 0.0:
            return math.inf
        t = (cross - math.sqrt(disc)) / ng2
        worst = max(worst, t)
    return worst


def coeff_growth(setting: TruncatedCSetting, eps: float) -> list[tuple[int, float]]:
    """(k, required coefficient norm) for each witness e_k * delta_k.

    required = inf{||a|| : ||witness - v*a|| <= eps}, computed by the
    exact per-block boundary solve; it equals (1 - eps) * k! on these
    witnesses, which is the unbounded growth that kills any uniform
    coefficient bound across truncations.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")

    def row(k):
        return (k, _min_coeff_norm(setting, setting.witness(k), eps))

    return pmap(row, range(1, setting.dim + 1))


def tail_obstruction(setting: TruncatedCSetting, n: int, points=None) -> float:
    """Sup of the n-term reconstruction tail over the witness set.

    With the default witnesses this is exactly 1, achieved at
    e_{n+1} * delta_{n+1}: the standard basis reproduces it only by its
    own term, which every shorter prefix misses.  Pass explicit points
    (e.g. random ball images only) to see the strictly smaller bulk
    values.  Requires n < dim so the achieving witness exists.
    """
    if points is None:
        if not 0 <= n < setting.dim:
            raise ValueError(
                f"prefix {n} has no witness at module dimension {setting.dim}"
            )
        points = setting.witnesses()
    elif n < 0:
        raise ValueError("prefix must be non-negative")
    frame = _standard_frame(setting)

    def tail(x):
        kept = list(x.coords[:n]) + [
            AlgebraElement.zero(setting.shape) for _ in range(setting.dim - n)
        ]
        direct = (x - ModuleVector(setting.shape, tuple(kept))).norm()
        via_frame = frame.reconstruction_tail(x, n)
        if abs(direct - via_frame) > 1e-12:
            raise AssertionError(
                f"direct tail {direct!r} disagrees with frame tail {via_frame!r}"
            )
        return direct

    return max(pmap(tail, list(points)), default=0.0)


@dataclass(frozen=True)
class SingleGeneratorApprox:
    """Outcome of approximating y by v * a with the proof's prefix rule.

    coefficient realizes the best prefix; floor is the residual left at
    the full prefix, zero exactly when y has the range form (coordinate k
    supported on position k).
    """

    coefficient: AlgebraElement
    prefix: int
    residual: float
    floor: float
    achieved: bool
    residual_profile: tuple[float, ...]


def single_generator_approx(setting: TruncatedCSetting, y: ModuleVector, eps: float) -> SingleGeneratorApprox:
    """Approximate an image point from the single generator v.

    The prefix-K coefficient is a_K = sum_{k<=K} delta_k * y_k(k) * k!,
    which reproduces the diagonal part of the first K coordinates; K is
    the first prefix whose residual drops below eps.  If even the full
    prefix misses (y is not of F's range form), the floor residual is
    reported with achieved False.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if y.shape != setting.shape or y.dim != setting.dim:
        raise ValueError("point does not live in the setting's module")

    diagonal = [
        complex(y.coords[k - 1].blocks[k - 1][0, 0])
        for k in range(1, setting.dim + 1)
    ]

    def coefficient(prefix):
        a = AlgebraElement.zero(setting.shape)
        for k in range(1, prefix + 1):
            a = a + setting.delta(k) * (diagonal[k - 1] * math.factorial(k))
        return a

    profile = []
    best = None
    for prefix in range(setting.dim + 1):
        a = coefficient(prefix)
        residual = (y - setting.generator * a).norm()
        profile.append(residual)
        if best is None and residual < eps:
            best = (prefix, a, residual)
    floor = profile[-1]
    if best is not None:
        prefix, a, residual = best
        return SingleGeneratorApprox(a, prefix, residual, floor, True, tuple(profile))
    return SingleGeneratorApprox(
        coefficient(setting.dim), setting.dim, floor, floor, False, tuple(profile)
    )


def image_sample(
    setting: TruncatedCSetting,
    count: int = 16,
    seed: int = 0,
    include_witnesses: bool = True,
) -> SampleSet:
    """F applied to a seeded ball sample, the set whose compactness fails.

    The extreme points e_k * delta_k are included by default; they carry
    the whole obstruction.  With include_witnesses False only the random
    bulk is pushed through F, which is how one sees that random sampling
    alone misses the obstruction.
    """
    from .certify import BallSampler

    sampler = BallSampler(setting.shape, setting.dim, count=count, seed=seed)
    if include_witnesses:
        points = list(setting.witnesses())
        points.extend(setting.operator(p) for p in sampler.draw())
    else:
        points = [setting.operator(p) for p in sampler.bulk()]
    return SampleSet(tuple(points), label=f"F-ball-image-{setting.trunc}-{setting.dim}")
