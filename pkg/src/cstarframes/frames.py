"""Standard frames on A^n: frame operator, optimal bounds, canonical dual.

A family {x_j} is a frame when c1 <x,x> <= sum_j <x,x_j><x_j,x> <= c2 <x,x>
for some c1 > 0.  With S = Theta* Theta realized blockwise, the operator
inequalities are spectral containments, so the optimal constants are the
extreme eigenvalues of the realization and the canonical dual is
g_j = S^(-1) x_j, computed by one Hermitian solve per block.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, AlgebraShape
from .modules import (
    ModuleOperator,
    ModuleVector,
    inner_product,
    theta_op,
    vector_from_realizations,
)


class DegenerateFrameError(ValueError):
    """Family whose smallest gram eigenvalue vanishes: not a frame."""


def _operator_from_block_matrices(
    shape: AlgebraShape, target_dim: int, source_dim: int, mats: list[np.ndarray]
) -> ModuleOperator:
    rows = []
    for i in range(target_dim):
        row = []
        for j in range(source_dim):
            blocks = tuple(
                mats[k][i * n_k : (i + 1) * n_k, j * n_k : (j + 1) * n_k]
                for k, n_k in enumerate(shape.block_dims)
            )
            row.append(AlgebraElement(shape, blocks))
        rows.append(tuple(row))
    return ModuleOperator(shape, tuple(rows))


class Frame:
    """Finite frame with cached analysis operator, bounds, and dual.

    spanning="ambient" (default) demands a frame for the whole module and
    rejects degenerate families.  spanning="range" accepts families that
    only span a submodule: bounds come from the nonzero gram spectrum and
    the dual uses the pseudo-inverse, so reconstruction reproduces the
    projection onto the family's span.  Construction freezes every cache;
    instances are read-only afterwards.
    """

    def __init__(self, vectors, spanning: str = "ambient", tol: float = 1e-10):
        vectors = tuple(vectors)
        if not vectors:
            raise ValueError("a frame needs at least one vector")
        if spanning not in ("ambient", "range"):
            raise ValueError(f"unknown spanning mode {spanning!r}")
        first = vectors[0]
        for v in vectors:
            first._require_compatible(v)
        self._vectors = vectors
        self._spanning = spanning
        self._shape = first.shape
        self._dim = first.dim

        # Theta(x) = (<x_j, x>)_j, so the matrix row j holds the adjoints
        # of the coordinates of x_j.
        self._theta = ModuleOperator(
            self._shape,
            tuple(
                tuple(c.adjoint() for c in v.coords) for v in vectors
            ),
        )
        self._theta_star = self._theta.adjoint()
        self._gram = self._theta_star @ self._theta

        eigensystems = []
        lo, hi = np.inf, 0.0
        for k in range(self._shape.num_blocks):
            sk = self._gram.realize_block(k)
            w, u = np.linalg.eigh((sk + sk.conj().T) / 2.0)
            eigensystems.append((w, u))
            lo = min(lo, float(w.min()))
            hi = max(hi, float(w.max()))
        cut = tol * max(hi, 1.0)
        if spanning == "ambient":
            if lo <= cut:
                raise DegenerateFrameError(
                    f"smallest gram eigenvalue {lo:.3e} is below tolerance; "
                    "the family does not span the module"
                )
            c1 = lo
        else:
            positive = [
                float(w[w > cut].min()) for w, _ in eigensystems if (w > cut).any()
            ]
            if not positive:
                raise DegenerateFrameError("the family consists of zero vectors")
            c1 = min(positive)
        self._bounds = (c1, hi)

        inv_blocks = []
        for w, u in eigensystems:
            inv_w = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
            inv_blocks.append((u * inv_w) @ u.conj().T)
        self._gram_inv_blocks = inv_blocks
        dual = []
        for v in vectors:
            mats = [
                inv_blocks[k] @ v.realize_block(k)
                for k in range(self._shape.num_blocks)
            ]
            dual.append(vector_from_realizations(self._shape, self._dim, mats))
        self._dual = tuple(dual)

    # -- basic accessors --------------------------------------------------

    @property
    def vectors(self) -> tuple[ModuleVector, ...]:
        return self._vectors

    @property
    def spanning(self) -> str:
        return self._spanning

    @property
    def shape(self) -> AlgebraShape:
        return self._shape

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def size(self) -> int:
        return len(self._vectors)

    @property
    def bounds(self) -> tuple[float, float]:
        """Optimal frame constants (c1, c2)."""
        return self._bounds

    @property
    def analysis_op(self) -> ModuleOperator:
        """Theta: x -> (<x_j,x>)_j."""
        return self._theta

    @property
    def synthesis_op(self) -> ModuleOperator:
        """Theta*: (a_j)_j -> sum_j x_j a_j."""
        return self._theta_star

    @property
    def gram_op(self) -> ModuleOperator:
        """S = Theta* Theta."""
        return self._gram

    def canonical_dual(self) -> tuple[ModuleVector, ...]:
        """g_j = S^(-1) x_j (pseudo-inverse in range mode)."""
        return self._dual

    def gram_inverse(self) -> ModuleOperator:
        return _operator_from_block_matrices(
            self._shape, self._dim, self._dim, self._gram_inv_blocks
        )

    # -- reconstruction ----------------------------------------------------

    def _check_indices(self, indices) -> list[int]:
        idx = list(indices)
        for j in idx:
            if not 0 <= j < self.size:
                raise IndexError(f"frame index {j} out of range")
        return idx

    def reconstruct(self, x: ModuleVector, indices=None) -> ModuleVector:
        """sum_{j in indices} x_j <g_j, x>; all indices by default."""
        idx = range(self.size) if indices is None else self._check_indices(indices)
        out = ModuleVector.zero(self._shape, self._dim)
        for j in idx:
            out = out + self._vectors[j] * inner_product(self._dual[j], x)
        return out

    def reconstruction_tail(self, x: ModuleVector, n: int) -> float:
        """||x - sum_{j<n} x_j <g_j,x>|| for the stored vector order."""
        if not 0 <= n <= self.size:
            raise ValueError(f"prefix length {n} out of range")
        return (x - self.reconstruct(x, range(n))).norm()

    def partial_sum_op(self, indices) -> ModuleOperator:
        """P_J' = sum_{j in J'} theta_{x_j, g_j}; norm bounded by c2/c1."""
        idx = self._check_indices(indices)
        out = ModuleOperator.zero(self._shape, self._dim, self._dim)
        for j in idx:
            out = out + theta_op(self._vectors[j], self._dual[j])
        return out

    def partial_sum_factored(self, indices) -> ModuleOperator:
        """Same operator through Theta* pi_J' Theta S^(-1): the proof's route."""
        idx = self._check_indices(indices)
        selector = ModuleOperator.coordinate_selector(self._shape, self.size, idx)
        return self._theta_star @ selector @ self._theta @ self.gram_inverse()

    def __repr__(self) -> str:
        c1, c2 = self._bounds
        return (
            f"Frame(size={self.size}, dim={self.dim}, "
            f"bounds=({c1:.4g}, {c2:.4g}), spanning={self._spanning!r})"
        )


def standard_basis_frame(shape: AlgebraShape, dim: int) -> Frame:
    """The Parseval frame {e_j}: bounds (1,1), self-dual."""
    return Frame([ModuleVector.basis(shape, dim, j) for j in range(dim)])
