"""Complex dense-matrix subspace algebra.

Numeric rank, null/range bases, subspace intersection and seeded random
matrix generation.  Everything here is a pure function of its inputs; RNG
state is always passed explicitly so results are reproducible from a seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InputError, RankError

DISTRIBUTIONS = ("complex-gaussian", "uniform-square")

# Orthonormality slack for SubspaceBasis validation: 10x the default
# relative rank tolerance.  SVD/QR factors are orthonormal to ~1e-15,
# so this only trips on genuinely broken bases.
_ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class Tolerance:
    """Relative SVD cutoff used for every rank decision.

    A singular value counts toward the rank when it exceeds
    ``rel_rank_tol * max(rows, cols) * sigma_max``.
    """

    rel_rank_tol: float = 1e-10

    def __post_init__(self):
        if not 0.0 < self.rel_rank_tol < 1.0:
            raise InputError(
                f"rel_rank_tol must be in (0, 1), got {self.rel_rank_tol}")

    def absolute(self, rows: int, cols: int, sigma_max: float) -> float:
        """Absolute singular-value threshold for a rows x cols matrix."""
        return self.rel_rank_tol * max(rows, cols) * sigma_max


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of C^ambient_dim.

    ``basis`` has shape (ambient_dim, dim) with orthonormal columns;
    ``dim`` may be zero (the trivial subspace).
    """

    ambient_dim: int
    dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise DimensionError(f"ambient_dim must be >= 1, got {self.ambient_dim}")
        if not 0 <= self.dim <= self.ambient_dim:
            raise DimensionError(
                f"dim must be in [0, {self.ambient_dim}], got {self.dim}")
        if self.basis.shape != (self.ambient_dim, self.dim):
            raise DimensionError(
                f"basis shape {self.basis.shape} does not match "
                f"({self.ambient_dim}, {self.dim})")
        if self.dim > 0:
            gram = self.basis.conj().T @ self.basis
            err = np.max(np.abs(gram - np.eye(self.dim)))
            if err > _ORTHO_TOL:
                raise RankError(
                    f"basis columns are not orthonormal (max Gram error {err:.3e})")


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and convert input to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def seeded_rng(seed: int, *subkeys: int) -> np.random.Generator:
    """Generator for a (seed, subkeys) stream, stable across runs.

    Distinct subkey tuples give statistically independent streams, so one
    matrix can be regenerated without shifting any other.
    """
    if seed < 0:
        raise InputError(f"seed must be a non-negative integer, got {seed}")
    return np.random.default_rng(np.random.SeedSequence([seed, *subkeys]))


def random_matrix(rows: int, cols: int, dist: str = "complex-gaussian",
                  rng: np.random.Generator = None) -> np.ndarray:
    """Draw a rows x cols matrix with i.i.d. entries from ``dist``.

    ``complex-gaussian`` is circularly symmetric with unit entry variance;
    ``uniform-square`` draws real and imaginary parts uniformly from
    [-1, 1] (a compact-support alternative).  The real block is drawn
    before the imaginary block, which pins the output for a given rng
    state.  ``rng`` is mandatory: every draw must be reproducible from a
    seed.
    """
    if rows < 1 or cols < 1:
        raise DimensionError(f"matrix dimensions must be >= 1, got {rows}x{cols}")
    if dist not in DISTRIBUTIONS:
        raise InputError(f"unknown distribution {dist!r}, expected one of {DISTRIBUTIONS}")
    if rng is None:
        raise InputError("rng is required; build one with seeded_rng(seed, ...)")
    if dist == "complex-gaussian":
        re = rng.standard_normal((rows, cols))
        im = rng.standard_normal((rows, cols))
        return (re + 1j * im) / np.sqrt(2.0)
    re = rng.uniform(-1.0, 1.0, (rows, cols))
    im = rng.uniform(-1.0, 1.0, (rows, cols))
    return re + 1j * im


def numeric_rank(a, tol: Tolerance = DEFAULT_TOL, scale: float | None = None) -> int:
    """Number of singular values above the relative threshold.

    The zero matrix (and the degenerate zero-column case) has rank 0.
    ``scale`` widens the threshold reference to max(sigma_max, scale): pass
    the natural magnitude of the factors when ranking a product whose
    singular values may all cancel, otherwise a fully cancelled product
    (entries at rounding level) would still count as rank >= 1.
    """
    arr = as_matrix(a)
    if arr.size == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    ref = max(s[0], scale or 0.0)
    if ref == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.absolute(*arr.shape, ref)))


def null_space_basis(a, tol: Tolerance = DEFAULT_TOL,
                     scale: float | None = None) -> SubspaceBasis:
    """Orthonormal basis of the right null space {x : A x = 0}.

    Basis columns are the right singular vectors whose singular values fall
    below the threshold, kept in descending singular-value order so the
    output is deterministic for a given input.  ``scale`` as in
    numeric_rank.
    """
    arr = as_matrix(a)
    rows, cols = arr.shape
    _, s, vh = np.linalg.svd(arr, full_matrices=True)
    rank = 0
    ref = max(s[0], scale or 0.0) if s.size else 0.0
    if ref > 0.0:
        rank = int(np.count_nonzero(s > tol.absolute(rows, cols, ref)))
    return SubspaceBasis(cols, cols - rank, vh[rank:].conj().T)


def range_basis(a, tol: Tolerance = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the column space (range) of A."""
    arr = as_matrix(a)
    rows, cols = arr.shape
    u, s, _ = np.linalg.svd(arr, full_matrices=True)
    rank = 0
    if s.size and s[0] > 0.0:
        rank = int(np.count_nonzero(s > tol.absolute(rows, cols, s[0])))
    return SubspaceBasis(rows, rank, u[:, :rank])


def intersection_dim(u: SubspaceBasis, v: SubspaceBasis,
                     tol: Tolerance = DEFAULT_TOL) -> int:
    """dim(span(U) ∩ span(V)) via dim U + dim V - rank([U V]).

    Exact at the tolerance granularity; symmetric in its arguments and
    invariant under right-multiplication of either basis by a unitary.
    """
    if u.ambient_dim != v.ambient_dim:
        raise DimensionError(
            f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}")
    if u.dim == 0 or v.dim == 0:
        return 0
    stacked = np.hstack([u.basis, v.basis])
    return u.dim + v.dim - numeric_rank(stacked, tol)


def orthonormalize_rows(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Replace A by Pi @ A with orthonormal rows and the same row space.

    Pi is the inverse of the (conjugated) triangular QR factor, so it is
    invertible whenever A has full row rank; rank-deficient input is
    rejected rather than silently truncated.
    """
    arr = as_matrix(a)
    rows = arr.shape[0]
    if numeric_rank(arr, tol) < rows:
        raise RankError(f"matrix of shape {arr.shape} is not full row rank")
    q, _ = np.linalg.qr(arr.conj().T)
    return q.conj().T
