"""Kernel evaluation, Gram matrices and the variance-based sigma heuristic."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import InvalidInputError, InvalidParameterError

#: Default sigma search grid: 1e-4, 1e-3, ..., 1e4.
DEFAULT_SIGMA_GRID = tuple(10.0 ** e for e in range(-4, 5))

#: Kernel values below this are flushed to zero to avoid denormal slowdowns.
_FLUSH_THRESHOLD = 1e-300

_GRAM_MAGIC = b"SBGRAM01"


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its parameters.

    kind is either ``"linear"`` or ``"gaussian"``; ``sigma`` is the
    bandwidth of the gaussian kernel exp(-sigma * ||z - z'||^2) and is
    ignored for the linear kernel.
    """

    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "gaussian"):
            raise InvalidParameterError(f"unknown kernel kind: {self.kind!r}")
        if self.kind == "gaussian":
            if self.sigma is None or not np.isfinite(self.sigma) or self.sigma <= 0:
                raise InvalidParameterError(
                    f"gaussian kernel requires sigma > 0, got {self.sigma!r}"
                )


@dataclass
class GramTensor:
    """Pairwise kernel values between two pattern sets.

    ``values[a, b]`` holds K(A[a], B[b]).  ``symmetric`` is set when both
    index sets coincide, in which case the matrix is computed once and
    mirrored exactly.
    """

    values: np.ndarray
    spec: KernelSpec
    symmetric: bool = False

    @property
    def shape(self):
        return self.values.shape


def kernel_eval(spec: KernelSpec, z, zp) -> float:
    """Evaluate the kernel on a single pair of equal-length vectors."""
    z = np.asarray(z, dtype=float)
    zp = np.asarray(zp, dtype=float)
    if z.shape != zp.shape or z.ndim != 1:
        raise InvalidInputError(
            f"kernel arguments must be 1-d vectors of equal length, "
            f"got shapes {z.shape} and {zp.shape}"
        )
    if spec.kind == "linear":
        return float(z @ zp)
    value = float(np.exp(-spec.sigma * np.sum((z - zp) ** 2)))
    return value if value >= _FLUSH_THRESHOLD else 0.0


def gram_values(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Dense kernel matrix between the rows of A and B."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise InvalidInputError(
            f"pattern length mismatch: {A.shape[1]} vs {B.shape[1]}"
        )
    if spec.kind == "linear":
        return A @ B.T
    values = np.exp(-spec.sigma * cdist(A, B, "sqeuclidean"))
    values[values < _FLUSH_THRESHOLD] = 0.0
    return values


def gram(spec: KernelSpec, A, B) -> GramTensor:
    """Gram tensor between pattern lists A and B.

    The symmetric flag is set when A and B are the same list; in that
    case each pair is computed once and the matrix is exactly symmetric.
    """
    same = A is B
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = A if same else np.atleast_2d(np.asarray(B, dtype=float))
    same = same or (A.shape == B.shape and np.array_equal(A, B))
    values = gram_values(spec, A, B)
    if same:
        # exact symmetry regardless of floating-point evaluation order
        values = np.tril(values) + np.tril(values, -1).T
    return GramTensor(values=values, spec=spec, symmetric=same)


def gram_bank(spec: KernelSpec, bank) -> GramTensor:
    """Full Gram tensor over all (instance, offset) patterns of a bank."""
    return gram(spec, bank.flat_patterns, bank.flat_patterns)


def select_sigma(bank, grid=DEFAULT_SIGMA_GRID, max_patterns: int = 2000,
                 seed: int = 0) -> float:
    """Pick the grid sigma maximizing the variance of the Gram entries.

    For banks larger than ``max_patterns`` the variance is computed on a
    uniformly subsampled pattern set with a fixed seed.  Ties break
    toward the smaller sigma.
    """
    grid = list(grid)
    if not grid:
        raise InvalidParameterError("sigma grid must be nonempty")
    patterns = np.asarray(getattr(bank, "flat_patterns", bank), dtype=float)
    patterns = patterns.reshape(-1, patterns.shape[-1])
    if len(patterns) > max_patterns:
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(patterns), size=max_patterns, replace=False)
        patterns = patterns[np.sort(idx)]
    d2 = cdist(patterns, patterns, "sqeuclidean")
    best_sigma, best_var = None, -1.0
    for sigma in sorted(grid):
        var = float(np.var(np.exp(-sigma * d2)))
        if var > best_var + 1e-15:
            best_sigma, best_var = sigma, var
    return float(best_sigma)


def save_gram(path, tensor: GramTensor, m: int, Q: int, ell: int) -> None:
    """Write a Gram tensor to a binary cache file.

    Layout: magic, version already folded into the magic, then
    (m, Q, ell, kind flag, sigma) followed by row-major float64 values.
    """
    values = np.ascontiguousarray(tensor.values, dtype=np.float64)
    kind_flag = 0 if tensor.spec.kind == "linear" else 1
    sigma = tensor.spec.sigma if tensor.spec.sigma is not None else 0.0
    with open(path, "wb") as fh:
        fh.write(_GRAM_MAGIC)
        fh.write(struct.pack("<qqqqd?", m, Q, ell, kind_flag, sigma,
                             tensor.symmetric))
        fh.write(struct.pack("<qq", *values.shape))
        fh.write(values.tobytes())


def load_gram(path) -> tuple[GramTensor, int, int, int]:
    """Read a Gram tensor cache written by :func:`save_gram`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_GRAM_MAGIC))
        if magic != _GRAM_MAGIC:
            raise InvalidInputError(f"not a gram cache file: {path}")
        m, Q, ell, kind_flag, sigma, symmetric = struct.unpack(
            "<qqqqd?", fh.read(struct.calcsize("<qqqqd?")))
        rows, cols = struct.unpack("<qq", fh.read(16))
        values = np.frombuffer(fh.read(rows * cols * 8),
                               dtype=np.float64).reshape(rows, cols).copy()
    spec = (KernelSpec("linear") if kind_flag == 0
            else KernelSpec("gaussian", sigma=sigma))
    return GramTensor(values=values, spec=spec, symmetric=symmetric), m, Q, ell
