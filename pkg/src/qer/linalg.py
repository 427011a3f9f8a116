"""Dense complex matrix helpers: Kronecker products, partial traces,
row-major operator vectorization and Hermitian eigendecomposition."""

from __future__ import annotations

import numpy as np

HERMITIAN_RTOL = 1e-12
PSD_ATOL = 1e-10


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats) -> np.ndarray:
    """Kronecker product of a sequence, leftmost factor most significant."""
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def partial_trace(m, dims: tuple[int, int], factor: str = "second") -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``d1 x d2``.

    ``factor="first"`` returns a ``d2 x d2`` matrix, ``"second"`` a
    ``d1 x d1`` one.
    """
    m = as_matrix(m)
    d1, d2 = dims
    if m.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"matrix of shape {m.shape} does not match dims {dims}")
    t = m.reshape(d1, d2, d1, d2)
    if factor == "first":
        return np.einsum("iaib->ab", t)
    if factor == "second":
        return np.einsum("aibi->ab", t)
    raise ValueError(f"factor must be 'first' or 'second', got {factor!r}")


def vectorize(c) -> np.ndarray:
    """Row-major stacking: amplitude ``i*cols + j`` holds ``c[i, j]``."""
    return as_matrix(c).reshape(-1).copy()


def devectorize(v, dim1: int, dim2: int) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size != dim1 * dim2:
        raise ValueError(f"vector of length {v.size} cannot be reshaped to {dim1}x{dim2}")
    return v.reshape(dim1, dim2).copy()


def ket_outer(c1, c2=None) -> np.ndarray:
    """``|c1>><<c2|`` for operators ``c1``, ``c2``."""
    v1 = vectorize(c1)
    v2 = v1 if c2 is None else vectorize(c2)
    return np.outer(v1, v2.conj())


def is_hermitian(m, rtol: float = HERMITIAN_RTOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(np.max(np.abs(m)), 1.0) if m.size else 1.0
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= rtol * scale)


def check_hermitian(m, rtol: float = HERMITIAN_RTOL, what: str = "matrix") -> np.ndarray:
    m = as_matrix(m)
    if not is_hermitian(m, rtol):
        raise ValueError(f"{what} is not Hermitian (rtol={rtol:g})")
    return m


def hermitize(m) -> np.ndarray:
    m = np.asarray(m)
    return (m + m.conj().T) / 2


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a Hermitian matrix, eigenvalues in descending order.

    Degenerate eigenvalues keep LAPACK's ascending order. Each
    eigenvector is rephased so that its largest-magnitude entry
    (first one on ties) is real and positive, which makes the output
    reproducible for a fixed input.
    """
    m = check_hermitian(m)
    w, v = np.linalg.eigh(hermitize(m))
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    for k in range(v.shape[1]):
        col = v[:, k]
        mags = np.abs(col)
        idx = int(np.argmax(mags >= mags.max() * (1 - 1e-9)))
        phase = col[idx] / mags[idx]
        v[:, k] = col / phase
    return w, v


def min_eigenvalue(m) -> float:
    return float(np.linalg.eigvalsh(hermitize(as_matrix(m)))[0])


def psd_sqrt(m) -> np.ndarray:
    w, v = eig_hermitian(m)
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    if w.size and w[-1] < -PSD_ATOL * scale:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {w[-1]:.3e})")
    w = np.clip(w, 0.0, None)
    return hermitize((v * np.sqrt(w)) @ v.conj().T)
