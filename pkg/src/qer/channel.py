"""Quantum channels in Kraus and Choi form.

Choi operators are ordered output (x) input: for a channel with Kraus
elements ``E_k`` the Choi operator is ``sum_k |E_k>><<E_k|`` with row-major
vectorization, so tracing out the *first* factor gives ``sum_k E_k^T E_k^*``,
which equals the identity exactly when the channel is trace preserving.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .linalg import (
    as_matrix,
    check_hermitian,
    devectorize,
    eig_hermitian,
    hermitize,
    kron,
    min_eigenvalue,
    partial_trace,
    vectorize,
)

TP_ATOL = 1e-10
CHOI_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class DensityOperator:
    rho: np.ndarray

    def __post_init__(self):
        rho = check_hermitian(self.rho, what="density operator")
        if rho.shape[0] != rho.shape[1]:
            raise ValueError("density operator must be square")
        if abs(np.trace(rho) - 1) > 1e-12 * max(1, rho.shape[0]):
            raise ValueError(f"density operator has trace {np.trace(rho).real:.15g}")
        if min_eigenvalue(rho) < -1e-10:
            raise ValueError("density operator is not positive semidefinite")
        object.__setattr__(self, "rho", hermitize(rho))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def pure(cls, psi) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class KrausChannel:
    elements: tuple
    dim_in: int = field(init=False)
    dim_out: int = field(init=False)

    def __post_init__(self):
        els = tuple(as_matrix(e) for e in self.elements)
        if not els:
            raise ValueError("a channel needs at least one Kraus element")
        shape = els[0].shape
        if any(e.shape != shape for e in els):
            raise ValueError("Kraus elements must share one shape")
        for e in els:
            e.setflags(write=False)
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "dim_out", shape[0])
        object.__setattr__(self, "dim_in", shape[1])

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def completeness(self) -> np.ndarray:
        """``sum_k E_k^dagger E_k``."""
        return sum(e.conj().T @ e for e in self.elements)


@dataclass(frozen=True)
class ChoiOperator:
    x: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        x = as_matrix(self.x)
        n = self.dim_in * self.dim_out
        if x.shape != (n, n):
            raise ValueError(
                f"Choi matrix of shape {x.shape} does not match dim_out*dim_in = {n}"
            )
        x = check_hermitian(x, rtol=1e-10, what="Choi operator")
        x = hermitize(x)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)


Channel = Union[KrausChannel, ChoiOperator]


def _rho(rho) -> np.ndarray:
    if isinstance(rho, DensityOperator):
        return rho.rho
    return as_matrix(rho)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim)])


def amplitude_damping(gamma: float) -> KrausChannel:
    """Single-qubit amplitude damping with decay probability ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    e0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    e1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel([e0, e1])


def kraus_to_choi(k: KrausChannel) -> ChoiOperator:
    vecs = np.stack([vectorize(e) for e in k.elements], axis=1)
    return ChoiOperator(vecs @ vecs.conj().T, k.dim_in, k.dim_out)


def choi_to_kraus(c: ChoiOperator, tol: float = 1e-9) -> KrausChannel:
    """Kraus elements from the eigendecomposition of the Choi operator.

    Eigenvalues below ``1e-10 * max`` are dropped; a genuinely negative
    eigenvalue (below ``-tol``) means the map is not completely positive.
    """
    w, v = eig_hermitian(c.x)
    top = max(float(w[0]), 0.0)
    if w[-1] < -tol * max(1.0, top):
        raise ValueError(f"Choi operator is not positive (min eigenvalue {w[-1]:.3e})")
    keep = w > CHOI_RANK_RTOL * top
    if not np.any(keep):
        return KrausChannel([np.zeros((c.dim_out, c.dim_in))])
    els = [
        np.sqrt(lam) * devectorize(v[:, i], c.dim_out, c.dim_in)
        for i, lam in enumerate(w)
        if keep[i]
    ]
    return KrausChannel(els)


def as_choi(ch: Channel) -> ChoiOperator:
    return ch if isinstance(ch, ChoiOperator) else kraus_to_choi(ch)


def as_kraus(ch: Channel) -> KrausChannel:
    return ch if isinstance(ch, KrausChannel) else choi_to_kraus(ch)


def apply(ch: Channel, rho):
    """Send a density through a channel.

    Returns a :class:`DensityOperator` when given one, a bare array otherwise.
    """
    r = _rho(rho)
    if r.shape != (ch.dim_in, ch.dim_in):
        raise ValueError(f"input of shape {r.shape} does not match dim_in={ch.dim_in}")
    if isinstance(ch, KrausChannel):
        out = sum(e @ r @ e.conj().T for e in ch.elements)
    else:
        big = kron(np.eye(ch.dim_out), r.T) @ ch.x
        out = partial_trace(big, (ch.dim_out, ch.dim_in), "second")
    out = hermitize(out)
    if isinstance(rho, DensityOperator):
        return DensityOperator(out)
    return out


@dataclass(frozen=True)
class CptpReport:
    cp: bool
    tp: bool
    min_eigenvalue: float
    tp_residual: float

    def __bool__(self) -> bool:
        return self.cp and self.tp


def is_cptp(ch: Channel, tol: float = 1e-9) -> CptpReport:
    c = as_choi(ch)
    lam = min_eigenvalue(c.x)
    if isinstance(ch, KrausChannel):
        resid = np.max(np.abs(ch.completeness() - np.eye(ch.dim_in)))
    else:
        red = partial_trace(c.x, (c.dim_out, c.dim_in), "first")
        resid = np.max(np.abs(red - np.eye(c.dim_in)))
    return CptpReport(cp=bool(lam >= -tol), tp=bool(resid <= tol), min_eigenvalue=lam, tp_residual=float(resid))


def compose_choi(x_r: Channel, e: KrausChannel) -> ChoiOperator:
    """Choi operator of ``R o E`` from the Choi operator of ``R``.

    Computes ``sum_j (I (x) E_j^T) X_R (I (x) E_j^*)``.
    """
    x_r = as_choi(x_r)
    if x_r.dim_in != e.dim_out:
        raise ValueError(f"recovery input dim {x_r.dim_in} != noise output dim {e.dim_out}")
    eye = np.eye(x_r.dim_out)
    out = np.zeros((x_r.dim_out * e.dim_in,) * 2, dtype=complex)
    for ej in e.elements:
        left = kron(eye, ej.T)
        out += left @ x_r.x @ left.conj().T
    return ChoiOperator(out, e.dim_in, x_r.dim_out)


def compose_kraus(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Kraus elements of ``second o first``."""
    if second.dim_in != first.dim_out:
        raise ValueError("dimension mismatch in composition")
    return KrausChannel([r @ e for r in second.elements for e in first.elements])


def tensor_power(ch: KrausChannel, n: int) -> KrausChannel:
    """``ch`` acting independently on ``n`` subsystems; subsystem 1 is the
    most significant Kronecker factor."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    els = [np.ones((1, 1), dtype=complex)]
    for _ in range(n):
        els = [np.kron(a, b) for a in els for b in ch.elements]
    return KrausChannel(els)



# -- channel-spec JSON -------------------------------------------------------

def _encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _decode_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("expected a nested [rows][cols][re, im] array")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_dict(ch: KrausChannel) -> dict:
    return {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [_encode_matrix(e) for e in ch.elements],
    }


def channel_from_dict(d: dict) -> KrausChannel:
    ch = KrausChannel([_decode_matrix(e) for e in d["kraus"]])
    if (ch.dim_in, ch.dim_out) != (d["dim_in"], d["dim_out"]):
        raise ValueError("declared dims do not match Kraus element shapes")
    return ch


def dump_channel(ch: KrausChannel, path) -> None:
    # json writes floats with repr(), which round-trips doubles exactly
    Path(path).write_text(json.dumps(channel_to_dict(ch)))


def load_channel(path) -> KrausChannel:
    return channel_from_dict(json.loads(Path(path).read_text()))
