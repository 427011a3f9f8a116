"""Fidelity measures: state fidelity, entanglement fidelity, ensemble
average fidelity, and the cost matrix whose trace against a recovery's Choi
operator gives the entanglement fidelity of recovery-after-noise."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
import numpy as np

from .channel import (
    Channel,
    KrausChannel,
    _rho,
    apply,
    as_choi,
    as_kraus,
)
from .linalg import eig_hermitian, partial_trace, psd_sqrt, vectorize


@dataclass(frozen=True)
class PurifiedState:
    amplitudes: np.ndarray
    dim_ref: int
    dim_sys: int

    def reduced(self) -> np.ndarray:
        """Trace out the reference factor."""
        psi = self.amplitudes
        return partial_trace(np.outer(psi, psi.conj()), (self.dim_ref, self.dim_sys), "first")


@dataclass(frozen=True)
class Ensemble:
    probabilities: tuple[float, ...]
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
            raise ValueError("ensemble probabilities must be non-negative and sum to 1")
        states = tuple(_rho(s) for s in self.states)
        if len(states) != len(p):
            raise ValueError("one state per probability required")
        if len({s.shape for s in states}) != 1:
            raise ValueError("ensemble states must share one dimension")
        object.__setattr__(self, "probabilities", tuple(p))
        object.__setattr__(self, "states", states)

    @property
    def density(self) -> np.ndarray:
        return sum(p * s for p, s in zip(self.probabilities, self.states))


def state_fidelity(rho, sigma) -> float:
    r, s = _rho(rho), _rho(sigma)
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch: {r.shape} vs {s.shape}")
    sr = psd_sqrt(r)
    inner = sr @ s @ sr
    return float(np.clip(np.trace(psd_sqrt((inner + inner.conj().T) / 2)).real, 0.0, 1.0))


def purify(rho) -> PurifiedState:
    r = _rho(rho)
    w, v = eig_hermitian(r)
    keep = w > 1e-12 * max(1.0, w[0])
    w, v = np.clip(w[keep], 0, None), v[:, keep]
    d_a, d_h = len(w), r.shape[0]
    amps = np.zeros(d_a * d_h, dtype=complex)
    for k in range(d_a):
        basis = np.zeros(d_a)
        basis[k] = 1
        amps += np.sqrt(w[k]) * np.kron(basis, v[:, k])
    return PurifiedState(amps, d_a, d_h)


def _check_square(rho: np.ndarray, ch: Channel):
    if not (ch.dim_in == ch.dim_out == rho.shape[0]):
        raise ValueError(
            f"channel {ch.dim_out}x{ch.dim_in} incompatible with a density of dim {rho.shape[0]}"
        )


def entanglement_fidelity(rho, ch: Channel, method: str = "auto") -> float:
    """Entanglement fidelity of ``rho`` through ``ch``.

    ``method`` picks the evaluation route: ``"kraus"`` sums ``|tr(rho B_i)|^2``,
    ``"choi"`` evaluates ``<<rho|X|rho>>``, ``"purification"`` builds an explicit
    purification and applies ``I (x) ch`` to it (slow; meant as a check on the
    other two). ``"auto"`` uses whichever of the first two matches ``ch``.
    """
    r = _rho(rho)
    _check_square(r, ch)
    if method == "auto":
        method = "kraus" if isinstance(ch, KrausChannel) else "choi"
    if method == "kraus":
        return float(sum(abs(np.trace(r @ b)) ** 2 for b in as_kraus(ch).elements))
    if method == "choi":
        v = vectorize(r)
        return float((v.conj() @ as_choi(ch).x @ v).real)
    if method == "purification":
        return _purification_fidelity(r, as_kraus(ch))
    raise ValueError(f"unknown method {method!r}")


def _purification_fidelity(r: np.ndarray, ch: KrausChannel) -> float:
    pur = purify(r)
    psi = pur.amplitudes
    eye = np.eye(pur.dim_ref)
    proj = np.outer(psi, psi.conj())
    out = sum(np.kron(eye, b) @ proj @ np.kron(eye, b).conj().T for b in ch.elements)
    return float((psi.conj() @ out @ psi).real)


def ensemble_average_fidelity(ens: Ensemble, ch: Channel) -> float:
    """``sum_i p_i F(rho_i, ch(rho_i))^2``; linear in ``ch`` for pure members."""
    total = 0.0
    for p, s in zip(ens.probabilities, ens.states):
        if abs(np.trace(s @ s).real - 1) > 1e-10:
            warnings.warn("ensemble member is not pure; average fidelity is not linear in the channel")
        total += p * state_fidelity(s, apply(ch, s)) ** 2
    return total


def data_matrix(rho, spread: KrausChannel) -> np.ndarray:
    """Cost matrix ``sum_j |rho E_j^dagger>><<rho E_j^dagger|`` on source (x) code.

    For any recovery Choi operator ``X`` (code -> source),
    ``tr(X C)`` is the entanglement fidelity of ``rho`` through recovery o spread.
    """
    r = _rho(rho)
    if r.shape[0] != spread.dim_in:
        raise ValueError(f"density of dim {r.shape[0]} does not match channel input {spread.dim_in}")
    vecs = np.stack([vectorize(r @ e.conj().T) for e in spread.elements], axis=1)
    c = vecs @ vecs.conj().T
    return (c + c.conj().T) / 2
