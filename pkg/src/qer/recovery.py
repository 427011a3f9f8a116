"""Recovery pipelines: SDP-optimal recovery, syndrome-based QEC recovery,
decode-only recovery, the unencoded baseline, and small-gamma fits."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import (
    ChoiOperator,
    KrausChannel,
    _rho,
    amplitude_damping,
    choi_to_kraus,
    compose_choi,
    compose_kraus,
    kraus_to_choi,
    tensor_power,
)
from .codes import CodeIsometry, StabilizerCode, pauli_matrix, paulis_commute, spreading_transform
from .fidelity import data_matrix, entanglement_fidelity
from .sdp import SdpProblem, SdpSolution, solve

FIT_GRID = tuple(np.logspace(-3, -2, 8))
LEUNG_LITERATURE_COEFFICIENT = 2.75  # quoted for the Leung et al. recovery circuit, not computed


@dataclass(frozen=True)
class RecoveryResult:
    recovery: ChoiOperator
    kraus: KrausChannel
    fidelity: float
    method: str
    gamma: Optional[float] = None
    certificate: Optional[SdpSolution] = None
    recomputed_fidelity: Optional[float] = None


def amplitude_damping_noise(gamma: float, n_qubits: int) -> KrausChannel:
    return tensor_power(amplitude_damping(gamma), n_qubits)


def _n_qubits(enc: CodeIsometry) -> int:
    n = int(round(np.log2(enc.dim_code)))
    if 2**n != enc.dim_code:
        raise ValueError(f"code dimension {enc.dim_code} is not a power of two")
    return n


def _source_density(enc: CodeIsometry, rho_source) -> np.ndarray:
    if rho_source is None:
        return np.eye(enc.dim_source, dtype=complex) / enc.dim_source
    r = _rho(rho_source)
    if r.shape != (enc.dim_source, enc.dim_source):
        raise ValueError("source density does not match the encoder's source dimension")
    return r


def optimal_recovery(
    enc: CodeIsometry,
    noise: KrausChannel,
    rho_source=None,
    tol: float = 1e-9,
    gamma: Optional[float] = None,
) -> RecoveryResult:
    """Recovery maximizing the entanglement fidelity of ``rho_source``
    (maximally mixed by default) through encode -> noise -> recovery."""
    rho = _source_density(enc, rho_source)
    spread = spreading_transform(noise, enc)
    cost = data_matrix(rho, spread)
    sol = solve(SdpProblem(enc.dim_source, enc.dim_code, cost), tol=tol)
    kraus = choi_to_kraus(sol.x)
    check = entanglement_fidelity(rho, compose_choi(sol.x, spread), method="choi")
    return RecoveryResult(
        recovery=sol.x,
        kraus=kraus,
        fidelity=sol.primal_value,
        method="optimal",
        gamma=gamma,
        certificate=sol,
        recomputed_fidelity=check,
    )


def syndrome(code: StabilizerCode, error: str) -> tuple[int, ...]:
    return tuple(0 if paulis_commute(g, error) else 1 for g in code.generators)


def correction_table(code: StabilizerCode) -> dict[tuple[int, ...], str]:
    """Minimum-weight Pauli correction for every syndrome.

    Raises ``ValueError`` if some syndrome has two distinct minimum-weight
    explanations.
    """
    n = code.n
    n_syn = 2 ** len(code.generators)
    table: dict[tuple[int, ...], str] = {}
    for w in range(n + 1):
        found: dict[tuple[int, ...], list[str]] = {}
        for support in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                s = ["I"] * n
                for q, l in zip(support, letters):
                    s[q] = l
                p = "".join(s)
                syn = syndrome(code, p)
                if syn not in table:
                    found.setdefault(syn, []).append(p)
        for syn, cands in found.items():
            if len(cands) > 1:
                raise ValueError(
                    f"ambiguous correction for syndrome {syn}: {cands[:3]} ..."
                )
            table[syn] = cands[0]
        if len(table) == n_syn:
            break
    return table


def stabilizer_qec_recovery(code: StabilizerCode, enc: CodeIsometry) -> KrausChannel:
    """Syndrome measurement, minimum-weight correction, then decoding.

    One Kraus element ``U^dagger C_s P_s`` per syndrome ``s``.
    """
    dim = 2**code.n
    if enc.dim_code != dim:
        raise ValueError("encoder does not match the code's qubit count")
    gens = [pauli_matrix(g) for g in code.generators]
    eye = np.eye(dim)
    els = []
    for syn, corr in sorted(correction_table(code).items()):
        proj = eye.astype(complex)
        for g, bit in zip(gens, syn):
            proj = proj @ (eye + (-1) ** bit * g) / 2
        els.append(enc.u.conj().T @ pauli_matrix(corr) @ proj)
    return KrausChannel(els)


def decode_only_recovery(enc: CodeIsometry) -> KrausChannel:
    """Apply ``U^dagger`` on the code space; map the complement to ``|0>``."""
    w, v = np.linalg.eigh(np.eye(enc.dim_code) - enc.projector)
    comp = v[:, w > 0.5]
    ground = np.zeros((enc.dim_source, 1))
    ground[0, 0] = 1
    els = [enc.u.conj().T] + [ground @ comp[:, [k]].conj().T for k in range(comp.shape[1])]
    return KrausChannel(els)


def fixed_recovery(
    recovery: KrausChannel,
    enc: CodeIsometry,
    noise: KrausChannel,
    rho_source=None,
    method: str = "fixed",
    gamma: Optional[float] = None,
) -> RecoveryResult:
    rho = _source_density(enc, rho_source)
    spread = spreading_transform(noise, enc)
    f = entanglement_fidelity(rho, compose_kraus(recovery, spread))
    return RecoveryResult(
        recovery=kraus_to_choi(recovery), kraus=recovery, fidelity=f, method=method, gamma=gamma
    )


def no_recovery_baseline(gamma: float) -> float:
    """Entanglement fidelity of a maximally mixed qubit sent unencoded
    through one amplitude damping channel."""
    return entanglement_fidelity(np.eye(2) / 2, amplitude_damping(gamma))


@dataclass(frozen=True)
class QuadraticFit:
    quadratic: float
    cubic: float
    residual: float


def fit_quadratic(points: Sequence[tuple[float, float]]) -> QuadraticFit:
    """Least-squares fit of ``1 - F = a g^2 + b g^3``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < 4:
        raise ValueError("need at least 4 (gamma, fidelity) points")
    g, f = pts[:, 0], pts[:, 1]
    if np.any(g <= 0) or np.any(g > 0.02):
        raise ValueError("fit points must have gamma in (0, 0.02]")
    a = np.stack([g**2, g**3], axis=1)
    if np.linalg.matrix_rank(a) < 2:
        raise ValueError("degenerate design matrix")
    coef, *_ = np.linalg.lstsq(a, 1 - f, rcond=None)
    res = float(np.linalg.norm(a @ coef - (1 - f)))
    return QuadraticFit(float(coef[0]), float(coef[1]), res)


def fit_quadratic_coefficient(points: Sequence[tuple[float, float]]) -> float:
    return fit_quadratic(points).quadratic


def fit_tol(gamma: float, tol: float = 1e-9) -> float:
    """Solver tolerance that keeps the duality gap well under ``1 - F``."""
    return min(tol, 1e-3 * gamma**2) if gamma > 0 else tol


def small_gamma_points(
    enc: CodeIsometry,
    method: str = "optimal",
    code: Optional[StabilizerCode] = None,
    grid: Sequence[float] = FIT_GRID,
) -> list[tuple[float, float]]:
    n = _n_qubits(enc)
    pts = []
    qec = stabilizer_qec_recovery(code, enc) if method == "qec" else None
    for g in grid:
        noise = amplitude_damping_noise(g, n)
        if method == "optimal":
            f = optimal_recovery(enc, noise, tol=fit_tol(g)).fidelity
        elif method == "qec":
            f = fixed_recovery(qec, enc, noise).fidelity
        else:
            raise ValueError(f"unknown method {method!r}")
        pts.append((float(g), f))
    return pts
