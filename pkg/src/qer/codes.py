"""Stabilizer codes, encoding isometries and the spreading-channel transform."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import KrausChannel
from .linalg import as_matrix, eig_hermitian, kron_all

PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(p: str) -> np.ndarray:
    """Matrix of a Pauli string; the leftmost letter is qubit 1, the most
    significant bit of the basis index."""
    if not p:
        raise ValueError("empty Pauli string")
    bad = set(p) - set(PAULIS)
    if bad:
        raise ValueError(f"invalid Pauli letters {sorted(bad)} in {p!r}")
    return kron_all(PAULIS[c] for c in p)


def paulis_commute(a: str, b: str) -> bool:
    anti = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return anti % 2 == 0


def pauli_weight(p: str) -> int:
    return sum(c != "I" for c in p)


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    generators: tuple[str, ...]
    logical_z: str
    logical_x: str

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for p in (*self.generators, self.logical_z, self.logical_x):
            if len(p) != self.n:
                raise ValueError(f"Pauli string {p!r} does not have length n={self.n}")
            if set(p) - set(PAULIS):
                raise ValueError(f"invalid Pauli string {p!r}")
        for a, b in itertools.combinations(self.generators, 2):
            if not paulis_commute(a, b):
                raise ValueError(f"generators {a} and {b} do not commute")
        for g in self.generators:
            if not paulis_commute(g, self.logical_z):
                raise ValueError(f"logical Z does not commute with generator {g}")


@dataclass(frozen=True)
class CodeIsometry:
    """Encoder ``U`` mapping the source space into the code space; column
    ``n`` holds the logical state ``|n>_L``."""

    u: np.ndarray
    description: str = ""

    def __post_init__(self):
        u = as_matrix(self.u)
        if u.shape[0] < u.shape[1]:
            raise ValueError("an isometry cannot have fewer rows than columns")
        if not np.allclose(u.conj().T @ u, np.eye(u.shape[1]), atol=1e-12):
            raise ValueError("columns of U are not orthonormal")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def dim_source(self) -> int:
        return self.u.shape[1]

    @property
    def dim_code(self) -> int:
        return self.u.shape[0]

    @property
    def projector(self) -> np.ndarray:
        return self.u @ self.u.conj().T

    def encode(self, rho) -> np.ndarray:
        return self.u @ np.asarray(rho) @ self.u.conj().T

    def decode(self, rho) -> np.ndarray:
        return self.u.conj().T @ np.asarray(rho) @ self.u

    def rephased(self, phases) -> "CodeIsometry":
        return CodeIsometry(self.u * np.exp(1j * np.asarray(phases)), self.description)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-10)
    first = v[nz[0]]
    return v * (abs(first) / first)


def code_projector(generators) -> np.ndarray:
    n = len(generators[0])
    p = np.eye(2**n, dtype=complex)
    for g in generators:
        p = p @ (np.eye(2**n) + pauli_matrix(g)) / 2
    return p


def logical_states(code: StabilizerCode) -> CodeIsometry:
    """Encoder whose columns are the +1 and -1 eigenstates of logical Z
    inside the joint +1 eigenspace of the generators."""
    p = code_projector(code.generators)
    w, v = eig_hermitian((p + p.conj().T) / 2)
    space = v[:, np.abs(w - 1) < 1e-8]
    if space.shape[1] != 2:
        raise ValueError(f"code space has dimension {space.shape[1]}, expected 2")
    zl = space.conj().T @ pauli_matrix(code.logical_z) @ space
    zw, zv = eig_hermitian((zl + zl.conj().T) / 2)
    if not (np.isclose(zw[0], 1, atol=1e-8) and np.isclose(zw[1], -1, atol=1e-8)):
        raise ValueError(f"logical Z has eigenvalues {zw} on the code space")
    states = space @ zv
    u = np.stack([_fix_phase(states[:, 0]), _fix_phase(states[:, 1])], axis=1)
    return CodeIsometry(u, f"stabilizer code {list(code.generators)}")


def five_qubit_code() -> StabilizerCode:
    return StabilizerCode(
        n=5,
        generators=("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"),
        logical_z="ZZZZZ",
        logical_x="XXXXX",
    )


def leung4_code() -> CodeIsometry:
    """Four-qubit amplitude-damping code of Leung, Nielsen, Chuang and Yamamoto."""
    u = np.zeros((16, 2), dtype=complex)
    u[[0b0000, 0b1111], 0] = 1 / np.sqrt(2)
    u[[0b0011, 0b1100], 1] = 1 / np.sqrt(2)
    return CodeIsometry(u, "leung4")


def leung4_stabilizer() -> StabilizerCode:
    """Stabilizer description of the four-qubit code (distance 2)."""
    return StabilizerCode(4, ("ZZII", "IIZZ", "XXXX"), logical_z="ZIZI", logical_x="XXII")


def spreading_transform(noise: KrausChannel, enc: CodeIsometry) -> KrausChannel:
    """Fold the encoder into the noise: elements ``E_i U``, source -> code space."""
    if noise.dim_in != enc.dim_code or noise.dim_out != enc.dim_code:
        raise ValueError(
            f"noise dims ({noise.dim_out}x{noise.dim_in}) do not match code dim {enc.dim_code}"
        )
    return KrausChannel([e @ enc.u for e in noise.elements])


# -- code-spec JSON -----------------------------------------------------------

def code_from_dict(d: dict):
    """Returns a ``(StabilizerCode | None, CodeIsometry)`` pair."""
    if "isometry" in d:
        arr = np.asarray(d["isometry"], dtype=float)
        return None, CodeIsometry(arr[..., 0] + 1j * arr[..., 1], d.get("description", "custom"))
    code = StabilizerCode(d["n"], tuple(d["generators"]), d["logical_z"], d["logical_x"])
    return code, logical_states(code)


def load_code(path):
    return code_from_dict(json.loads(Path(path).read_text()))
