"""Solve the five-qubit gamma=0.1 recovery SDP with a general-purpose
convex solver (cvxpy), independently of qer.sdp, and print the optimum.

The recovery Choi operator and cost matrix are rebuilt here from scratch
with plain numpy (column-stacked kets, no qer.linalg helpers) so the value
does not share code with the interior-point path.
"""

import argparse
import itertools

import cvxpy as cp
import numpy as np

P = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def pauli(s):
    out = np.ones((1, 1))
    for c in s:
        out = np.kron(out, P[c])
    return out


def five_qubit_isometry():
    gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    proj = np.eye(32)
    for g in gens:
        proj = proj @ (np.eye(32) + pauli(g)) / 2
    # |0_L> from projecting |00000>, |1_L> = Xbar |0_L>
    zero = proj[:, 0] / np.linalg.norm(proj[:, 0])
    one = pauli("XXXXX") @ zero
    return np.stack([zero, one], axis=1)


def noise_elements(gamma, n):
    e0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]])
    e1 = np.array([[0, np.sqrt(gamma)], [0, 0]])
    out = []
    for combo in itertools.product([e0, e1], repeat=n):
        m = np.ones((1, 1))
        for e in combo:
            m = np.kron(m, e)
        out.append(m)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gamma", type=float, default=0.1)
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()

    u = five_qubit_isometry()
    rho = np.eye(2) / 2
    # Choi operator J = sum_k vec_c(R_k) vec_c(R_k)^H (column stacking):
    # F = sum_{k,j} |tr(rho R_k E_j)|^2 = sum_j vec_c(E_j rho)^H ... built directly
    dk, dh = 32, 2
    c = np.zeros((dh * dk, dh * dk), dtype=complex)
    for e in noise_elements(args.gamma, 5):
        ep = e @ u  # 32 x 2
        # tr(rho R E') = sum_{a,b} R[a,b] (E' rho)[b,a] = <vec_c(conj((E' rho)^T)), vec_c(R)>
        w = (ep @ rho).T.reshape(-1, order="F")  # vec_c of (E' rho)^T
        c += np.outer(w.conj(), w)
    x = cp.Variable((dh * dk, dh * dk), hermitian=True)
    # column stacking: vec_c(R) index = a + dh*b  -> (input b) major, (output a) minor
    # so x lives on in (x) out; trace-preserving means tracing out the output factor
    cons = [x >> 0, cp.partial_trace(x, [dk, dh], axis=1) == np.eye(dk)]
    prob = cp.Problem(cp.Maximize(cp.real(cp.trace(c @ x))), cons)
    prob.solve(solver=args.solver)
    print(f"solver={args.solver} status={prob.status} gamma={args.gamma} value={prob.value:.12f}")


if __name__ == "__main__":
    main()
