"""Hot numeric kernels for the statevector simulator.

The only loop that dominates runtime is the per-shot noise-trajectory
sampler: every shot whose depolarizing-error pattern is non-trivial needs
its own circuit re-execution. The kernels below exist in two forms, a
numba ``@njit`` compilation (default whenever numba imports) and a pure
numpy/python fallback. Set ``CVQE_NUMBA=0`` to force the fallback; both
paths execute the same arithmetic in the same order.

Conventions: qubit 0 is the most significant bit of the state index.
Two-qubit gate matrices are 4x4 in the basis |q_a q_b> with q_a the first
target. One-qubit matrices are stored in the top-left 2x2 block of a 4x4
slot so that a circuit encodes to homogeneous arrays.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("CVQE_NUMBA", "1") != "0"
if NUMBA_ENABLED:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None
        NUMBA_ENABLED = False
else:
    numba = None


def _apply_1q(psi, m00, m01, m10, m11, target, num_qubits):
    stride = 1 << (num_qubits - 1 - target)
    dim = psi.shape[0]
    for base in range(0, dim, 2 * stride):
        for off in range(stride):
            i0 = base + off
            i1 = i0 + stride
            a0 = psi[i0]
            a1 = psi[i1]
            psi[i0] = m00 * a0 + m01 * a1
            psi[i1] = m10 * a0 + m11 * a1


def _apply_2q(psi, mat, t0, t1, num_qubits):
    s0 = 1 << (num_qubits - 1 - t0)
    s1 = 1 << (num_qubits - 1 - t1)
    dim = psi.shape[0]
    for i in range(dim):
        if (i & s0) == 0 and (i & s1) == 0:
            i00 = i
            i01 = i + s1
            i10 = i + s0
            i11 = i + s0 + s1
            a0 = psi[i00]
            a1 = psi[i01]
            a2 = psi[i10]
            a3 = psi[i11]
            psi[i00] = mat[0, 0] * a0 + mat[0, 1] * a1 + mat[0, 2] * a2 + mat[0, 3] * a3
            psi[i01] = mat[1, 0] * a0 + mat[1, 1] * a1 + mat[1, 2] * a2 + mat[1, 3] * a3
            psi[i10] = mat[2, 0] * a0 + mat[2, 1] * a1 + mat[2, 2] * a2 + mat[2, 3] * a3
            psi[i11] = mat[3, 0] * a0 + mat[3, 1] * a1 + mat[3, 2] * a2 + mat[3, 3] * a3


def _apply_pauli(psi, pauli, target, num_qubits):
    # pauli: 1 = X, 2 = Y, 3 = Z
    if pauli == 1:
        _apply_1q(psi, 0.0 + 0.0j, 1.0 + 0.0j, 1.0 + 0.0j, 0.0 + 0.0j, target, num_qubits)
    elif pauli == 2:
        _apply_1q(psi, 0.0 + 0.0j, -1.0j, 1.0j, 0.0 + 0.0j, target, num_qubits)
    elif pauli == 3:
        _apply_1q(psi, 1.0 + 0.0j, 0.0 + 0.0j, 0.0 + 0.0j, -1.0 + 0.0j, target, num_qubits)


def run_error_trajectories(mats, arity, t0s, t1s, num_qubits, err_codes, u_out):
    """Run one trajectory per row of ``err_codes`` and sample one outcome each.

    mats: (G, 4, 4) complex gate matrices (1q gates in the top-left block).
    arity: (G,) int8, 1 or 2 targets per gate.
    err_codes: (S, G) int8; 0 = clean, 1..3 single-qubit Pauli code, for
        two-qubit gates 1..15 encodes (code // 4, code % 4) on the targets.
    u_out: (S,) uniforms used to draw the measured outcome per shot.
    """
    n_shots = err_codes.shape[0]
    n_gates = mats.shape[0]
    dim = 1 << num_qubits
    out = np.empty(n_shots, np.int64)
    psi = np.empty(dim, np.complex128)
    for s in range(n_shots):
        psi[:] = 0.0
        psi[0] = 1.0
        for g in range(n_gates):
            if arity[g] == 1:
                _apply_1q(
                    psi,
                    mats[g, 0, 0], mats[g, 0, 1], mats[g, 1, 0], mats[g, 1, 1],
                    t0s[g], num_qubits,
                )
            else:
                _apply_2q(psi, mats[g], t0s[g], t1s[g], num_qubits)
            code = err_codes[s, g]
            if code != 0:
                if arity[g] == 1:
                    _apply_pauli(psi, code, t0s[g], num_qubits)
                else:
                    _apply_pauli(psi, code // 4, t0s[g], num_qubits)
                    _apply_pauli(psi, code % 4, t1s[g], num_qubits)
        acc = 0.0
        u = u_out[s]
        o = dim - 1
        for i in range(dim):
            p = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
            acc += p
            if u < acc:
                o = i
                break
        out[s] = o
    return out


if NUMBA_ENABLED and numba is not None:
    _apply_1q = numba.njit(cache=True)(_apply_1q)
    _apply_2q = numba.njit(cache=True)(_apply_2q)
    _apply_pauli = numba.njit(cache=True)(_apply_pauli)
    run_error_trajectories = numba.njit(cache=True)(run_error_trajectories)
