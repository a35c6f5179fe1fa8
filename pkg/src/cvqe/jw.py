"""Jordan-Wigner layer: Hubbard Hamiltonian as Pauli strings, dense matrices,
occupation-sector restriction, and dense diagonalization.

This module is the brute-force oracle the rest of the package is checked
against. Fermionic modes are ordered spin-up sites first, then spin-down
(mode m in 0..2n-1; site k spin-up is mode k-1, spin-down is mode n+k-1).
An explicit ``ordering`` permutation maps modes to qubit positions, which
makes the Z-string dependence of matrix elements testable.

A hopping term between qubit positions a < b maps to
(1/2)(X_a X_b + Y_a Y_b) Z_{a+1} ... Z_{b-1}; an onsite term on positions
a, b maps to (1/4)(I - Z_a)(I - Z_b).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import HubbardSpec

MAX_DENSE_QUBITS = 12


@dataclass
class PauliHamiltonian:
    """Weighted Pauli strings; char position in each string = qubit index."""

    num_qubits: int
    terms: list[tuple[float, str]]

    def __post_init__(self):
        for coef, s in self.terms:
            if len(s) != self.num_qubits or any(c not in "IXYZ" for c in s):
                raise ValueError(f"bad Pauli string {s!r}")
            if abs(complex(coef).imag) > 0:
                raise ValueError("coefficients must be real (Hermiticity)")

    def dense(self) -> np.ndarray:
        return dense_hamiltonian(self)


def _string_masks(s: str):
    nq = len(s)
    flip = 0
    zmask = 0
    n_y = 0
    for q, c in enumerate(s):
        bit = 1 << (nq - 1 - q)
        if c in "XY":
            flip |= bit
        if c in "YZ":
            zmask |= bit
        if c == "Y":
            n_y += 1
    return flip, zmask, n_y


def dense_hamiltonian(h: PauliHamiltonian) -> np.ndarray:
    """Sum of Pauli-string matrices, built column-wise with bit arithmetic."""
    if h.num_qubits > MAX_DENSE_QUBITS:
        raise MemoryError(f"refusing dense build beyond {MAX_DENSE_QUBITS} qubits")
    dim = 1 << h.num_qubits
    cols = np.arange(dim)
    out = np.zeros((dim, dim), dtype=complex)
    for coef, s in h.terms:
        flip, zmask, n_y = _string_masks(s)
        parity = np.bitwise_count(cols & zmask).astype(np.int64)
        amp = coef * (1j ** n_y) * np.where(parity & 1, -1.0, 1.0)
        out[cols ^ flip, cols] += amp
    if not np.allclose(out, out.conj().T, atol=1e-12):
        raise ValueError("assembled matrix is not Hermitian")
    return out


def _positions(n: int, ordering=None) -> list[int]:
    if ordering is None:
        return list(range(2 * n))
    ordering = list(ordering)
    if sorted(ordering) != list(range(2 * n)):
        raise ValueError("ordering must be a permutation of 0..2n-1")
    return ordering


def _pauli_string(nq: int, ops: dict[int, str]) -> str:
    return "".join(ops.get(q, "I") for q in range(nq))


def _hopping_terms(nq: int, a: int, b: int, coef: float) -> list[tuple[float, str]]:
    a, b = min(a, b), max(a, b)
    string = {q: "Z" for q in range(a + 1, b)}
    terms = []
    for p in ("X", "Y"):
        ops = dict(string)
        ops[a] = p
        ops[b] = p
        terms.append((coef / 2.0, _pauli_string(nq, ops)))
    return terms


def _onsite_terms(nq: int, a: int, b: int, coef: float) -> list[tuple[float, str]]:
    # (coef/4) (I - Z_a)(I - Z_b)
    return [
        (coef / 4.0, _pauli_string(nq, {})),
        (-coef / 4.0, _pauli_string(nq, {a: "Z"})),
        (-coef / 4.0, _pauli_string(nq, {b: "Z"})),
        (coef / 4.0, _pauli_string(nq, {a: "Z", b: "Z"})),
    ]


def _merge(nq: int, terms) -> list[tuple[float, str]]:
    acc: dict[str, float] = {}
    for coef, s in terms:
        acc[s] = acc.get(s, 0.0) + coef
    return [(c, s) for s, c in acc.items() if abs(c) > 1e-15]


def hopping_single_spin(n: int, edges, ordering=None) -> PauliHamiltonian:
    """JW image of the one-spin hopping operator sum_{(i,j) in E} h_ij on n qubits."""
    if ordering is None:
        pos = list(range(n))
    else:
        pos = list(ordering)
        if sorted(pos) != list(range(n)):
            raise ValueError("ordering must be a permutation of 0..n-1")
    terms = []
    for i, j in edges:
        terms.extend(_hopping_terms(n, pos[i - 1], pos[j - 1], 1.0))
    return PauliHamiltonian(n, _merge(n, terms))


def jordan_wigner_hamiltonian(spec: HubbardSpec, ordering=None) -> PauliHamiltonian:
    """Full 2n-qubit Hubbard Hamiltonian under the Jordan-Wigner transform."""
    n = spec.n
    nq = 2 * n
    pos = _positions(n, ordering)
    terms: list[tuple[float, str]] = []
    for i, j in spec.edges:
        for spin_off in (0, n):
            a = pos[spin_off + i - 1]
            b = pos[spin_off + j - 1]
            terms.extend(_hopping_terms(nq, a, b, -spec.t))
    for k in range(1, n + 1):
        terms.extend(_onsite_terms(nq, pos[k - 1], pos[n + k - 1], spec.U))
    for k, w in enumerate(spec.site_weights, start=1):
        if w != 0.0:
            # w * n_{k,sigma} = (w/2)(I - Z) on each spin's mode
            for spin_off in (0, n):
                a = pos[spin_off + k - 1]
                terms.append((w / 2.0, _pauli_string(nq, {})))
                terms.append((-w / 2.0, _pauli_string(nq, {a: "Z"})))
    return PauliHamiltonian(nq, _merge(nq, terms))


@dataclass
class SectorMatrix:
    dimension: int
    matrix: np.ndarray
    labels: list[tuple[tuple[int, ...], tuple[int, ...]]]


def sector_restrict(matrix: np.ndarray, n_up: int, n_down: int, n: int, ordering=None) -> SectorMatrix:
    """Principal submatrix on basis states with fixed per-spin occupation.

    Labels are (occupied up sites, occupied down sites); rows and columns
    are sorted by label, so weight-(1,1) sectors line up with the
    compressed |i>|j> basis directly.
    """
    nq = 2 * n
    if matrix.shape != (1 << nq, 1 << nq):
        raise ValueError("matrix dimension does not match 2^(2n)")
    if not (0 <= n_up <= n and 0 <= n_down <= n):
        raise ValueError(f"impossible occupations ({n_up},{n_down}) for {n} sites")
    pos = _positions(n, ordering)
    up_bits = [1 << (nq - 1 - pos[k]) for k in range(n)]
    down_bits = [1 << (nq - 1 - pos[n + k]) for k in range(n)]
    entries = []
    for b in range(1 << nq):
        up = tuple(k + 1 for k in range(n) if b & up_bits[k])
        down = tuple(k + 1 for k in range(n) if b & down_bits[k])
        if len(up) == n_up and len(down) == n_down:
            entries.append(((up, down), b))
    entries.sort()
    labels = [lab for lab, _ in entries]
    idx = np.array([b for _, b in entries])
    sub = matrix[np.ix_(idx, idx)]
    return SectorMatrix(len(idx), sub, labels)


def ground_state_dense(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimum eigenvalue and unit eigenvector of a dense Hermitian matrix."""
    m = np.asarray(matrix, dtype=complex)
    if m.shape[0] != m.shape[1] or m.shape[0] > 4096:
        raise ValueError("matrix must be square with dimension <= 4096")
    if not np.allclose(m, m.conj().T, atol=1e-10):
        raise ValueError("matrix is not Hermitian")
    vals, vecs = np.linalg.eigh(m)
    return float(vals[0]), vecs[:, 0]
