"""Pauli algebra and site-embedding helpers for the 2^N qubit space."""

from functools import lru_cache

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |down><up|
SIGMA_PLUS = SIGMA_MINUS.conj().T
IDENTITY_2 = np.eye(2, dtype=complex)


def kron_chain(ops):
    out = np.array([[1.0]], dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def site_operator(op, site, n_qubits):
    """Embed a single-qubit operator at `site` in the N-qubit space."""
    return kron_chain([op if k == site else IDENTITY_2 for k in range(n_qubits)])


@lru_cache(maxsize=128)
def _site_cached(kind, site, n_qubits):
    table = {
        "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z,
        "minus": SIGMA_MINUS, "plus": SIGMA_PLUS,
    }
    return site_operator(table[kind], site, n_qubits)


def site_lower(site, n_qubits):
    return _site_cached("minus", site, n_qubits)


def site_raise(site, n_qubits):
    return _site_cached("plus", site, n_qubits)


def site_pauli(axis, site, n_qubits):
    return _site_cached(axis, site, n_qubits)


@lru_cache(maxsize=16)
def collective_spin_ops(n_qubits):
    """(S_x, S_y, S_z) with S_eta = sum_i sigma_i^eta (Pauli convention)."""
    dim = 2 ** n_qubits
    sx = np.zeros((dim, dim), dtype=complex)
    sy = np.zeros((dim, dim), dtype=complex)
    sz = np.zeros((dim, dim), dtype=complex)
    for i in range(n_qubits):
        sx += site_pauli("x", i, n_qubits)
        sy += site_pauli("y", i, n_qubits)
        sz += site_pauli("z", i, n_qubits)
    return sx, sy, sz
