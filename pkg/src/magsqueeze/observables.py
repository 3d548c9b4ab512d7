"""Collective-spin observables: mean spin, perpendicular variance, the
Wineland squeezing parameter, collective relaxation rate, and standard
initial states.

Spin operators use the Pauli convention S^eta = sum_i sigma_i^eta (eigenvalues
+-1 per qubit), so a coherent spin state has |<S>| = N and perpendicular
variance N, giving xi_R^2 = 1 exactly.  xi_R^2 itself is convention-invariant.
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import QubitState
from .errors import MeanSpinUndefinedError
from .operators import collective_spin_ops

MEAN_SPIN_FLOOR = 1e-8  # relative to N


@dataclass(frozen=True)
class SpinSummary:
    """Mean spin, minimum perpendicular variance, and Wineland xi_R^2."""

    mean_spin: np.ndarray     # (3,), Pauli convention
    min_perp_var: float
    xi_r_squared: float
    squeezing_angle: float    # rad, minimizing direction in the (e1, e2) frame


def _as_rho(state):
    if isinstance(state, QubitState):
        return state.rho, state.n_qubits
    rho = np.asarray(state, dtype=complex)
    return rho, int(np.log2(rho.shape[0]))


def perpendicular_frame(direction):
    """Deterministic orthonormal pair (e1, e2) perpendicular to `direction`.

    e1 is the lab x-hat Gram-Schmidt-projected off the mean-spin axis,
    falling back to y-hat when the two are parallel; e2 completes the
    right-handed triad.
    """
    n_hat = np.asarray(direction, dtype=float)
    n_hat = n_hat / np.linalg.norm(n_hat)
    seed = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(seed, n_hat)) > 1.0 - 1e-12:
        seed = np.array([0.0, 1.0, 0.0])
    e1 = seed - np.dot(seed, n_hat) * n_hat
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(n_hat, e1)
    return e1, e2


def collective_spin(state):
    """(<S_x>, <S_y>, <S_z>) as a real 3-vector."""
    rho, n = _as_rho(state)
    ops = collective_spin_ops(n)
    vals = np.array([np.trace(rho @ op) for op in ops])
    if np.max(np.abs(vals.imag)) > 1e-10 * max(1.0, np.max(np.abs(vals.real))):
        raise ValueError("collective spin came out complex; state is not Hermitian")
    return vals.real


def perpendicular_covariance(rho, spin, n_qubits):
    """Symmetrized 2x2 covariance of the spin components perpendicular to
    `spin` (taken along z-hat if the mean spin vanishes)."""
    norm = np.linalg.norm(spin)
    direction = spin / norm if norm > 0 else np.array([0.0, 0.0, 1.0])
    e1, e2 = perpendicular_frame(direction)
    sx, sy, sz = collective_spin_ops(n_qubits)
    s1 = e1[0] * sx + e1[1] * sy + e1[2] * sz
    s2 = e2[0] * sx + e2[1] * sy + e2[2] * sz
    m1 = float(np.real(np.trace(rho @ s1)))
    m2 = float(np.real(np.trace(rho @ s2)))
    c11 = np.real(np.trace(rho @ (s1 @ s1))) - m1 * m1
    c22 = np.real(np.trace(rho @ (s2 @ s2))) - m2 * m2
    c12 = 0.5 * np.real(np.trace(rho @ (s1 @ s2 + s2 @ s1))) - m1 * m2
    return np.array([[c11, c12], [c12, c22]])


def wineland_xi2(state):
    """Wineland squeezing parameter xi_R^2 = N * min perpendicular variance
    over the squared mean-spin length, with the minimizing angle.

    Raises MeanSpinUndefinedError when |<S>| <= 1e-8 N (no mean-spin
    direction, hence no perpendicular plane).
    """
    rho, n = _as_rho(state)
    spin = collective_spin(state)
    norm = np.linalg.norm(spin)
    if norm <= MEAN_SPIN_FLOOR * n:
        raise MeanSpinUndefinedError(
            f"|<S>| = {norm:.3e} is too small to define the squeezing plane"
        )
    cov = perpendicular_covariance(rho, spin, n)
    vals, vecs = np.linalg.eigh(cov)
    min_var = float(vals[0])
    angle = float(np.arctan2(vecs[1, 0], vecs[0, 0])) % np.pi
    return SpinSummary(
        mean_spin=spin,
        min_perp_var=min_var,
        xi_r_squared=n * min_var / norm ** 2,
        squeezing_angle=angle,
    )


def relaxation_rate(state, generator):
    """Collective relaxation rate -(1/2) d<S_z>/d(Gamma_0 t), per qubit.

    Evaluated as -(1/2) Tr[S_z L(rho)] / N with the dimensionless generator,
    so N independently decaying excited qubits give exactly 1 at t = 0.
    """
    rho, n = _as_rho(state)
    _, _, sz = collective_spin_ops(n)
    return float(-0.5 * np.real(np.trace(sz @ generator.action(rho))) / n)


def initial_state(kind, n_qubits, theta=None, phi=0.0):
    """Product initial states: 'all_excited', 'all_ground', or 'css'.

    The coherent spin state 'css' points along (theta, phi) on the Bloch
    sphere; basis ordering per qubit is {|up>, |down>} with sigma_z |up> =
    +|up>.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if kind == "all_excited":
        single = np.array([1.0, 0.0], dtype=complex)
    elif kind == "all_ground":
        single = np.array([0.0, 1.0], dtype=complex)
    elif kind == "css":
        if theta is None:
            raise ValueError("css initial state needs a polar angle theta")
        single = np.array(
            [np.cos(0.5 * theta), np.exp(1j * phi) * np.sin(0.5 * theta)],
            dtype=complex,
        )
    else:
        raise ValueError(f"unknown initial state kind {kind!r}")
    psi = np.array([1.0], dtype=complex)
    for _ in range(n_qubits):
        psi = np.kron(psi, single)
    rho = np.outer(psi, psi.conj())
    return QubitState(rho, n_qubits, time=0.0)
