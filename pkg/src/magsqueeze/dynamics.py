"""Effective Hamiltonian, dissipator, time evolution, and steady states.

Time is dimensionless throughout: the generator is pre-divided by the
single-qubit vacuum rate Gamma_0 = nu * prefactor, so trajectories are
parameterized by Gamma_0 t and the matrix entries are O(1).

The dissipator is built in either of two equivalent forms:

* ``jump_operator``: weights W_ab = gamma_pm / (N+1) with Bogoliubov-rotated
  jumps C_a = cosh(r) sigma_a^- + sinh(r) e^{i phi} sigma_a^+;
* ``four_channel``: the channel sum over the stored coupling matrices.

The channel-label convention is pinned by expanding the jump form: gamma_pm
(weight N+1) multiplies the sigma^- rho sigma^+ emission structure, gamma_mp
(weight N) the sigma^+ rho sigma^- absorption structure, and the anomalous
sigma^-+ rho sigma^-+ structures carry -gamma_pp and -gamma_mm.  Reading the
superscripts the other way round would make the vacuum pump instead of damp;
the equivalence of the two modes is asserted in the test suite.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSteadyStateError, StateInvariantError
from .numerics import eig_smallest, integrate_ode
from .operators import site_lower, site_raise

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_FLOOR = -1e-8

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10

MAX_QUBITS = 8
MAX_STEADY_QUBITS = 6


@dataclass
class QubitState:
    """Density matrix of the qubit array at a dimensionless time Gamma_0 t.

    Invariants: Hermitian to 1e-10 (max norm), unit trace to 1e-9, and
    approximately positive (eigenvalues above -1e-8).  Positivity is
    monitored and warned about, never silently repaired.
    """

    rho: np.ndarray
    n_qubits: int
    time: float = 0.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        dim = 2 ** self.n_qubits
        if rho.shape != (dim, dim):
            raise ValueError(f"rho must be {dim} x {dim} for {self.n_qubits} qubits")
        self.rho = rho

    def hermiticity_error(self):
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def trace_error(self):
        return float(abs(np.trace(self.rho) - 1.0))

    def min_eigenvalue(self):
        return float(np.min(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))))

    def check(self):
        """Validate the invariants; raises StateInvariantError, warns on
        positivity drift inside the monitored band."""
        herm = self.hermiticity_error()
        if herm > HERMITICITY_TOL:
            raise StateInvariantError(f"Hermiticity violated: {herm:.3e}")
        tr = self.trace_error()
        if tr > TRACE_TOL:
            raise StateInvariantError(f"trace deviates from 1 by {tr:.3e}")
        mineig = self.min_eigenvalue()
        if mineig < POSITIVITY_FLOOR:
            raise StateInvariantError(f"negative eigenvalue {mineig:.3e}")
        if mineig < 0.0:
            warnings.warn(
                f"density matrix marginally non-positive (min eig {mineig:.2e})",
                RuntimeWarning,
                stacklevel=2,
            )
        return self


@dataclass
class Trajectory:
    """Time grid plus per-step observables of one evolution."""

    t: np.ndarray                 # Gamma_0 t
    mean_spin: np.ndarray         # (n, 3)
    min_perp_var: np.ndarray      # (n,)
    inv_xi2: np.ndarray           # (n,), 0 where the mean spin vanishes
    relaxation: np.ndarray        # (n,), -(1/2) d<S_z>/d(G0 t) / N
    min_eig: np.ndarray           # (n,)
    trace_err: np.ndarray         # (n,)
    herm_err: np.ndarray          # (n,)
    final_state: QubitState
    states: list = field(default_factory=list)  # populated when keep_states

    @property
    def xi2(self):
        """Squeezing parameter where defined (inf when the spin vanishes)."""
        with np.errstate(divide="ignore"):
            return np.where(self.inv_xi2 > 0, 1.0 / self.inv_xi2, np.inf)


class Generator:
    """Master-equation generator, pre-scaled by 1/Gamma_0.

    Holds the effective Hamiltonian and the dissipator as a list of
    (weight, A, B) triples acting as A rho B, plus the collected
    anticommutator matrix; `action` applies d rho / d(Gamma_0 t) and
    `liouvillian` materializes the row-major-vectorized superoperator.
    """

    def __init__(self, n_qubits, h_eff, terms, mode):
        self.n_qubits = n_qubits
        self.mode = mode
        self.h_eff = h_eff
        self.terms = terms
        dim = 2 ** n_qubits
        g = np.zeros((dim, dim), dtype=complex)
        for w, a_op, b_op in terms:
            g += w * (b_op @ a_op)
        self._anticom = g
        self._liouvillian = None

    def action(self, rho):
        out = -1j * (self.h_eff @ rho - rho @ self.h_eff)
        for w, a_op, b_op in self.terms:
            out += w * (a_op @ rho @ b_op)
        out -= 0.5 * (self._anticom @ rho + rho @ self._anticom)
        return out

    def liouvillian(self):
        """Dense 4^N x 4^N matrix L with vec(drho/dt) = L vec(rho), row-major."""
        if self._liouvillian is None:
            dim = 2 ** self.n_qubits
            ident = np.eye(dim, dtype=complex)
            mat = -1j * (
                np.kron(self.h_eff, ident) - np.kron(ident, self.h_eff.T)
            )
            for w, a_op, b_op in self.terms:
                mat += w * np.kron(a_op, b_op.T)
            mat -= 0.5 * (
                np.kron(self._anticom, ident) + np.kron(ident, self._anticom.T)
            )
            self._liouvillian = mat
        return self._liouvillian


def build_generator(couplings, mode="jump_operator"):
    """Generator from a CouplingSet, scaled to dimensionless time.

    The squeezed-bath parameters are recovered from the matrices themselves
    (occupation from the absorption/emission ratio, the anomalous moment from
    the on-site pair channel), so the two modes are built from identical
    information.
    """
    if mode not in ("jump_operator", "four_channel"):
        raise ValueError(f"unknown generator mode {mode!r}")
    n = couplings.n_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"dense representation limited to {MAX_QUBITS} qubits")
    g0 = couplings.gamma0
    occupation = couplings.gamma_mp[0, 0] / g0       # N = sinh^2 r
    anomalous = couplings.gamma_mm[0, 0] / g0        # M = -cosh sinh e^{i phi}

    lowers = [site_lower(i, n) for i in range(n)]
    raises_ = [site_raise(i, n) for i in range(n)]

    h_eff = np.zeros((2 ** n, 2 ** n), dtype=complex)
    jmat = couplings.j / g0
    for a in range(n):
        for b in range(n):
            if a != b and jmat[a, b] != 0.0:
                h_eff += jmat[a, b] * (raises_[a] @ lowers[b])

    terms = []
    if mode == "jump_operator":
        w = couplings.gamma_pm / (g0 * (occupation + 1.0))  # J0 weight matrix
        vals, vecs = np.linalg.eigh(0.5 * (w + w.T))
        cosh_r = np.sqrt(occupation + 1.0)
        sinh_phase = -anomalous / cosh_r
        jumps = []
        for m in range(n):
            if vals[m] <= 1e-14:
                continue
            c_m = np.zeros((2 ** n, 2 ** n), dtype=complex)
            for a in range(n):
                c_m += vecs[a, m] * (cosh_r * lowers[a] + sinh_phase * raises_[a])
            jumps.append((vals[m], c_m))
        for w_m, c_m in jumps:
            terms.append((w_m, c_m, c_m.conj().T))
    else:
        pm = couplings.gamma_pm / g0
        mp = couplings.gamma_mp / g0
        pp = couplings.gamma_pp / g0
        mm = couplings.gamma_mm / g0
        for a in range(n):
            # collect the beta sums so the action costs O(N) matmuls
            terms.append((1.0, lowers[a], _collect(pm[a], raises_)))
            terms.append((1.0, raises_[a], _collect(mp[a], lowers)))
            terms.append((-1.0, raises_[a], _collect(mm[a], raises_)))
            terms.append((-1.0, lowers[a], _collect(pp[a], lowers)))
    return Generator(n, h_eff, terms, mode)


def _collect(row, ops):
    out = np.zeros_like(ops[0])
    for coeff, op in zip(row, ops):
        out += coeff * op
    return out


def evolve(rho0, generator, t_grid, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, keep_states=False):
    """Evolve a state over a grid of Gamma_0 t values; returns a Trajectory.

    Adaptive embedded Runge-Kutta with dense output at the grid points; each
    output state is re-validated against the QubitState invariants (an
    out-of-band violation aborts the run).
    """
    from .observables import collective_spin_ops, perpendicular_covariance

    if isinstance(rho0, QubitState):
        rho_init = rho0.rho
        n = rho0.n_qubits
    else:
        rho_init = np.asarray(rho0, dtype=complex)
        n = int(np.log2(rho_init.shape[0]))
    if n != generator.n_qubits:
        raise ValueError("state and generator have different qubit counts")
    QubitState(rho_init, n).check()

    t_grid = np.asarray(t_grid, dtype=float)
    dim = 2 ** n

    def rhs(_t, y):
        return generator.action(y.reshape(dim, dim)).ravel()

    if t_grid.size == 1:
        flat = rho_init.ravel()[None, :].copy()
    else:
        flat = integrate_ode(rhs, rho_init.ravel(), t_grid, rtol=rtol, atol=atol)

    sx, sy, sz = collective_spin_ops(n)
    npts = t_grid.size
    mean_spin = np.empty((npts, 3))
    min_perp = np.empty(npts)
    inv_xi2 = np.empty(npts)
    relax = np.empty(npts)
    min_eig = np.empty(npts)
    trace_err = np.empty(npts)
    herm_err = np.empty(npts)
    states = []

    abort_tol = max(1e-6, 1e4 * atol)
    for i in range(npts):
        rho = flat[i].reshape(dim, dim)
        state = QubitState(rho, n, time=float(t_grid[i]))
        trace_err[i] = state.trace_error()
        herm_err[i] = state.hermiticity_error()
        min_eig[i] = state.min_eigenvalue()
        if trace_err[i] > abort_tol or herm_err[i] > abort_tol:
            raise StateInvariantError(
                f"invariant violation at Gamma_0 t = {t_grid[i]:.6g}: "
                f"trace {trace_err[i]:.3e}, hermiticity {herm_err[i]:.3e}"
            )
        if min_eig[i] < POSITIVITY_FLOOR:
            raise StateInvariantError(
                f"negative eigenvalue {min_eig[i]:.3e} at Gamma_0 t = {t_grid[i]:.6g}"
            )
        spin = np.real(
            np.array([np.trace(rho @ sx), np.trace(rho @ sy), np.trace(rho @ sz)])
        )
        mean_spin[i] = spin
        norm = np.linalg.norm(spin)
        cov = perpendicular_covariance(rho, spin, n)
        lam_min = float(np.min(np.linalg.eigvalsh(cov)))
        min_perp[i] = lam_min
        if norm > 1e-8 * n and lam_min > 0:
            inv_xi2[i] = norm ** 2 / (n * lam_min)
        else:
            inv_xi2[i] = 0.0
        relax[i] = -0.5 * np.real(np.trace(sz @ generator.action(rho))) / n
        if keep_states:
            states.append(state)

    final = QubitState(flat[-1].reshape(dim, dim), n, time=float(t_grid[-1]))
    return Trajectory(
        t=t_grid.copy(),
        mean_spin=mean_spin,
        min_perp_var=min_perp,
        inv_xi2=inv_xi2,
        relaxation=relax,
        min_eig=min_eig,
        trace_err=trace_err,
        herm_err=herm_err,
        final_state=final,
        states=states,
    )


def steady_state(generator):
    """Stationary state as the null vector of the vectorized Liouvillian.

    The eigenvalue of smallest modulus must be isolated: a second eigenvalue
    within 1e-8 of the spectral radius signals a degenerate null space and
    raises DegenerateSteadyStateError.  The null vector is reshaped,
    Hermitized, and trace-normalized.
    """
    if generator.n_qubits > MAX_STEADY_QUBITS:
        raise ValueError(
            f"dense null-space solve limited to {MAX_STEADY_QUBITS} qubits"
        )
    lmat = generator.liouvillian()
    vals, vecs, radius = eig_smallest(lmat, n=2, return_radius=True)
    if abs(vals[1]) < 1e-8 * radius:
        raise DegenerateSteadyStateError(
            f"two near-null eigenvalues ({vals[0]:.3e}, {vals[1]:.3e}); "
            "steady state is not unique"
        )
    dim = 2 ** generator.n_qubits
    rho = vecs[:, 0].reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho)
    state = QubitState(rho, generator.n_qubits, time=np.inf)
    mineig = state.min_eigenvalue()
    if mineig < POSITIVITY_FLOOR:
        raise StateInvariantError(f"steady state has negative eigenvalue {mineig:.3e}")
    return state
