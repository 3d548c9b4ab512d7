import numpy as np
import pytest

from magsqueeze.bath import BathState, bath_from_params, resonant_wavelength
from magsqueeze.couplings import build_couplings, coupling_oracle
from magsqueeze.errors import ConfigError
from magsqueeze.numerics import bessel_j0, bessel_y0
from magsqueeze.params import ArrayGeometry, PhysicalParams

P = PhysicalParams()
K_Q, LAMBDA = resonant_wavelength(P)
J0_FIRST_ZERO = 2.404825557695773


def couplings_for(n=2, a=0.5, r=0.25, params=P, **kw):
    bs = bath_from_params(params, r_override=r)
    return build_couplings(ArrayGeometry.chain(n, a), params, bs, **kw)


class TestClosedForms:
    def test_isolated_relaxation_rate(self):
        # nu = 75 Hz and 100 MHz detuning give the 8.2 Hz on-site rate
        cs = couplings_for(r=0.0)
        assert cs.gamma_pm[0, 0] == pytest.approx(8.2, abs=0.4)
        assert cs.gamma0 == cs.gamma_pm[0, 0]

    def test_pair_channels_vanish_unsqueezed(self):
        cs = couplings_for(r=0.0)
        assert np.all(cs.gamma_pp == 0)
        assert np.all(cs.gamma_mm == 0)
        assert np.all(cs.gamma_mp == 0)

    def test_emission_zero_at_bessel_node(self):
        cs = couplings_for(a=J0_FIRST_ZERO)
        assert cs.gamma_pm[0, 1] == pytest.approx(0.0, abs=1e-10 * cs.gamma0)

    def test_j_diagonal_zero(self):
        cs = couplings_for(n=4, a=0.7)
        assert np.all(np.diag(cs.j) == 0)

    def test_exchange_matches_kernel(self):
        cs = couplings_for(a=0.8)
        assert cs.j[0, 1] == pytest.approx(-0.5 * cs.gamma0 * bessel_y0(0.8))

    def test_finite_distance_factor(self):
        cs0 = couplings_for()
        csd = couplings_for(finite_distance=True)
        factor = np.exp(-2.0 * P.distance_cm / LAMBDA)
        assert csd.gamma_pm[0, 1] == pytest.approx(factor * cs0.gamma_pm[0, 1])
        assert csd.j[0, 1] == pytest.approx(factor * cs0.j[0, 1])

    def test_coincident_qubits_rejected(self):
        bs = bath_from_params(P, r_override=0.1)
        geo = ArrayGeometry(positions=np.array([[0.0, 0.0], [1.0, 0.0]]))
        object.__setattr__(geo, "positions", np.zeros((2, 2)))  # bypass ctor check
        with pytest.raises(ConfigError, match="coincident"):
            build_couplings(geo, P, bs)


class TestInvariants:
    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("r", [0.0, 0.25, 1.0])
    def test_random_geometries(self, seed, r):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        geo = ArrayGeometry(positions=rng.uniform(0.0, 3.0, size=(n, 2)))
        bs = bath_from_params(P, r_override=r)
        cs = build_couplings(geo, P, bs)

        for mat in (cs.j, cs.gamma_mp, cs.gamma_pm, cs.gamma_pp, cs.gamma_mm):
            assert np.allclose(mat, mat.T, atol=0)
        assert np.array_equal(cs.gamma_pp, np.conj(cs.gamma_mm))
        if bs.N_kq > 0:
            ratio = cs.gamma_pm / cs.gamma_mp
            assert np.allclose(ratio, (bs.N_kq + 1.0) / bs.N_kq)
        assert np.all(np.diag(cs.j) == 0)
        block = cs.dissipation_block()
        assert np.allclose(block, block.conj().T)
        floor = -1e-10 * np.linalg.norm(block)
        assert np.min(np.linalg.eigvalsh(block)) >= floor

    def test_scaling_linear_in_nu(self):
        cs1 = couplings_for()
        cs3 = couplings_for(params=PhysicalParams(nu_characteristic=3 * 75.0))
        for a, b in [
            (cs1.j, cs3.j), (cs1.gamma_pm, cs3.gamma_pm),
            (cs1.gamma_mp, cs3.gamma_mp), (cs1.gamma_pp, cs3.gamma_pp),
        ]:
            assert np.allclose(3.0 * a, b, rtol=1e-13)

    def test_geometry_digest_recorded(self):
        cs = couplings_for()
        assert cs.geometry_digest == ArrayGeometry.chain(2, 0.5).digest()


class TestOracle:
    @pytest.mark.parametrize("r", [0.0, 0.25, 1.0])
    def test_dissipative_channels(self, r):
        bs = bath_from_params(P, r_override=r)
        cs = couplings_for(r=r)
        g0 = cs.gamma0
        closed = {
            "pm": lambda rho: g0 * (bs.N_kq + 1.0) * bessel_j0(rho),
            "mp": lambda rho: g0 * bs.N_kq * bessel_j0(rho),
            "pp": lambda rho: g0 * np.conj(bs.M_kq) * bessel_j0(rho),
            "mm": lambda rho: g0 * bs.M_kq * bessel_j0(rho),
        }
        rng = np.random.default_rng(17)
        for rho in np.concatenate([[0.0], rng.uniform(0.05, 3.0, 4)]):
            for ch, form in closed.items():
                got = coupling_oracle(ch, rho, P, bs)
                want = form(rho)
                assert abs(got - want) <= max(0.01 * abs(want), 1e-3 * g0)

    def test_exchange_channel(self):
        bs = bath_from_params(P, r_override=0.25)
        cs = couplings_for()
        g0 = cs.gamma0
        for rho in (0.05, 0.9, 2.3):
            got = coupling_oracle("J", rho, P, bs)
            want = -0.5 * g0 * bessel_y0(rho)
            assert abs(got - want) <= max(0.01 * abs(want), 1e-3 * g0)

    def test_exchange_independent_of_squeezing(self):
        a = coupling_oracle("J", 0.6, P, bath_from_params(P, r_override=0.0))
        b = coupling_oracle("J", 0.6, P, bath_from_params(P, r_override=1.0))
        assert a == b

    def test_pair_exchange_vanishes(self):
        bs = bath_from_params(P, r_override=1.0)
        g0 = couplings_for(r=1.0).gamma0
        for ch in ("Jpp", "Jmm"):
            assert abs(coupling_oracle(ch, 0.8, P, bs)) < 1e-3 * g0

    def test_on_site_rate_matches(self):
        bs = bath_from_params(P, r_override=0.0)
        g0 = couplings_for(r=0.0).gamma0
        got = coupling_oracle("pm", 0.0, P, bs)
        assert abs(got - g0) < 0.01 * g0

    def test_unknown_channel(self):
        bs = BathState.from_squeezing(0.1)
        with pytest.raises(ConfigError):
            coupling_oracle("zz", 0.5, P, bs)

    def test_pv_quadrature_density_converged(self):
        bs = bath_from_params(P, r_override=0.0)
        a = coupling_oracle("J", 0.45, P, bs, n_scale=1.0)
        b = coupling_oracle("J", 0.45, P, bs, n_scale=2.0)
        assert abs(a - b) < 1e-4 * abs(a)
