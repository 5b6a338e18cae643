"""Propagator and receiver-population routes, cross-checked three ways.

The reference route built here is intentionally independent of the
package internals: the many-body Hamiltonian is assembled from explicit
Kronecker products and exponentiated with scipy's Pade expm, so any
convention slip in the fast single-excitation solver shows up as a
disagreement rather than a shared bug.
"""

import numpy as np
import pytest
from scipy.linalg import expm

from spinwire import oracle
from spinwire.chain import ChainSpec, XState, make_thermal_correlated
from spinwire.dynamics import (
    build_effective_hamiltonian,
    eigensystem,
    evolve,
    initial_correlation_matrix,
    populations,
    propagator,
    receiver_population_closed_form,
    receiver_rate_closed_form,
    receiver_series,
    wigner_d_element,
)

# single-qubit operators in (ground, excited) index order
SPLUS = np.array([[0.0, 0.0], [1.0, 0.0]])
SZ = np.diag([-1.0, 1.0])


def _site_op(op, site, n):
    left = np.eye(2 ** (site - 1))
    right = np.eye(2 ** (n - site))
    return np.kron(np.kron(left, op), right)


def _dense_hamiltonian(spec):
    n = spec.n_sites
    h = np.zeros((2 ** n, 2 ** n))
    for s in range(1, n + 1):
        h += spec.omega * _site_op(SZ, s, n)
    for k, j in enumerate(spec.couplings(), start=1):
        hop = _site_op(SPLUS, k, n) @ _site_op(SPLUS.T, k + 1, n)
        h += 2.0 * j * (hop + hop.T)
    return h


def _embed_pair(state, n):
    """Pair state on sites 1-2, vacuum elsewhere, as a dense matrix."""
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    b1, b2 = 1 << (n - 1), 1 << (n - 2)
    idx = {"11": b1 | b2, "10": b1, "01": b2, "00": 0}
    pair = state.as_matrix()  # basis |11>, |10>, |01>, |00>
    labels = ("11", "10", "01", "00")
    for r, lr in enumerate(labels):
        for c, lc in enumerate(labels):
            rho[idx[lr], idx[lc]] = pair[r, c]
    return rho


def _dense_populations(spec, state, t):
    h = _dense_hamiltonian(spec)
    u = expm(-1j * h * t)
    rho = u @ _embed_pair(state, spec.n_sites) @ u.conj().T
    n = spec.n_sites
    diag = np.real(np.diag(rho))
    return np.array(
        [diag[[i for i in range(2 ** n) if i >> (n - s) & 1]].sum()
         for s in range(1, n + 1)]
    )


def _random_x_state(rng):
    weights = rng.dirichlet(np.ones(4))
    a, b, c, d = weights
    z = rng.uniform(0, np.sqrt(b * c)) * np.exp(2j * np.pi * rng.uniform())
    w = rng.uniform(0, np.sqrt(a * d)) * np.exp(2j * np.pi * rng.uniform())
    return XState(a=a, b=b, c=c, d=d, w=w, z=z)


class TestEffectiveHamiltonian:
    def test_structure(self):
        spec = ChainSpec(n_sites=5, omega=0.7)
        ham = build_effective_hamiltonian(spec)
        dense = ham.dense()
        np.testing.assert_allclose(np.diag(dense), [0.7] * 5)
        np.testing.assert_allclose(
            np.diag(dense, 1), 2.0 * np.asarray(spec.couplings())
        )
        np.testing.assert_allclose(dense, dense.T)

    def test_eigensystem_reconstructs(self):
        spec = ChainSpec(n_sites=9)
        es = eigensystem(spec)
        dense = build_effective_hamiltonian(spec).dense()
        rebuilt = (es.vectors * es.values) @ es.vectors.T
        np.testing.assert_allclose(rebuilt, dense, atol=1e-12)


class TestPropagator:
    def test_against_pade_exponential(self):
        spec = ChainSpec(n_sites=8, omega=0.6, j_scale=1.3)
        dense = build_effective_hamiltonian(spec).dense()
        for t in (0.0, 0.4, 2.7, 11.0):
            want = expm(1j * dense * t)
            got = propagator(eigensystem(spec), t)
            np.testing.assert_allclose(got, want, atol=1e-12)

    def test_unitarity_and_group_property(self):
        es = eigensystem(ChainSpec(n_sites=7))
        u1 = propagator(es, 1.1)
        u2 = propagator(es, 2.3)
        np.testing.assert_allclose(u1 @ u1.conj().T, np.eye(7), atol=1e-13)
        np.testing.assert_allclose(u1 @ u2, propagator(es, 3.4), atol=1e-12)

    def test_perfect_transfer_at_period(self):
        # staggered profile swaps the chain ends after one period
        spec = ChainSpec(n_sites=6)
        u = propagator(eigensystem(spec), spec.transfer_period())
        assert abs(u[5, 0]) == pytest.approx(1.0, abs=1e-12)
        assert abs(u[0, 5]) == pytest.approx(1.0, abs=1e-12)


class TestCorrelationMatrixEvolution:
    def test_initial_orientation(self):
        # the inner coherence enters the site-basis matrix conjugated:
        # row = sender, column = partner
        z0 = initial_correlation_matrix(
            XState(a=0, b=0.5, c=0.5, d=0, z=0.25j), 4
        )
        assert z0[0, 0] == pytest.approx(0.5)
        assert z0[1, 1] == pytest.approx(0.5)
        assert z0[0, 1] == pytest.approx(-0.25j)
        assert z0[1, 0] == pytest.approx(0.25j)
        assert np.all(z0[2:, :] == 0) and np.all(z0[:, 2:] == 0)

    def test_populations_match_dense_reference(self):
        rng = np.random.default_rng(42)
        for n in (2, 3, 5, 7):
            spec = ChainSpec(n_sites=n, omega=rng.uniform(0.5, 1.5))
            state = _random_x_state(rng)
            t = rng.uniform(0.1, 2.0 * spec.transfer_period())
            fast = populations(state, eigensystem(spec), np.array([t]))[:, 0]
            dense = _dense_populations(spec, state, t)
            np.testing.assert_allclose(fast, dense, atol=1e-10)

    def test_oracle_module_matches_independent_construction(self):
        spec = ChainSpec(n_sites=5, omega=0.8)
        np.testing.assert_allclose(
            oracle.build_hamiltonian(spec), _dense_hamiltonian(spec), atol=1e-12
        )
        state = make_thermal_correlated(0.4, 0.8, 0.1)
        np.testing.assert_allclose(
            oracle.embed_x_state(state, 5), _embed_pair(state, 5), atol=1e-15
        )
        t = 1.7
        rho = oracle.dense_oracle(spec, state, t)
        u = expm(-1j * _dense_hamiltonian(spec) * t)
        want = u @ _embed_pair(state, 5) @ u.conj().T
        np.testing.assert_allclose(rho, want, atol=1e-10)

    def test_excitation_number_is_conserved(self):
        spec = ChainSpec(n_sites=6)
        state = make_thermal_correlated(0.0, 1.0, 0.2)
        times = np.linspace(0.0, 2.0 * spec.transfer_period(), 40)
        pops = populations(state, eigensystem(spec), times)
        totals = pops.sum(axis=0)
        np.testing.assert_allclose(totals, totals[0], atol=1e-12)

    def test_evolve_checks_dimension(self):
        es = eigensystem(ChainSpec(n_sites=4))
        with pytest.raises(ValueError):
            evolve(np.zeros((3, 3)), es, 1.0)


class TestReceiverSeries:
    def test_matches_population_row(self):
        spec = ChainSpec(n_sites=7)
        state = make_thermal_correlated(0.2, 1.0, 0.1)
        times = np.linspace(0.0, spec.transfer_period(), 25)
        pn, _ = receiver_series(spec, state, times)
        all_pops = populations(state, eigensystem(spec), times)
        np.testing.assert_allclose(pn, all_pops[-1], atol=1e-12)

    def test_rate_matches_finite_differences(self):
        spec = ChainSpec(n_sites=6)
        state = make_thermal_correlated(0.0, 1.0, 0.25)
        times = np.linspace(0.3, 4.0, 9)
        _, rate = receiver_series(spec, state, times)
        eps = 1e-6
        hi, _ = receiver_series(spec, state, times + eps)
        lo, _ = receiver_series(spec, state, times - eps)
        np.testing.assert_allclose(rate, (hi - lo) / (2 * eps), atol=1e-7)


class TestRotationElement:
    """Log-domain matrix elements of the staggered-chain propagator."""

    def test_matches_propagator_without_splitting(self):
        # with omega = 0 the propagator depends only on theta = 4 j t / n
        for n in (3, 6, 11):
            spec = ChainSpec(n_sites=n, omega=0.0)
            es = eigensystem(spec)
            for t in (0.3, 1.1, 2.9):
                u = propagator(es, t)
                theta = 4.0 * t / n
                got = np.array(
                    [[wigner_d_element(n, k, l, theta) for l in range(1, n + 1)]
                     for k in range(1, n + 1)]
                )
                np.testing.assert_allclose(got, u, atol=1e-11)

    def test_symmetric_in_site_indices(self):
        for k, l in ((1, 5), (2, 3), (7, 4)):
            a = wigner_d_element(8, k, l, 0.77)
            b = wigner_d_element(8, l, k, 0.77)
            assert a == pytest.approx(b, abs=1e-13)

    def test_corner_elements_exact_for_long_chains(self):
        # naive factorial ratios overflow near n ~ 170; the log-domain
        # form keeps few-term corner entries machine-exact even when the
        # value itself is vanishingly small
        for n, k, l in ((220, 200, 10), (220, 220, 1), (300, 290, 5)):
            spec = ChainSpec(n_sites=n, omega=0.0)
            u = propagator(eigensystem(spec), 1.3 * n / 4.0)
            got = wigner_d_element(n, k, l, 1.3)
            assert abs(got - u[k - 1, l - 1]) < 1e-13
            assert abs(got) < 1e-20  # deep in the evanescent tail

    def test_row_is_normalized(self):
        # interior entries are alternating sums, so unitarity of a full
        # row is only good to ~1e-8 by n = 60 (documented limitation)
        n, k = 60, 25
        row = np.array(
            [wigner_d_element(n, k, l, 0.9) for l in range(1, n + 1)]
        )
        assert np.linalg.norm(row) == pytest.approx(1.0, abs=1e-7)

    def test_identity_at_zero_angle(self):
        for k in (1, 3, 9):
            assert wigner_d_element(9, k, k, 0.0) == pytest.approx(1.0, abs=0)
            assert wigner_d_element(9, k, (k % 9) + 1, 0.0) == pytest.approx(
                0.0, abs=1e-15
            )


class TestClosedForm:
    def test_population_matches_spectral_route(self):
        rng = np.random.default_rng(3)
        for n in (2, 4, 9, 14):
            spec = ChainSpec(n_sites=n)
            state = _random_x_state(rng)
            times = rng.uniform(0.1, spec.transfer_period(), size=5)
            spectral, _ = receiver_series(spec, state, times)
            theta = 4.0 * times / n
            closed = receiver_population_closed_form(
                n, state.sender_population, state.partner_population,
                state.z.imag, theta,
            )
            np.testing.assert_allclose(closed, spectral, atol=1e-10)

    def test_real_part_of_coherence_is_inert(self):
        # only the imaginary part of the inner coherence can move the
        # receiver population; a purely real coherence behaves like none
        spec = ChainSpec(n_sites=8)
        times = np.linspace(0.1, spec.transfer_period(), 17)
        plain = XState(a=0, b=0.5, c=0.5, d=0, z=0.0)
        real_z = XState(a=0, b=0.5, c=0.5, d=0, z=0.45)
        p0, _ = receiver_series(spec, plain, times)
        p1, _ = receiver_series(spec, real_z, times)
        np.testing.assert_allclose(p1, p0, atol=1e-12)

    def test_rate_matches_finite_differences(self):
        theta = np.linspace(0.05, np.pi - 0.05, 11)
        eps = 1e-7
        for n in (2, 3, 10):
            f = lambda th: receiver_population_closed_form(n, 0.4, 0.35, 0.1, th)
            want = (f(theta + eps) - f(theta - eps)) / (2 * eps)
            got = receiver_rate_closed_form(n, 0.4, 0.35, 0.1, theta)
            np.testing.assert_allclose(got, want, atol=1e-6)

    def test_perfect_arrival_at_pi(self):
        got = receiver_population_closed_form(12, 0.61, 0.2, 0.1, np.pi)
        assert got == pytest.approx(0.61, abs=1e-14)
