import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from catseye.errors import OutOfRange, SingularD
from catseye.galerkin import (CO_QUAD, BasisSpec, Quad, SpectrumTable, assemble_Atilde,
                              assemble_modulational, branch_crossing, coperiodic_spectrum,
                              growth_rate_sweep, growth_rates, modulational_spectrum,
                              solve_generalized, solve_symmetric)

from _reference import ref_column


def test_quad_nodes():
    y, w = CO_QUAD.y_nodes()
    assert y[0] == -20.0 and y[-1] == 20.0 and y.size == 1001
    assert w.sum() == pytest.approx(40.0)
    x, wx = Quad(nx=8).x_nodes()
    assert wx.sum() == pytest.approx(2 * np.pi) and x[0] == 0.0


def test_basis_spec():
    b = BasisSpec(2)
    assert b.size == 25 and len(b.index()) == 25
    assert b.index()[0] == (0, -2) and b.index()[-1] == (4, 2)
    assert b.problem == "CoPeriodicBasis"
    with pytest.raises(OutOfRange):
        BasisSpec(0)


def test_atilde_symmetric_and_decoupled_at_zero():
    A = assemble_Atilde(0.0, 2)
    assert np.allclose(A, A.T, atol=1e-14)
    idx = BasisSpec(2).index()
    for i, (n, k) in enumerate(idx):
        for j, (m, l) in enumerate(idx):
            if k != l:
                assert abs(A[i, j]) < 1e-12


def test_atilde_gradient_block_shear():
    # at eps = 0 and k = 1 the block is <H_n', H_m'> + <H_n, H_m> - <g' H_n, H_m>
    A = assemble_Atilde(0.0, 1)
    idx = BasisSpec(1).index()
    i = idx.index((0, 1))
    y = np.linspace(-20, 20, 40001)
    h0 = np.pi ** -0.25 * np.exp(-y * y / 2)
    g = 2 / np.cosh(y) ** 2
    ref = trapezoid((y * h0) ** 2 + h0 ** 2 - g * h0 ** 2, y)
    assert A[i, i] == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("eps", [0.0, 0.3, 0.5])
def test_atilde_nonnegative(eps):
    assert coperiodic_spectrum(eps, 5).eigenvalues.min() >= -1e-8


def test_ref_column_eps03():
    ev = coperiodic_spectrum(0.3, 7).eigenvalues[:10]
    assert np.allclose(ev, ref_column(0.3), atol=5e-3)
    assert np.sum(ev < 5e-3) == 3


def test_lambda4_converges_in_N():
    l4 = [coperiodic_spectrum(0.0, N).eigenvalues[3] for N in (5, 7, 9)]
    err = [abs(v - 2 / 3) for v in l4]
    assert err[0] > err[1] > err[2]
    assert err[2] < 2e-2


def test_solve_symmetric_rejects_nonsymmetric():
    with pytest.raises(OutOfRange):
        solve_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    t = solve_symmetric(np.diag([3.0, 1.0, 1.0 + 1e-12]), vectors=True)
    assert t.clusters() == [0, 0, 1]
    assert t.vectors.shape == (3, 3)


def test_generalized_identity_pencil():
    D = np.array([[2.0, 0.5], [0.5, 1.0]])
    t = solve_generalized(D, D)
    assert np.allclose(t.eigenvalues, 1.0)


def test_generalized_two_by_two():
    M = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    D = np.eye(2)
    # M^H has eigenvalues +-i
    ev = solve_generalized(M, D).eigenvalues
    assert sorted(ev.imag) == pytest.approx([-1.0, 1.0])
    M = np.diag([0.5, -0.25]).astype(complex)
    ev = solve_generalized(M, np.diag([1.0, 0.5])).eigenvalues
    assert ev.real == pytest.approx([1.0 / 2.0, -0.5])


@settings(max_examples=20)
@given(st.integers(0, 2 ** 32 - 1))
def test_generalized_reconstruction(seed):
    rng = np.random.default_rng(seed)
    n = 5
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    B = rng.normal(size=(n, n))
    D = B @ B.T + n * np.eye(n)
    t = solve_generalized(M, D, vectors=True)
    for s, v in zip(t.eigenvalues, t.vectors.T):
        assert np.allclose(M.conj().T @ v, s * (D.T @ v), atol=1e-9)
    assert np.all(np.diff(t.eigenvalues.real) <= 1e-12)


def test_singular_d():
    with pytest.raises(SingularD):
        solve_generalized(np.eye(2), np.diag([1.0, -1.0]))


def test_modulational_d_hermitian_positive():
    M, D = assemble_modulational(0.2, 0.5, 2)
    assert np.allclose(D, D.conj().T)
    assert np.linalg.eigvalsh(D).min() > 0
    with pytest.raises(OutOfRange):
        assemble_modulational(0.2, 0.0, 2)


@pytest.mark.parametrize("eps", [0.0, 0.1])
def test_modulational_spectrum_pairs(eps):
    # Hamiltonian structure: the spectrum is symmetric under sigma -> -conj(sigma)
    ev = modulational_spectrum(eps, 0.5, 4).eigenvalues
    big = ev[np.abs(ev) < 1e3]
    for s in big[big.real > 1e-3]:
        assert np.min(np.abs(big + np.conj(s))) < 1e-6


def test_growth_rates_shear_limit():
    r = growth_rates(0.0, 0.5, 7)
    assert len(r) == 2
    assert r[0] == pytest.approx(r[1], abs=1e-8)
    assert r[0] == pytest.approx(0.1863, abs=1e-3)


def test_sweep_order_and_threads(monkeypatch):
    monkeypatch.setenv("CATSEYE_THREADS", "2")
    sw = growth_rate_sweep(0.5, [0.0, 0.3], 5)
    assert [e for e, _ in sw] == [0.0, 0.3]
    monkeypatch.setenv("CATSEYE_THREADS", "1")
    sw1 = growth_rate_sweep(0.5, [0.0, 0.3], 5)
    for (_, a), (_, b) in zip(sw, sw1):
        assert np.array_equal(a, b)


def test_branch_crossing_bracket():
    with pytest.raises(OutOfRange):
        branch_crossing(0.5, 0.3, 0.4, 5)


def test_spectrum_table_meta():
    t = coperiodic_spectrum(0.1, 2)
    assert t.meta["N"] == 2 and t.meta["epsilon"] == 0.1
    assert isinstance(t, SpectrumTable)
