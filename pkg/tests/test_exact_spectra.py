import numpy as np
import pytest
from hypothesis import given, strategies as st

from catseye.errors import InconsistentProblem, OutOfRange, QuadratureDiverged
from catseye.exact_spectra import (CoPeriodic, EigenPair, Modulational, MultiPeriodic,
                                   eigenfunction_value, list_eigenpairs, list_eigenvalues,
                                   projection_P, projection_value, residual_norm)
from catseye.steady_fields import FlowParams, coords, gprime


def _lm(pairs):
    return [(round(p.lam, 12), p.multiplicity) for p in pairs]


def test_coperiodic_list():
    assert _lm(list_eigenvalues(CoPeriodic(), 10)) == [(1, 3), (3, 5), (6, 7), (10, 9)]
    assert list_eigenvalues(CoPeriodic(), 0.5) == []


def test_multiperiodic_and_modulational_lists():
    assert _lm(list_eigenvalues(MultiPeriodic(2), 1)) == [(0.375, 2), (1, 3)]
    assert _lm(list_eigenvalues(Modulational(0.5), 1)) == [(0.375, 2)]
    with pytest.raises(OutOfRange):
        MultiPeriodic(1)
    with pytest.raises(OutOfRange):
        Modulational(0.7)


@given(st.integers(2, 4), st.floats(0.5, 12))
def test_multiplicities_sum(m, lmax):
    # multiplicity of every eigenvalue equals the number of listed functions
    pairs = list_eigenpairs(MultiPeriodic(m), lmax)
    merged = list_eigenvalues(MultiPeriodic(m), lmax)
    assert sum(e.multiplicity for e in merged) == len(pairs)
    assert all(p.lam <= lmax + 1e-12 for p in pairs)


@pytest.mark.parametrize("eps", [0.0, 0.45, 0.85])
@pytest.mark.parametrize("problem,p_kw", [(CoPeriodic(), {}), (MultiPeriodic(2), {"m": 2}),
                                          (Modulational(1 / 3), {"alpha": 1 / 3})])
def test_residuals_small(eps, problem, p_kw):
    p = FlowParams(eps, **p_kw)
    for pair in list_eigenpairs(problem, 6):
        assert residual_norm(p, pair) < 1e-8


def test_residual_detects_wrong_eigenvalue():
    p = FlowParams(0.4)
    pair = list_eigenpairs(CoPeriodic(), 3)[-1]
    wrong = EigenPair(pair.lam + 0.5, pair.descriptor, pair.multiplicity)
    assert residual_norm(p, wrong) > 1e-2
    assert residual_norm(p, None) == 0.0


def test_problem_mismatch():
    pair = list_eigenpairs(MultiPeriodic(2), 1)[0]
    with pytest.raises(InconsistentProblem):
        residual_norm(FlowParams(0.2), pair)


def test_eigenfunction_of_lambda_one_is_gamma_like():
    # the three lambda = 1 functions span gamma, eta, xi (kernel directions)
    p = FlowParams(0.3)
    pts = (np.array([0.4, 2.0, 5.0]), np.array([-0.7, 0.2, 1.5]))
    c = coords(p, pts)
    vals = np.array([np.real(eigenfunction_value(p, pr, pts))
                     for pr in list_eigenpairs(CoPeriodic(), 1)])
    basis = np.array([c.gamma, c.eta, c.xi])
    # each eigenfunction lies in the span
    coef, res, *_ = np.linalg.lstsq(basis.T, vals.T, rcond=None)
    assert np.allclose(basis.T @ coef, vals.T, atol=1e-12)


def test_projection_quadrature_matches_analytic():
    p = FlowParams(0.5)
    for pair in list_eigenpairs(CoPeriodic(), 6):
        f = pair.descriptor
        num = projection_P(p, lambda X, Y: np.real(eigenfunction_value(p, pair, (X, Y))),
                           rule2d=(128, 4001)).value
        assert num == pytest.approx(projection_value(p, f), abs=1e-7)


def test_projection_of_constant_and_divergence():
    p = FlowParams(0.2)
    pv = projection_P(p, lambda X, Y: np.ones_like(X))
    assert pv.value == pytest.approx(1.0, abs=1e-10) and pv.normalization == pytest.approx(8 * np.pi)
    with pytest.raises(QuadratureDiverged):
        projection_P(p, lambda X, Y: np.exp(3 * np.abs(Y)), y_max=10)


def test_modulational_eigenfunction_quasiperiodic():
    p = FlowParams(0.3, alpha=0.5)
    pair = list_eigenpairs(Modulational(0.5), 1)[0]
    v0 = eigenfunction_value(p, pair, (0.7, 0.3))
    v1 = eigenfunction_value(p, pair, (0.7 + 2 * np.pi, 0.3))
    assert v1 == pytest.approx(v0 * np.exp(-1j * np.pi), abs=1e-12)
