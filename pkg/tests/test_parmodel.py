import json

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from perarfima import (ModelKind, NonStationaryError, NumericalError, PeriodicModelSpec,
                       SpecError, build_companion, check_stationary, is_stationary,
                       pi_sequence, pi_total, reference_spec, simulate, stationarity_roots)
from perarfima.parmodel import companion_order

MODEL_B_PI_ROW1 = [1.15527, 0.19409, 0.32348, 0.80869]


def spec_with(phi, D=None, kind="B", sigma2=None):
    phi = np.atleast_2d(np.asarray(phi, dtype=float))
    S, p = phi.shape
    return PeriodicModelSpec(S=S, p=p, phi=phi, D=D if D is not None else np.zeros(S),
                             sigma2=sigma2 if sigma2 is not None else np.ones(S), kind=kind)


# -- spec validation -------------------------------------------------------

def test_spec_validation():
    with pytest.raises(NonStationaryError, match=r"D out of \[0, 0.5\)"):
        reference_spec("B", (0.1, 0.2, 0.6, 0.4))
    with pytest.raises(SpecError):
        PeriodicModelSpec(S=4, p=1, phi=np.zeros((4, 1)), D=np.zeros(4), sigma2=np.ones(4),
                          kind="A")
    with pytest.raises(SpecError):
        PeriodicModelSpec(S=2, p=1, phi=np.zeros((2, 1)), D=[0, 0], sigma2=[1.0, 0.0])
    with pytest.raises(SpecError):
        PeriodicModelSpec(S=2, p=1, phi=np.zeros((3, 1)), D=[0, 0], sigma2=[1, 1])
    with pytest.raises(SpecError):
        PeriodicModelSpec(S=0, p=0, phi=[], D=[], sigma2=[])
    with pytest.raises(ValueError):
        reference_spec("Z")


def test_spec_is_immutable():
    spec = reference_spec("B")
    with pytest.raises(ValueError):
        spec.D[0] = 0.3
    with pytest.raises(AttributeError):
        spec.S = 3


def test_json_round_trip(tmp_path):
    spec = reference_spec("C", (0.1, 0.2, 0.4, 0.4))
    path = tmp_path / "c.json"
    spec.to_json(path)
    again = PeriodicModelSpec.from_json(path)
    assert again.kind is ModelKind.C
    assert again.to_dict() == spec.to_dict()
    assert json.loads(path.read_text())["kind"] == "C"


def test_json_errors(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("  \n")
    with pytest.raises(SpecError, match="empty"):
        PeriodicModelSpec.from_json(empty)
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(SpecError):
        PeriodicModelSpec.from_json(broken)
    with pytest.raises(SpecError):
        PeriodicModelSpec.from_dict({"S": 4})
    with pytest.raises(SpecError):
        PeriodicModelSpec.from_dict({"S": 1, "D": [0.1], "kind": "Q"})
    assert PeriodicModelSpec.from_dict({"S": 2, "D": [0.1, 0.2]}).kind is ModelKind.A


# -- companion form ----------------------------------------------------------

def test_reference_companion_matches_display():
    c = build_companion(reference_spec("B"))
    assert c.P == 1
    expected0 = np.eye(4)
    expected0[[1, 2, 3], [0, 1, 2]] = [-0.8, -0.6, -0.4]
    np.testing.assert_array_equal(c.Phi0, expected0)
    expected1 = np.zeros((4, 4))
    expected1[0, 3] = 0.7
    np.testing.assert_array_equal(c.Phi[0], expected1)


def test_no_ar_part_gives_identity():
    c = build_companion(reference_spec("A"))
    np.testing.assert_array_equal(c.Phi0, np.eye(4))
    assert not c.Phi.any()
    np.testing.assert_array_equal(stationarity_roots(c), np.zeros(4))
    np.testing.assert_array_equal(pi_total(c), np.eye(4))
    seq = pi_sequence(c, 5)
    np.testing.assert_array_equal(seq[0], np.eye(4))
    assert not seq.matrices[1:].any()


def test_scalar_order_two():
    # P = floor((p + 1) / S) + 1 = 4 here; trailing lag matrices are zero
    c = build_companion(spec_with([[0.5, 0.2]]))
    assert c.P == companion_order(1, 2) == 4
    np.testing.assert_array_equal(c.Phi[:, 0, 0], [0.5, 0.2, 0.0, 0.0])
    np.testing.assert_array_equal(c.Phi0, [[1.0]])


def test_companion_reproduces_univariate_recursion(rng):
    # stacked recursion vs a direct loop over the periodic AR equation
    S, p = 3, 4
    phi = rng.uniform(-0.4, 0.4, size=(S, p))
    c = build_companion(spec_with(phi))
    n_blocks = 30
    e = rng.standard_normal(n_blocks * S)
    x = np.zeros(n_blocks * S)
    for t in range(x.size):
        x[t] = e[t] + sum(phi[t % S, i - 1] * x[t - i] for i in range(1, p + 1) if t - i >= 0)
    X = x.reshape(n_blocks, S)
    E = e.reshape(n_blocks, S)
    for tau in range(c.P, n_blocks):
        lhs = c.Phi0 @ X[tau] - sum(c.Phi[i] @ X[tau - 1 - i] for i in range(c.P))
        np.testing.assert_allclose(lhs, E[tau], atol=1e-12)


# -- roots and Pi ------------------------------------------------------------

def test_reference_root():
    roots = stationarity_roots(reference_spec("B"))
    assert roots[0] == pytest.approx(0.7 * 0.8 * 0.6 * 0.4, abs=1e-12)
    np.testing.assert_allclose(roots[1:], 0.0, atol=1e-12)


def test_unit_root_flagged():
    spec = spec_with([[1.0]])
    assert stationarity_roots(spec)[0] == pytest.approx(1.0)
    assert not is_stationary(spec)
    with pytest.raises(NonStationaryError):
        check_stationary(spec)
    with pytest.raises(NonStationaryError):
        pi_sequence(build_companion(spec), 5)
    with pytest.raises(NumericalError):
        pi_total(build_companion(spec))


def test_reference_pi_total():
    Pi = pi_total(build_companion(reference_spec("B")))
    np.testing.assert_allclose(Pi[0], MODEL_B_PI_ROW1, atol=5e-6)
    assert Pi[3, 3] ** 2 == pytest.approx(1.3347, abs=1e-4)
    c = build_companion(reference_spec("B"))
    np.testing.assert_allclose(c.at_one @ Pi, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(pi_sequence(c, 50).total(), Pi, atol=1e-10)


def test_gram_matrix_diagonal():
    Pi = pi_total(build_companion(reference_spec("B")))
    G = Pi @ Pi.T
    np.testing.assert_allclose(np.diag(G), [2.131, 2.6744, 2.2734, 1.6743], atol=1e-3)


@st.composite
def stationary_specs(draw):
    S = draw(st.integers(1, 5))
    p = draw(st.integers(0, 7))
    phi = np.array(draw(st.lists(st.floats(-0.6, 0.6), min_size=S * p, max_size=S * p)))
    spec = spec_with(phi.reshape(S, p)) if p else PeriodicModelSpec(
        S=S, p=0, phi=np.zeros((S, 0)), D=np.zeros(S), sigma2=np.ones(S), kind="A")
    roots = stationarity_roots(spec)
    assume(roots.size == 0 or roots[0] < 0.9)
    return spec


@settings(max_examples=60, deadline=None)
@given(spec=stationary_specs())
def test_pi_sequence_properties(spec):
    c = build_companion(spec)
    seq = pi_sequence(c, 120)
    np.testing.assert_allclose(c.Phi0 @ seq[0], np.eye(spec.S), atol=1e-12)
    # Phi(L) Pi(L) = I up to lag J
    for j in range(1, 121):
        acc = c.Phi0 @ seq[j]
        for i in range(1, min(j, c.P) + 1):
            acc = acc - c.Phi[i - 1] @ seq[j - i]
        np.testing.assert_allclose(acc, 0.0, atol=1e-10)
    Pi = pi_total(c)
    np.testing.assert_allclose(c.at_one @ Pi, np.eye(spec.S), atol=1e-10)
    rho = stationarity_roots(c)[0] if stationarity_roots(c).size else 0.0
    err50 = np.abs(seq.matrices[:51].sum(axis=0) - Pi).max()
    err100 = np.abs(seq.matrices[:101].sum(axis=0) - Pi).max()
    assert err100 <= max(10 * err50 * rho ** 50, 1e-10)


def test_par_regression_round_trip():
    phi = np.array([[0.5, -0.2], [0.3, 0.25], [-0.4, 0.1], [0.6, 0.0]])
    spec = spec_with(phi, D=np.zeros(4))
    x = simulate(spec, 10_000, seed=11).values
    S, p = phi.shape
    for s in range(S):
        t = np.arange(S + s, x.size, S)
        X = np.column_stack([x[t - i] for i in range(1, p + 1)])
        y = x[t]
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid = y - X @ coef
        cov = resid.var(ddof=p) * np.linalg.inv(X.T @ X)
        z = (coef - phi[s]) / np.sqrt(np.diag(cov))
        assert np.all(np.abs(z) < 3), (s, coef, z)
