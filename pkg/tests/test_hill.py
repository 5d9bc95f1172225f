import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from virateich.diffeo import DiffeoLift, act_on_hill, random_diffeo, random_potential
from virateich.errors import InvalidInputError, NumericalError, PreconditionError
from virateich.hill import (
    BoundaryConnection,
    GaugeMap,
    ds_normalize,
    ds_splitting_gauge,
    gauge_transform,
    hat_moment,
    hat_moment_pairing,
    hill_from_asu,
    length_from_trace,
    monodromy,
    pullback,
    random_positive_connection,
)
from virateich.spectral import PeriodicFn, integral, random_trig

N = 256


def const(c, n=N, weight=0):
    return PeriodicFn.constant(c, n, weight)


def connection(a, s, u, n=N):
    wrap = lambda v: v if isinstance(v, PeriodicFn) else const(v, n)
    return BoundaryConnection(wrap(a), wrap(s), wrap(u))


def matrix_distance(A, B):
    return np.max(np.abs(A.matrix() - B.matrix()))


def test_positivity_flag():
    assert connection(1.0, 0.0, 0.0).positive
    a = PeriodicFn.from_function(lambda x: np.cos(2 * np.pi * x), N)
    assert not connection(a, 0.0, 0.0).positive


def test_from_matrix_requires_trace_free():
    m = connection(1.0, 0.5, 2.0).matrix()
    m[1, 1] += 1e-6
    with pytest.raises(NumericalError, match="trace"):
        BoundaryConnection.from_matrix(m)


def test_gauge_map_determinant_enforced():
    with pytest.raises(InvalidInputError, match="SL"):
        GaugeMap(np.ones(16), np.ones(16), np.zeros(16), 2 * np.ones(16))


def test_identity_gauge(rng):
    A = random_positive_connection(rng, N)
    assert matrix_distance(gauge_transform(GaugeMap.identity(N), A), A) < 1e-14


@pytest.mark.parametrize("lam", [0.5, 2.0, 3.7])
def test_constant_diagonal_gauge(rng, lam):
    A = random_positive_connection(rng, N)
    h = GaugeMap(np.full(N, lam), np.zeros(N), np.zeros(N), np.full(N, 1 / lam))
    B = gauge_transform(h, A)
    assert np.max(np.abs(B.a.values - lam**2 * A.a.values)) < 1e-12
    assert np.max(np.abs(B.u.values - A.u.values / lam**2)) < 1e-12
    assert np.max(np.abs(B.s.values - A.s.values)) < 1e-12


def test_gauge_is_a_left_action(rng):
    A = random_positive_connection(rng, N)
    h1 = ds_splitting_gauge(random_diffeo(rng, N))
    h2 = ds_splitting_gauge(random_diffeo(rng, N))
    assert matrix_distance(gauge_transform(h1 @ h2, A), gauge_transform(h1, gauge_transform(h2, A))) < 1e-8


def test_ds_normalize_lands_in_slice(rng):
    A = random_positive_connection(rng, N)
    h, T = ds_normalize(A)
    B = gauge_transform(h, A)
    assert np.max(np.abs(B.a.values - 1)) < 1e-9
    assert B.s.max_abs() < 1e-9
    assert np.max(np.abs(B.u.values + T.values)) < 1e-15
    assert T.weight == 2


def test_ds_normalize_already_normal(rng):
    T0 = random_potential(rng, N)
    h, T = ds_normalize(BoundaryConnection.drinfeld_sokolov(T0))
    assert h.distance(GaugeMap.identity(N)) < 1e-9
    assert (T - T0).max_abs() < 1e-12


@pytest.mark.parametrize("ell", [0.5, 1.0, 2.0])
def test_trumpet_potential(ell):
    A = connection(1.0, 0.0, ell**2 / 4)
    assert np.max(np.abs(hill_from_asu(A).values + ell**2 / 4)) < 1e-10
    assert np.max(np.abs(ds_normalize(A)[1].values + ell**2 / 4)) < 1e-10


def test_disk_potential():
    A = connection(1.0, 0.0, -0.25)
    assert np.max(np.abs(hill_from_asu(A).values - 0.25)) < 1e-10
    assert np.max(np.abs(ds_normalize(A)[1].values - 0.25)) < 1e-10


def test_fefferman_graham_potential():
    T0 = PeriodicFn.from_function(lambda x: 0.3 * np.sin(2 * np.pi * x) - 0.1, N, 2)
    A = BoundaryConnection(const(1.0), const(0.0), -T0)
    assert (hill_from_asu(A) - T0).max_abs() < 1e-12


def test_ds_agrees_with_formula(rng):
    for _ in range(20):
        A = random_positive_connection(rng, N)
        assert (ds_normalize(A)[1] - hill_from_asu(A)).max_abs() < 1e-8


def test_non_positive_connection_names_gridpoint():
    a = PeriodicFn.from_function(lambda x: 0.5 + np.cos(2 * np.pi * x), 16)
    A = BoundaryConnection(a, const(0.0, 16), const(0.0, 16))
    with pytest.raises(PreconditionError, match=r"a\(x_6\)"):
        ds_normalize(A)
    with pytest.raises(PreconditionError):
        hill_from_asu(A)


def test_hat_moment_examples(rng):
    T = random_potential(rng, N)
    assert (hat_moment(BoundaryConnection.drinfeld_sokolov(T)) + T).max_abs() < 1e-13
    assert hat_moment(connection(1.0, 0.0, 0.0)).max_abs() == 0.0


def test_hat_moment_weak_form(rng):
    for _ in range(5):
        A = random_positive_connection(rng, N)
        f = random_trig(rng, N)
        assert abs(integral(hat_moment(A) * f) - hat_moment_pairing(A, f)) < 1e-10


@pytest.mark.parametrize("ell", [0.5, 1.0, 2.0, 3.0])
def test_monodromy_of_trumpet(ell):
    M = monodromy(const(-(ell**2) / 4, weight=2))
    assert M.trace == pytest.approx(2 * np.cosh(ell / 2), abs=1e-10)
    assert M.orbit_class == "hyperbolic"
    assert abs(np.linalg.det(M.matrix) - 1) < 1e-8
    assert length_from_trace(M.trace) == pytest.approx(ell, abs=1e-9)


def test_monodromy_parabolic_and_elliptic():
    M = monodromy(const(0.0, weight=2))
    assert M.orbit_class == "parabolic"
    assert M.trace == pytest.approx(2.0, abs=1e-12)
    # u'' + w^2 u = 0 has trace 2 cos(w)
    M = monodromy(const((np.pi / 2) ** 2, weight=2))
    assert M.orbit_class == "elliptic"
    assert M.trace == pytest.approx(0.0, abs=1e-10)


def test_length_from_trace_rejects_elliptic():
    with pytest.raises(PreconditionError):
        length_from_trace(1.0)


def test_monodromy_trace_invariance(rng):
    T = random_potential(rng, N, offset=-1.0)
    base = monodromy(T).trace
    for _ in range(3):
        F = random_diffeo(rng, N)
        assert abs(monodromy(act_on_hill(F, T)).trace - base) < 1e-6


def test_splitting_gauge_trivial_cases():
    assert ds_splitting_gauge(DiffeoLift.identity(N)).distance(GaugeMap.identity(N)) == 0.0
    assert ds_splitting_gauge(DiffeoLift.rotation(0.4, N)).distance(GaugeMap.identity(N)) == 0.0


def test_splitting_gauge_equivariance(rng):
    T = random_potential(rng, N)
    for _ in range(5):
        F = random_diffeo(rng, N)
        moved = gauge_transform(ds_splitting_gauge(F), pullback(F, BoundaryConnection.drinfeld_sokolov(T)))
        target = BoundaryConnection.drinfeld_sokolov(act_on_hill(F, T))
        assert matrix_distance(moved, target) < 1e-7


def test_connection_json_roundtrip(rng):
    A = random_positive_connection(rng, 32)
    B = BoundaryConnection.from_dict(A.to_dict())
    assert matrix_distance(A, B) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ds_formula_property(seed):
    A = random_positive_connection(np.random.default_rng(seed), N)
    h, T = ds_normalize(A)
    assert (T - hill_from_asu(A)).max_abs() < 1e-8
    h2, T2 = ds_normalize(BoundaryConnection.drinfeld_sokolov(T))
    assert h2.distance(GaugeMap.identity(N)) < 1e-9
