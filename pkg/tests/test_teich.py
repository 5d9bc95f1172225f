import numpy as np
import pytest

from virateich import teich
from virateich.diffeo import DiffeoLift, compose, random_diffeo
from virateich.errors import InvalidInputError
from virateich.trumpet import TrumpetPoint, TrumpetTangent, omega_N, random_point, random_tangent
from virateich.spectral import PeriodicFn

N = 128


def zero_boundary(r, n=N):
    return [TrumpetTangent.zero(n) for _ in range(r)]


def random_fn_point(rng, genus, r, n=N):
    k = teich.interior_count(genus, r)
    interior = [(float(rng.uniform(0.3, 3)), float(rng.uniform(-1, 1))) for _ in range(k)]
    return teich.FNPoint(genus, interior, [random_point(rng, n) for _ in range(r)])


def random_fn_tangent(rng, p, n=N):
    interior = [tuple(rng.uniform(-1, 1, 2)) for _ in p.interior]
    return teich.FNTangent(interior, [random_tangent(rng, n) for _ in p.boundary])


@pytest.mark.parametrize("genus, r, k", [(0, 3, 0), (1, 1, 1), (2, 0, 3), (2, 2, 5), (0, 4, 1)])
def test_interior_count(genus, r, k):
    assert teich.interior_count(genus, r) == k


@pytest.mark.parametrize("genus, r", [(0, 0), (0, 1), (0, 2), (1, 0)])
def test_rejects_nonhyperbolic_surfaces(genus, r):
    k = max(teich.interior_count(genus, r), 0)
    with pytest.raises(InvalidInputError, match="Euler"):
        teich.identity_point(genus, [1.0] * k, [1.0] * r, N)


def test_rejects_bad_blocks():
    with pytest.raises(InvalidInputError, match="interior"):
        teich.FNPoint(1, [], [TrumpetPoint(1.0, DiffeoLift.identity(N))])
    with pytest.raises(InvalidInputError, match="positive"):
        teich.FNPoint(1, [(-1.0, 0.0)], [TrumpetPoint(1.0, DiffeoLift.identity(N))])
    with pytest.raises(InvalidInputError, match="genus"):
        teich.FNPoint(-1, [], [])
    with pytest.raises(InvalidInputError, match="trumpet"):
        teich.FNPoint(1, [(1.0, 0.0)], [1.0])


def test_tangent_dimension_mismatch():
    p = teich.identity_point(1, [1.0], [1.0], N)
    v = teich.FNTangent([(1.0, 0.0)], zero_boundary(1))
    with pytest.raises(InvalidInputError, match="blocks"):
        teich.omega_teich(p, v, teich.FNTangent([], zero_boundary(1)))


def test_length_twist_pairing_is_one_half():
    p = teich.identity_point(1, [1.7], [2.0], N)
    dl = teich.FNTangent([(1.0, 0.0)], zero_boundary(1))
    dt = teich.FNTangent([(0.0, 1.0)], zero_boundary(1))
    assert teich.omega_teich(p, dl, dt) == 0.5
    assert teich.omega_teich(p, dt, dl) == -0.5


def test_disjoint_curves_pair_to_zero(rng):
    p = random_fn_point(rng, 2, 2)
    k = len(p.interior)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            vi = [(0.0, 0.0)] * k
            wj = [(0.0, 0.0)] * k
            vi[i] = tuple(rng.uniform(-1, 1, 2))
            wj[j] = tuple(rng.uniform(-1, 1, 2))
            v = teich.FNTangent(vi, zero_boundary(2))
            w = teich.FNTangent(wj, zero_boundary(2))
            assert teich.omega_teich(p, v, w) == 0.0


def test_interior_and_boundary_blocks_decouple(rng):
    p = random_fn_point(rng, 1, 2)
    v = teich.FNTangent([tuple(rng.uniform(-1, 1, 2)) for _ in p.interior], zero_boundary(2))
    w = teich.FNTangent([(0.0, 0.0)] * len(p.interior), [random_tangent(rng, N), random_tangent(rng, N)])
    assert teich.omega_teich(p, v, w) == 0.0


def test_boundary_block_is_trumpet_form(rng):
    p = random_fn_point(rng, 0, 3)
    v = teich.FNTangent([], [random_tangent(rng, N) for _ in range(3)])
    w = teich.FNTangent([], [random_tangent(rng, N) for _ in range(3)])
    expected = sum(omega_N(b, a, c) for b, a, c in zip(p.boundary, v.boundary, w.boundary))
    assert teich.omega_teich(p, v, w) == pytest.approx(expected, abs=1e-12)


def test_boundary_action_identity(rng):
    p = random_fn_point(rng, 1, 1)
    q = teich.boundary_action(p, 0, DiffeoLift.identity(N))
    assert np.max(np.abs(q.boundary[0].F.phi.values - p.boundary[0].F.phi.values)) < 1e-14
    assert q.interior == p.interior


def test_boundary_action_law(rng):
    p = random_fn_point(rng, 1, 2)
    F, G = random_diffeo(rng, N), random_diffeo(rng, N)
    two_step = teich.boundary_action(teich.boundary_action(p, 1, F), 1, G)
    one_step = teich.boundary_action(p, 1, compose(G, F))
    assert np.max(np.abs(two_step.boundary[1].F(np.arange(N) / N) - one_step.boundary[1].F(np.arange(N) / N))) < 1e-10
    assert two_step.boundary[0] is p.boundary[0]


def test_boundary_action_preserves_form(rng):
    for _ in range(3):
        p = random_fn_point(rng, 1, 2)
        v, w = random_fn_tangent(rng, p), random_fn_tangent(rng, p)
        F = random_diffeo(rng, N)
        j = int(rng.integers(2))
        q = teich.boundary_action(p, j, F)
        before = teich.omega_teich(p, v, w)
        after = teich.omega_teich(q, teich.transport_tangent(p, j, F, v), teich.transport_tangent(p, j, F, w))
        assert abs(before - after) < 1e-6


def test_boundary_moment_equivariance(rng):
    p = random_fn_point(rng, 0, 3)
    F = random_diffeo(rng, N)
    phi = teich.boundary_moment(p)
    psi = teich.boundary_moment(teich.boundary_action(p, 2, F))
    assert (psi[2] - teich.transported_moment(F, phi[2])).max_abs() < 1e-6 * (1 + phi[2].max_abs())
    assert (psi[0] - phi[0]).max_abs() == 0


def test_boundary_moment_at_identity():
    p = teich.identity_point(0, [], [0.5, 1.0, 2.0], N)
    for ell, m in zip((0.5, 1.0, 2.0), teich.boundary_moment(p)):
        assert np.max(np.abs(m.values - ell**2 / 4)) < 1e-14


def test_boundary_index_errors():
    p = teich.identity_point(1, [1.0], [1.0], N)
    with pytest.raises(InvalidInputError, match="out of range"):
        teich.boundary_action(p, 1, DiffeoLift.identity(N))
    with pytest.raises(InvalidInputError, match="out of range"):
        teich.boundary_action(p, -1, DiffeoLift.identity(N))


def test_json_roundtrip(rng):
    p = random_fn_point(rng, 1, 2)
    d = p.to_dict()
    assert (d["g"], d["r"]) == (1, 2)
    q = teich.FNPoint.from_dict(d)
    assert q.interior == p.interior
    assert np.array_equal(q.boundary[1].F.phi.values, p.boundary[1].F.phi.values)
    d["r"] = 3
    with pytest.raises(InvalidInputError, match="'r'"):
        teich.FNPoint.from_dict(d)
