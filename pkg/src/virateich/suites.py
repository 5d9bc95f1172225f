"""Seeded verification suites, one per module, and their reports.

Every suite draws its randomness from ``numpy.random.default_rng`` (PCG64)
seeded with ``(seed, suite index)``, so a suite gives the same numbers
whether it runs alone or as part of ``all``. A check passes iff its
maximal residual is at most its tolerance (times ``tol_scale``).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import coframe as cf
from . import groupoid as gp
from . import teich, trumpet
from .diffeo import DiffeoLift, act_on_hill, compose, invert, random_diffeo, random_potential, schwarzian
from .errors import VirateichError
from .hill import (
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
from .spectral import PeriodicFn, derivative, integral, interpolate, random_trig

SUITE_NAMES = ("diffeo", "hill", "coframe", "trumpet", "wolpert", "groupoid")


@dataclass
class CheckRecord:
    name: str
    max_residual: float
    tolerance: float
    trials: int
    wall_time: float = 0.0
    error: str = ""

    @property
    def passed(self):
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.tolerance)

    def to_dict(self, timings=False):
        out = {
            "name": self.name,
            "max_residual": float(self.max_residual) if np.isfinite(self.max_residual) else None,
            "tolerance": float(self.tolerance),
            "passed": self.passed,
            "trials": self.trials,
        }
        if self.error:
            out["error"] = self.error
        if timings:
            out["wall_time"] = round(self.wall_time, 4)
        return out


@dataclass
class SuiteReport:
    suite: str
    seed: int
    n: int
    trials: int
    tol_scale: float = 1.0
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_dict(self, timings=False):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "n": self.n,
            "trials": self.trials,
            "tol_scale": self.tol_scale,
            "rng": "numpy PCG64",
            "passed": self.passed,
            "checks": [c.to_dict(timings) for c in self.checks],
        }


class _Recorder:
    """Collects the running maximum of each named residual."""

    def __init__(self, tol_scale):
        self.tol_scale = tol_scale
        self.records = {}
        self.order = []
        self.clock = time.perf_counter()

    def add(self, name, residual, tol, trials=1):
        # time since the previous record is charged to this check
        now = time.perf_counter()
        elapsed, self.clock = now - self.clock, now
        residual = float(residual)
        if name not in self.records:
            self.records[name] = CheckRecord(name, residual, tol * self.tol_scale, 0)
            self.order.append(name)
        rec = self.records[name]
        if not residual <= rec.max_residual:
            rec.max_residual = residual
        rec.trials += trials
        rec.wall_time += elapsed

    def result(self):
        return [self.records[k] for k in self.order]


def _lift_distance(F, G):
    return float(np.max(np.abs(F.lift_values() - G.lift_values())))


def suite_diffeo(rng, n, trials, rec):
    for _ in range(trials):
        F = random_diffeo(rng, n)
        G = random_diffeo(rng, n)
        T = random_potential(rng, n)
        rec.add("inverse_roundtrip", _lift_distance(compose(F, invert(F)), DiffeoLift.identity(n)), 1e-10)
        law = act_on_hill(G, act_on_hill(F, T)) - act_on_hill(compose(F, G), T)
        rec.add("composition_law", law.max_abs(), 1e-7)

        def cocycle():
            FG = compose(F, G)
            lhs = schwarzian(FG).values
            rhs = interpolate(schwarzian(F), G.lift_values()) * G.d1().values ** 2 + schwarzian(G).values
            return np.max(np.abs(lhs - rhs))

        rec.add("schwarzian_cocycle", cocycle(), 1e-7)
        ell = float(rng.uniform(0.3, 3.0))
        F0 = random_diffeo(rng, n)
        T_ell = PeriodicFn.constant(-0.25 * ell**2, n, 2)
        tr_a = monodromy(T_ell).trace
        tr_b = monodromy(act_on_hill(F0, T_ell)).trace
        rec.add("monodromy_trace_invariance", abs(tr_a - tr_b), 1e-6)
        rec.add("length_recovery", abs(length_from_trace(tr_b) - ell), 1e-5)


def _model_potentials():
    worst = 0.0
    n = 64
    one, zero = PeriodicFn.constant(1.0, n), PeriodicFn.constant(0.0, n)
    cases = [(BoundaryConnection(one, zero, PeriodicFn.constant(-0.25, n)), 0.25)]
    for ell in (0.5, 1.0, 2.0):
        cases.append((BoundaryConnection(one, zero, PeriodicFn.constant(0.25 * ell**2, n)), -0.25 * ell**2))
    for A, expected in cases:
        worst = max(worst, np.max(np.abs(hill_from_asu(A).values - expected)))
        worst = max(worst, np.max(np.abs(ds_normalize(A)[1].values - expected)))
    return worst


def suite_hill(rng, n, trials, rec):
    rec.add("model_potentials", _model_potentials(), 1e-10)
    for _ in range(trials):
        A = random_positive_connection(rng, n)
        h, T = ds_normalize(A)
        rec.add("ds_vs_formula", (T - hill_from_asu(A)).max_abs(), 1e-8)
        B = BoundaryConnection.drinfeld_sokolov(T)
        h2, T2 = ds_normalize(B)
        rec.add("ds_idempotent", max(h2.distance(GaugeMap.identity(n)), (T2 - T).max_abs()), 1e-9)
        F = random_diffeo(rng, n)
        moved = gauge_transform(ds_splitting_gauge(F), pullback(F, B))
        target = BoundaryConnection.drinfeld_sokolov(act_on_hill(F, T))
        rec.add("ds_splitting_equivariance", np.max(np.abs(moved.matrix() - target.matrix())), 1e-7)
        f = random_trig(rng, n)
        rec.add("hat_moment_weak_form", abs(integral(hat_moment(A) * f) - hat_moment_pairing(A, f)), 1e-10)
        h1 = ds_splitting_gauge(random_diffeo(rng, n))
        left = gauge_transform(h1 @ h, A)
        right = gauge_transform(h1, gauge_transform(h, A))
        rec.add("gauge_left_action", np.max(np.abs(left.matrix() - right.matrix())), 1e-8)


def _coframe_grid(n):
    return cf.Grid2D(min(n, 128), cf.geometric_heights(1e-3, 0.5))


def suite_coframe(rng, n, trials, rec):
    g = _coframe_grid(n)
    nx = g.nx
    I = g.interior()
    fg_T = PeriodicFn.from_function(lambda x: 0.1 * np.sin(2 * np.pi * x), nx, 2)
    examples = {
        "half_plane": (cf.make_example_coframe("half_plane", g), 0.0),
        "disk": (cf.make_example_coframe("disk", g), 0.25),
        "cylinder": (cf.make_example_coframe("cylinder", g, ell=2.0), -1.0),
        "fefferman_graham": (cf.make_example_coframe("fefferman_graham", g, T=fg_T), fg_T.values),
    }
    for name, (C, T_expected) in examples.items():
        R = cf.structure_residuals(C)
        rec.add("structure_residuals", max(np.max(np.abs(R.r1[I])), np.max(np.abs(R.r2[I]))), 1e-7)
        rec.add("gauss_curvature", np.max(np.abs(R.K[I] + 1.0)), 1e-6)
        rec.add("connection_curvature", np.max(np.abs(cf.connection_curvature(C)[I])), 1e-7)
        ba = cf.boundary_asymptotics(C)
        T_asu = hill_from_asu(BoundaryConnection(ba.a, ba.s, ba.u))
        rec.add("model_pipeline", np.max(np.abs(T_asu.values - T_expected)), 1e-5)
    vg = cf.Grid2D(nx, cf.geometric_heights(0.1, 2.0))
    R = cf.structure_residuals(cf.cylinder_u_coframe(vg, 1.0))
    rec.add("gauss_curvature", np.max(np.abs(R.K[vg.interior()] + 1.0)), 1e-6)
    X, Y = g.mesh()
    for _ in range(trials):
        chart = cf.random_chart(rng, nx)
        C = chart.coframe(g)
        ba = cf.boundary_asymptotics(C)
        a, s = chart.boundary_data()
        T_asu = hill_from_asu(BoundaryConnection(a, s, PeriodicFn.constant(0.0, nx)))
        T_curv = cf.hill_from_curvature(a, cf.c_from_u0_gauge(a, s))
        rec.add("two_route_hill_u0", (T_asu - T_curv).max_abs(), 1e-6)
        rec.add("two_route_hill_limits", (hill_from_asu(BoundaryConnection(ba.a, ba.s, ba.u)) - T_curv).max_abs(), 1e-5)
        rec.add("curvature_limit_vs_taylor", (ba.c - chart.c_taylor()).max_abs(), 1e-5)
        psi = random_trig(rng, nx, amplitude=0.3)
        phi = Y * psi.values
        rotated = cf.rotate_coframe(C, phi, Y * derivative(psi).values, np.broadcast_to(psi.values, Y.shape))
        R = cf.structure_residuals(rotated)
        rec.add("rotated_structure_residuals", max(np.max(np.abs(R.r1[I])), np.max(np.abs(R.r2[I]))), 1e-7)
        k0 = cf.coframe_geodesic_curvature(C)
        k1 = cf.coframe_geodesic_curvature(rotated)
        rec.add("geodesic_curvature_gauge_invariance", np.max(np.abs(k0 - k1)), 1e-8)
        rb = cf.boundary_asymptotics(rotated)
        rec.add(
            "two_route_hill_rotated",
            (hill_from_asu(BoundaryConnection(rb.a, rb.s, rb.u)) - cf.hill_from_curvature(rb.a, rb.c)).max_abs(),
            1e-5,
        )


def suite_trumpet(rng, n, trials, rec):
    for _ in range(trials):
        p = trumpet.random_point(rng, n)
        v = trumpet.random_tangent(rng, n)
        w = trumpet.random_tangent(rng, n)
        f = random_trig(rng, n)
        rec.add("moment_diff_identity", trumpet.verify_moment_diff(p, f, w), 1e-6)
        rec.add("moment_circle_identity", trumpet.verify_moment_circle(p, w), 1e-8)
        rec.add("exactness", trumpet.exactness_residual(p, v, w), 1e-6)
        o = trumpet.omega_N(p, v, w)
        od = trumpet.omega_N_darboux(p, v, w)
        of = trumpet.omega_N_fourier(p, v, w)
        rec.add("darboux_form", abs(o - od), 1e-6)
        rec.add("fourier_form", max(abs(o - of), abs(od - of)), 1e-6)
        c1, c2 = float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2))
        u = trumpet.random_tangent(rng, n)
        bilin = trumpet.omega_N(p, c1 * v + c2 * u, w) - c1 * o - c2 * trumpet.omega_N(p, u, w)
        rec.add("antisymmetry_bilinearity", max(abs(o + trumpet.omega_N(p, w, v)), abs(bilin)), 1e-10)
        tr = monodromy(-trumpet.moment_diff(p)).trace
        rec.add("moment_monodromy_trace", abs(tr - 2 * np.cosh(p.ell / 2)), 1e-6)
    for ell in (0.5, 1.0, 2.0):
        sigma = trumpet.gram_smallest_singular_value(trumpet.TrumpetPoint(ell, DiffeoLift.identity(n)))
        rec.add("gram_inverse_smallest_singular_value", 1.0 / sigma, 1e8)
    orbit = trumpet.virasoro_orbit_check(float(rng.uniform(0.3, 3.0)), max(1, trials // 5), rng, n)
    rec.add("orbit_trace", orbit["trace"], 1e-6)
    rec.add("orbit_moment_constant", orbit["orbit_constant"], 1e-6)
    rec.add("orbit_circle_direction", max(orbit["omega_ZZ"], orbit["omega_Zw"]), 1e-8)


def _random_fn_point(rng, n, genus, r):
    interior = [(float(rng.uniform(0.3, 3)), float(rng.uniform(-1, 1))) for _ in range(teich.interior_count(genus, r))]
    return teich.FNPoint(genus, interior, [trumpet.random_point(rng, n) for _ in range(r)])


def _random_fn_tangent(rng, p, n):
    interior = [tuple(rng.uniform(-1, 1, 2)) for _ in p.interior]
    return teich.FNTangent(interior, [trumpet.random_tangent(rng, n) for _ in p.boundary])


def _zero_boundary(p, n):
    return [trumpet.TrumpetTangent.zero(n) for _ in p.boundary]


def suite_wolpert(rng, n, trials, rec):
    p = _random_fn_point(rng, n, 1, 1)
    zb = _zero_boundary(p, n)
    val = teich.omega_teich(p, teich.FNTangent([(1.0, 0.0)], zb), teich.FNTangent([(0.0, 1.0)], zb))
    rec.add("length_twist_pairing", abs(val - 0.5), 0.0)
    for _ in range(trials):
        p = _random_fn_point(rng, n, 2, 2)
        k = len(p.interior)
        zb = _zero_boundary(p, n)
        i, j = rng.choice(k, 2, replace=False)
        vi = [(0.0, 0.0)] * k
        wj = [(0.0, 0.0)] * k
        vi[i] = tuple(rng.uniform(-1, 1, 2))
        wj[j] = tuple(rng.uniform(-1, 1, 2))
        rec.add("disjoint_curves", abs(teich.omega_teich(p, teich.FNTangent(vi, zb), teich.FNTangent(wj, zb))), 0.0)
        vb = teich.FNTangent([(0.0, 0.0)] * k, [trumpet.random_tangent(rng, n) for _ in p.boundary])
        wi = teich.FNTangent([tuple(rng.uniform(-1, 1, 2)) for _ in range(k)], zb)
        rec.add("block_diagonality", abs(teich.omega_teich(p, vb, wi)), 0.0)
        wb = teich.FNTangent([(0.0, 0.0)] * k, [trumpet.random_tangent(rng, n) for _ in p.boundary])
        direct = sum(trumpet.omega_N(b, x, y) for b, x, y in zip(p.boundary, vb.boundary, wb.boundary))
        rec.add("boundary_block", abs(teich.omega_teich(p, vb, wb) - direct), 1e-12)

        v = _random_fn_tangent(rng, p, n)
        w = _random_fn_tangent(rng, p, n)
        jb = int(rng.integers(p.r))
        F = random_diffeo(rng, n)
        G = random_diffeo(rng, n)
        q = teich.boundary_action(p, jb, F)
        moved = teich.omega_teich(q, teich.transport_tangent(p, jb, F, v), teich.transport_tangent(p, jb, F, w))
        rec.add("diff_invariance", abs(moved - teich.omega_teich(p, v, w)), 1e-6)
        twice = teich.boundary_action(q, jb, G)
        once = teich.boundary_action(p, jb, compose(G, F))
        rec.add("action_law", _lift_distance(twice.boundary[jb].F, once.boundary[jb].F), 1e-8)
        phi_old = teich.boundary_moment(p)[jb]
        phi_new = teich.boundary_moment(q)[jb]
        rec.add("moment_equivariance", (phi_new - teich.transported_moment(F, phi_old)).max_abs(), 1e-7)
        tr_old = monodromy(-phi_old).trace
        tr_new = monodromy(-phi_new).trace
        rec.add("moment_trace_invariance", abs(tr_old - tr_new), 1e-6)


def suite_groupoid(rng, n, trials, rec):
    for _ in range(trials):
        p = gp.GroupoidPoint(random_potential(rng, n), random_diffeo(rng, n))
        v = gp.random_tangent(rng, n)
        w = gp.random_tangent(rng, n)
        rec.add("left_right_agreement", gp.left_right_residual(p, v, w), 1e-5)
        q = gp.right_to_left(p)
        rec.add("left_antisymmetry", abs(gp.omega_G_left(q, v, w) + gp.omega_G_left(q, w, v)), 1e-10)
        zero = PeriodicFn.constant(0.0, n)
        pure_v = gp.GroupoidTangent(v.dT, zero)
        pure_w = gp.GroupoidTangent(w.dT, zero)
        rec.add("pure_potential_pairs", abs(gp.omega_G_left(q, pure_v, pure_w)), 1e-14)
        tp = trumpet.random_point(rng, n)
        tv = trumpet.random_tangent(rng, n)
        tw = trumpet.random_tangent(rng, n)
        rec.add("slice_restriction", gp.slice_residual(tp, tv, tw), 1e-8)


SUITES = {
    "diffeo": suite_diffeo,
    "hill": suite_hill,
    "coframe": suite_coframe,
    "trumpet": suite_trumpet,
    "wolpert": suite_wolpert,
    "groupoid": suite_groupoid,
}


def suite_rng(seed, name):
    return np.random.default_rng([int(seed), SUITE_NAMES.index(name)])


def run_suite(name, n=256, trials=20, seed=0, tol_scale=1.0):
    """Run one suite (or ``all``) and return its :class:`SuiteReport`."""
    names = SUITE_NAMES if name == "all" else (name,)
    report = SuiteReport(name, int(seed), int(n), int(trials), float(tol_scale))
    for sub in names:
        rec = _Recorder(tol_scale)
        try:
            SUITES[sub](suite_rng(seed, sub), n, trials, rec)
        except VirateichError as exc:
            # a precondition or convergence failure inside a suite is a failed check, not a crash
            rec.records["aborted"] = CheckRecord("aborted", np.inf, 0.0, 0, error=str(exc))
            rec.order.append("aborted")
        checks = rec.result()
        if name == "all":
            for c in checks:
                c.name = f"{sub}.{c.name}"
        report.checks.extend(checks)
    return report
