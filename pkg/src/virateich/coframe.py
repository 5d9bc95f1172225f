"""Exterior calculus for orthonormal coframes on (x, y) grids, x periodic.

Forms are stored by their ``dx`` and ``dy`` coefficients on a grid of shape
``(ny, nx)``. Derivatives in ``x`` are spectral. Derivatives in ``y`` use
finite-difference stencils in the variable ``log y``: the heights are
graded geometrically towards the boundary ``y = 0``, so the stencil is
uniform in ``log y`` away from the ends and one-sided at the ends.

Residuals and curvatures are reported as multiples of the area form
``alpha1 ^ alpha2``, i.e. as functions rather than coefficients of
``dx ^ dy``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, InvalidInputError, PreconditionError, ResolutionError
from .spectral import PeriodicFn, check_sample_count, derivative, grid, random_trig, spectral_derivative

DEFAULT_RATIO = 1.02
DEFAULT_STENCIL = 7
COMPONENTS = ("a1x", "a1y", "a2x", "a2y", "kx", "ky")


def geometric_heights(y_min, y_max, ratio=DEFAULT_RATIO):
    """Heights ``y_min * ratio**j`` up to ``y_max`` (inclusive of the last step)."""
    if not 0 < y_min < y_max:
        raise InvalidInputError("need 0 < y_min < y_max")
    count = int(np.ceil(np.log(y_max / y_min) / np.log(ratio))) + 1
    return y_min * ratio ** np.arange(count)


def _fd_matrix(t, width):
    """First-derivative matrix on the nodes ``t`` with ``width``-point stencils."""
    m = len(t)
    if m < width:
        raise GridError(f"need at least {width} heights for the y stencil, got {m}")
    D = np.zeros((m, m))
    half = width // 2
    powers = np.arange(width)
    factorials = np.cumprod(np.concatenate(([1.0], np.arange(1, width))))
    for i in range(m):
        start = min(max(i - half, 0), m - width)
        idx = np.arange(start, start + width)
        dt = t[idx] - t[i]
        scale = np.max(np.abs(dt))
        V = (dt[None, :] / scale) ** powers[:, None] / factorials[:, None]
        rhs = np.zeros(width)
        rhs[1] = 1.0
        D[i, idx] = np.linalg.solve(V, rhs) / scale
    return D


@dataclass(frozen=True, eq=False)
class Grid2D:
    nx: int
    y: np.ndarray
    stencil: int = DEFAULT_STENCIL

    def __post_init__(self):
        check_sample_count(self.nx)
        y = np.array(self.y, dtype=float)
        if y.ndim != 1 or len(y) < 5:
            raise GridError("need at least 5 heights")
        if np.any(y <= 0) or np.any(np.diff(y) <= 0):
            raise GridError("heights must be positive and strictly increasing")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)
        D = _fd_matrix(np.log(y), self.stencil) / y[:, None]
        D.setflags(write=False)
        object.__setattr__(self, "_dy", D)

    @property
    def ny(self):
        return len(self.y)

    @property
    def x(self):
        return grid(self.nx)

    def mesh(self):
        """``(X, Y)`` arrays of shape ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y)

    def dx(self, field):
        return spectral_derivative(field, 1, axis=1)

    def dy(self, field):
        return self._dy @ field

    def interior(self, margin=None):
        """Row slice that excludes the one-sided stencil rows at both ends."""
        m = self.stencil // 2 if margin is None else margin
        return slice(m, self.ny - m)

    def to_dict(self):
        return {"nx": self.nx, "y": [float(v) for v in self.y]}


def exterior_d(grid2d, px, py):
    """Coefficient of ``dx ^ dy`` in ``d(px dx + py dy)``."""
    return grid2d.dx(py) - grid2d.dy(px)


def wedge(px, py, qx, qy):
    """Coefficient of ``dx ^ dy`` in ``(px dx + py dy) ^ (qx dx + qy dy)``."""
    return px * qy - py * qx


@dataclass(frozen=True, eq=False)
class CoframeGrid:
    grid: Grid2D
    a1x: np.ndarray
    a1y: np.ndarray
    a2x: np.ndarray
    a2y: np.ndarray
    kx: np.ndarray
    ky: np.ndarray

    def __post_init__(self):
        shape = (self.grid.ny, self.grid.nx)
        for name in COMPONENTS:
            arr = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), shape).copy()
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"coframe component {name} has non-finite values")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        vol = self.volume()
        if np.min(vol) <= 0:
            j, i = np.unravel_index(int(np.argmin(vol)), shape)
            raise PreconditionError(
                f"coframe is not oriented: alpha1^alpha2 = {vol[j, i]:.3e} at x={self.grid.x[i]:g}, y={self.grid.y[j]:g}"
            )

    def volume(self):
        return wedge(self.a1x, self.a1y, self.a2x, self.a2y)

    def to_dict(self):
        out = self.grid.to_dict()
        out["data"] = {name: getattr(self, name).tolist() for name in COMPONENTS}
        return out

    @classmethod
    def from_dict(cls, data):
        g = Grid2D(data["nx"], np.asarray(data["y"], dtype=float))
        return cls(g, *(np.asarray(data["data"][name], dtype=float) for name in COMPONENTS))


@dataclass(frozen=True, eq=False)
class StructureResiduals:
    r1: np.ndarray
    r2: np.ndarray
    K: np.ndarray


@dataclass(frozen=True, eq=False)
class BoundaryAsymptotics:
    a: PeriodicFn
    s: PeriodicFn
    u: PeriodicFn
    c: PeriodicFn

    def __post_init__(self):
        if np.min(self.a.values) <= 0:
            raise PreconditionError("boundary volume coefficient a must be positive")


def structure_residuals(C):
    """Residuals of Cartan's structure equations and the Gauss curvature.

    ``r1 = (d alpha1 + kappa ^ alpha2)/vol``, ``r2 = (d alpha2 - kappa ^ alpha1)/vol``
    and ``K = d kappa / vol`` with ``vol = alpha1 ^ alpha2``.
    """
    g = C.grid
    vol = C.volume()
    r1 = exterior_d(g, C.a1x, C.a1y) + wedge(C.kx, C.ky, C.a2x, C.a2y)
    r2 = exterior_d(g, C.a2x, C.a2y) - wedge(C.kx, C.ky, C.a1x, C.a1y)
    K = exterior_d(g, C.kx, C.ky)
    return StructureResiduals(r1 / vol, r2 / vol, K / vol)


def spin_connection(grid2d, a1x, a1y, a2x, a2y):
    """The unique ``kappa`` solving the first two structure equations.

    Writing ``kappa = p alpha1 + q alpha2`` gives ``p = -d alpha1/vol`` and
    ``q = -d alpha2/vol``.
    """
    vol = wedge(a1x, a1y, a2x, a2y)
    p = -exterior_d(grid2d, a1x, a1y) / vol
    q = -exterior_d(grid2d, a2x, a2y) / vol
    return p * a1x + q * a2x, p * a1y + q * a2y


def coframe_from_pair(grid2d, a1x, a1y, a2x, a2y):
    kx, ky = spin_connection(grid2d, a1x, a1y, a2x, a2y)
    return CoframeGrid(grid2d, a1x, a1y, a2x, a2y, kx, ky)


def connection_curvature(C, off_tol=1e-8, rows=None):
    """Curvature of the sl(2) connection built from the coframe.

    With ``A = 1/2 [[alpha2, alpha1 - kappa], [alpha1 + kappa, -alpha2]]`` the
    curvature ``dA + [A_x, A_y] dx^dy`` is returned as the multiplier ``m``
    in ``F_A = m [[0, -1], [1, 0]] alpha1^alpha2``. Working the product out
    gives ``m = (K + 1)/2`` when the first two structure equations hold; the
    remaining entries are ``r2/2`` (diagonal) and ``r1/2`` (symmetric part),
    which must stay below ``off_tol`` on ``rows``.
    """
    g = C.grid
    half = 0.5
    Ax = half * np.array([[C.a2x, C.a1x - C.kx], [C.a1x + C.kx, -C.a2x]])
    Ay = half * np.array([[C.a2y, C.a1y - C.ky], [C.a1y + C.ky, -C.a2y]])
    dAy_dx = np.array([[g.dx(Ay[i, j]) for j in range(2)] for i in range(2)])
    dAx_dy = np.array([[g.dy(Ax[i, j]) for j in range(2)] for i in range(2)])
    bracket = np.einsum("ij...,jk...->ik...", Ax, Ay) - np.einsum("ij...,jk...->ik...", Ay, Ax)
    F = (dAy_dx - dAx_dy + bracket) / C.volume()
    rows = g.interior() if rows is None else rows
    off = max(np.max(np.abs(F[0, 0][rows])), np.max(np.abs(0.5 * (F[0, 1] + F[1, 0])[rows])))
    if off > off_tol:
        from .errors import NumericalError

        raise NumericalError(f"curvature has off-pattern components of size {off:.2e}")
    return 0.5 * (F[1, 0] - F[0, 1])


def _extrapolation_weights(y, order):
    """Weights ``w`` with ``sum w_j f(y_j)`` = value at 0 of the interpolating polynomial."""
    nodes = y[: order + 1]
    w = np.ones(order + 1)
    for j in range(order + 1):
        for k in range(order + 1):
            if k != j:
                w[j] *= (0.0 - nodes[k]) / (nodes[j] - nodes[k])
    return w


def extrapolate_to_boundary(y, rows, order=2, gate=1e-3, what="quantity"):
    """Extrapolate ``rows[j]`` (sampled at heights ``y[j]``) to ``y = 0``.

    Uses the ``order + 1`` smallest heights; the estimate from the next
    window up must agree to ``gate`` (relative to ``max(1, |value|)``).
    """
    w0 = _extrapolation_weights(y, order)
    est = np.tensordot(w0, rows[: order + 1], axes=1)
    w1 = _extrapolation_weights(y[1:], order)
    alt = np.tensordot(w1, rows[1 : order + 2], axes=1)
    diff = np.max(np.abs(est - alt) / np.maximum(1.0, np.abs(est)))
    if diff > gate:
        raise ResolutionError(f"{what}: boundary extrapolation not converged (windows differ by {diff:.2e})")
    return est


def coframe_geodesic_curvature(C):
    """Geodesic curvature of the curves ``t -> (x + t, y)``.

    ``k = (theta' - kappa_x)/|d/dx|`` where ``theta`` is the angle of
    ``d/dx`` in the frame; this is invariant under frame rotations.
    """
    g = C.grid
    p, q = C.a1x, C.a2x
    norm2 = p * p + q * q
    dtheta = (p * g.dx(q) - q * g.dx(p)) / norm2
    return (dtheta - C.kx) / np.sqrt(norm2)


def curvature_limit(C, order=2, gate=1e-3):
    """``c(x) = lim (k - 1)/y^2`` for the curvature of horizontal curves."""
    k = coframe_geodesic_curvature(C)
    y = C.grid.y
    rows = (k - 1.0) / (y**2)[:, None]
    return PeriodicFn(extrapolate_to_boundary(y, rows, order, gate, "curvature limit"), 2)


def boundary_asymptotics(C, order=2, gate=1e-3):
    """Leading boundary coefficients ``(a, s, u)`` and the curvature limit ``c``.

    ``a = lim y alpha1_x``, ``s = lim alpha2_x``, ``u = lim (alpha1_x + kappa_x)/(2y)``.
    """
    y = C.grid.y
    if np.count_nonzero(y < 0.1) < 4:
        raise PreconditionError("need at least 4 heights below 0.1 for boundary extrapolation")
    lead = y[:3, None] * C.a2y[:3]
    if np.max(np.abs(lead - 1.0)) > 0.05:
        raise PreconditionError("coframe is not adapted: y * alpha2_y does not tend to 1")
    a = extrapolate_to_boundary(y, y[:, None] * C.a1x, order, gate, "a")
    s = extrapolate_to_boundary(y, C.a2x, order, gate, "s")
    u = extrapolate_to_boundary(y, (C.a1x + C.kx) / (2 * y[:, None]), order, gate, "u")
    c = curvature_limit(C, order, gate)
    return BoundaryAsymptotics(PeriodicFn(a, 1), PeriodicFn(s, 1), PeriodicFn(u, 1), c)


def c_from_u0_gauge(a, s):
    """``c = (s' - (a'/a) s - s^2/2)/a^2``, valid for coframes with ``u = 0``."""
    av = a.values
    sv = s.values
    return PeriodicFn((derivative(s).values - derivative(a).values / av * sv - 0.5 * sv**2) / av**2, 2)


def geodesic_curvature(f, g, f_drift=0.0):
    """Hyperbolic geodesic curvature of ``t -> (f(x+t, y), g(x+t, y))`` in the upper half plane.

    ``f`` and ``g`` are ``(ny, nx)`` samples; ``f`` may carry a linear part
    ``f_drift * x`` that is not stored. ``k = f'/|v| + g (f' g'' - f'' g')/|v|^3``
    with ``|v|^2 = f'^2 + g'^2``.
    """
    f = np.atleast_2d(np.asarray(f, dtype=float))
    g = np.atleast_2d(np.asarray(g, dtype=float))
    if np.min(g) <= 0:
        raise PreconditionError("chart height g must be positive")
    fp = spectral_derivative(f, 1, axis=1) + f_drift
    fpp = spectral_derivative(f, 2, axis=1)
    gp = spectral_derivative(g, 1, axis=1)
    gpp = spectral_derivative(g, 2, axis=1)
    return curvature_from_derivatives(fp, fpp, g, gp, gpp)


def curvature_from_derivatives(fp, fpp, g, gp, gpp):
    speed2 = fp**2 + gp**2
    return fp / np.sqrt(speed2) + g * (fp * gpp - fpp * gp) / speed2**1.5


def hill_from_curvature(a, c):
    """``T = (a''/a - 3/2 (a'/a)^2)/2 + a^2 c/2``."""
    if np.min(a.values) <= 0:
        k = int(np.argmin(a.values))
        raise PreconditionError(f"a must be positive: a(x_{k}) = {a.values[k]:.3e}")
    av = a.values
    la = derivative(a).values / av
    laa = derivative(a, 2).values / av
    return PeriodicFn(0.5 * (laa - 1.5 * la**2) + 0.5 * av**2 * c.values, 2)


def make_example_coframe(kind, grid2d, ell=1.0, T=None):
    """Sample one of the standard hyperbolic coframes.

    ``half_plane``: ``dx/y, dy/y, -dx/y``. ``disk``: boundary defining
    function ``y = (1-r)/(1+r)`` and the angle used as the x coordinate
    (coefficients are angle independent). ``cylinder``: neck length ``ell``
    with ``y = exp(-u)``. ``fefferman_graham``: potential ``T`` (a
    ``PeriodicFn`` on the x grid or a number).
    """
    X, Y = grid2d.mesh()
    zero = np.zeros_like(Y)
    if kind == "half_plane":
        return CoframeGrid(grid2d, 1 / Y, zero, zero, 1 / Y, -1 / Y, zero)
    if kind == "disk":
        if np.max(grid2d.y) >= 1.0:
            raise PreconditionError("disk coframe is singular at the center y = 1")
        return CoframeGrid(grid2d, (1 - Y**2) / (2 * Y), zero, zero, 1 / Y, -(1 + Y**2) / (2 * Y), zero)
    if kind == "cylinder":
        if ell <= 0:
            raise PreconditionError("neck length must be positive")
        return CoframeGrid(grid2d, ell * (1 + Y**2) / (2 * Y), zero, zero, 1 / Y, -ell * (1 - Y**2) / (2 * Y), zero)
    if kind == "fefferman_graham":
        if T is None:
            T = 0.0
        Tv = T.values if isinstance(T, PeriodicFn) else np.full(grid2d.nx, float(T))
        if len(Tv) != grid2d.nx:
            raise GridError("potential and grid have different x resolution")
        TT = np.broadcast_to(Tv, X.shape)
        if np.max(Y**2 * TT) >= 1.0:
            raise PreconditionError("Fefferman-Graham coframe needs y^2 T(x) < 1 on the grid")
        return CoframeGrid(grid2d, (1 - Y**2 * TT) / Y, zero, zero, 1 / Y, -(1 + Y**2 * TT) / Y, zero)
    raise InvalidInputError(f"unknown coframe kind {kind!r}")


def cylinder_u_coframe(grid2d, ell=1.0):
    """Cylinder coframe in the coordinate ``v = -u`` (orientation preserving), heights read as ``v``."""
    X, V = grid2d.mesh()
    zero = np.zeros_like(V)
    return CoframeGrid(grid2d, ell * np.cosh(V), zero, zero, np.ones_like(V), ell * np.sinh(V), zero)


def rotate_coframe(C, phi, phi_x, phi_y):
    """Rotate the frame by angle ``phi``: ``kappa`` shifts by ``-d phi``."""
    c, s = np.cos(phi), np.sin(phi)
    return CoframeGrid(
        C.grid,
        c * C.a1x + s * C.a2x,
        c * C.a1y + s * C.a2y,
        -s * C.a1x + c * C.a2x,
        -s * C.a1y + c * C.a2y,
        C.kx - phi_x,
        C.ky - phi_y,
    )


@dataclass(frozen=True, eq=False)
class TaylorChart:
    """Local isometry ``(f, g)`` to the upper half plane given by Taylor data in ``y``.

    ``f = x + f0 + y f1 + y^2 f2`` and ``g = y g1 + y^2 g2`` with periodic
    coefficient functions (``g1 > 0``, ``1 + f0' > 0``).
    """

    f0: PeriodicFn
    f1: PeriodicFn
    f2: PeriodicFn
    g1: PeriodicFn
    g2: PeriodicFn

    @property
    def nx(self):
        return self.f0.n

    def boundary_data(self):
        """``a = f0'/g1`` (with the linear part of f0), ``s = g1'/g1``, ``u = 0``."""
        fp = 1.0 + derivative(self.f0).values
        g1 = self.g1.values
        return PeriodicFn(fp / g1, 1), PeriodicFn(derivative(self.g1).values / g1, 1)

    def c_taylor(self):
        """Curvature coefficient from the Taylor data of ``f0`` and ``g1``."""
        f0p = 1.0 + derivative(self.f0).values
        f0pp = derivative(self.f0, 2).values
        g1 = self.g1.values
        g1p = derivative(self.g1).values
        g1pp = derivative(self.g1, 2).values
        return PeriodicFn(g1 * g1pp / f0p**2 - g1 * g1p * f0pp / f0p**3 - 0.5 * g1p**2 / f0p**2, 2)

    def sample(self, grid2d):
        """Periodic part of ``f``, ``g`` and their exact ``x``/``y`` partials on the grid."""
        if grid2d.nx != self.nx:
            raise GridError("chart and grid have different x resolution")
        Y = grid2d.y[:, None]

        def d(p, k=1):
            return derivative(p, k).values if k else p.values

        f = d(self.f0, 0) + Y * d(self.f1, 0) + Y**2 * d(self.f2, 0)
        g = Y * d(self.g1, 0) + Y**2 * d(self.g2, 0)
        fx = 1.0 + d(self.f0) + Y * d(self.f1) + Y**2 * d(self.f2)
        gx = Y * d(self.g1) + Y**2 * d(self.g2)
        fy = d(self.f1, 0) + 2 * Y * d(self.f2, 0) + 0 * fx
        gy = d(self.g1, 0) + 2 * Y * d(self.g2, 0) + 0 * gx
        return f, g, fx, fy, gx, gy

    def coframe(self, grid2d):
        """``alpha1 = df/g``, ``alpha2 = dg/g``, ``kappa = -alpha1``."""
        _, g, fx, fy, gx, gy = self.sample(grid2d)
        if np.min(g) <= 0:
            raise PreconditionError("chart leaves the upper half plane on this grid")
        return CoframeGrid(grid2d, fx / g, fy / g, gx / g, gy / g, -fx / g, -fy / g)


def random_chart(rng, nx, modes=3, size=0.15):
    """Random Taylor chart with ``|f0'| <= size`` and ``g1`` within ``size`` of a positive constant."""
    f0 = random_trig(rng, nx, modes=modes, amplitude=size / (2 * np.pi * modes), mean=False)
    g1 = random_trig(rng, nx, modes=modes, amplitude=size, mean=False) + rng.uniform(0.8, 1.2)
    f1 = random_trig(rng, nx, modes=modes, amplitude=size)
    f2 = random_trig(rng, nx, modes=modes, amplitude=size)
    g2 = random_trig(rng, nx, modes=modes, amplitude=size)
    return TaylorChart(f0, f1, f2, g1, g2)
