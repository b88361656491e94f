"""Rational open-up maps: from a Jordan arc to a Jordan-curve boundary.

For a single arc with endpoints z1, z2 the map is the shifted, scaled
Joukowski transform

    F(u) = c + ((u - c) + d^2/(u - c)) / 2,   c = (z1+z2)/2, d = (z2-z1)/2,

which fixes both endpoints, has critical points exactly there, and
carries the exterior of the traced curve conformally onto the
complement of the arc.  For 2*k0 endpoints with k0 > 1 the residue-free
antiderivative machinery is built verbatim (numerator prod(u - z_j),
denominator (u - u*)^(2 k0) with u* the endpoint mean), but the two free
affine constants cannot match all 2*k0 endpoints, so such maps are
returned with endpoint_matched=False and are not traced.

The two preimage branches of the arc are continued by warm-started
Newton steps seeded at the endpoints with the local square-root model.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances
from .algebra import Poly, PoleTerm, RationalFn, SampledCurve, antiderivative, \
    to_partial_fractions
from .errors import (
    DomainError,
    NewtonError,
    NotSimpleError,
    ResolutionError,
    TraceFailureError,
)

# ---------------------------------------------------------------------------
# arc specifications
# ---------------------------------------------------------------------------


class ArcSpec:
    """A simple analytic arc z(t), t in [-1, 1].

    Subclasses provide ``at`` and ``deriv_at``; the base class supplies
    endpoint access, normals and validity checks.  The side-2 normal is
    the left normal i*z'(t)/|z'(t)|.
    """

    def at(self, t):
        raise NotImplementedError

    def deriv_at(self, t):
        raise NotImplementedError

    def endpoints(self):
        return complex(self.at(-1.0)), complex(self.at(1.0))

    def normal2(self, t):
        d = complex(self.deriv_at(t))
        return 1j * d / abs(d)

    def _validate(self, grid=1024):
        t = np.linspace(-1, 1, grid)
        dz = np.asarray(self.deriv_at(t), dtype=complex)
        if np.min(np.abs(dz)) < 1e-12:
            raise DomainError("arc derivative vanishes on the parameter grid")
        z1, z2 = self.endpoints()
        scale = max(1.0, abs(z1), abs(z2))
        if abs(z1 - z2) < 1e-12 * scale:
            raise DomainError("arc endpoints must be distinct")
        # simplicity on a coarse grid: non-neighbouring samples stay apart
        z = np.asarray(self.at(np.linspace(-1, 1, 256)), dtype=complex)
        d2 = np.abs(z[:, None] - z[None, :])
        n = len(z)
        idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
        mask = idx > 2
        if np.any(d2[mask] < 1e-9 * scale):
            raise DomainError("arc self-intersects on the sample grid")


@dataclass
class Segment(ArcSpec):
    a: complex
    b: complex

    def __post_init__(self):
        self.a, self.b = complex(self.a), complex(self.b)
        self._validate()

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return (self.a + self.b) / 2 + t * (self.b - self.a) / 2

    def deriv_at(self, t):
        t = np.asarray(t, dtype=float)
        return np.full_like(t, (self.b - self.a) / 2, dtype=complex)


@dataclass
class CircularArc(ArcSpec):
    center: complex
    radius: float
    theta1: float
    theta2: float

    def __post_init__(self):
        self.center = complex(self.center)
        if self.radius <= 0:
            raise DomainError("radius must be positive")
        span = abs(self.theta2 - self.theta1)
        if not (0 < span < 2 * np.pi):
            raise DomainError("arc must span a proper sub-interval of the circle")
        self._validate()

    def _angle(self, t):
        t = np.asarray(t, dtype=float)
        return self.theta1 + (t + 1) / 2 * (self.theta2 - self.theta1)

    def at(self, t):
        return self.center + self.radius * np.exp(1j * self._angle(t))

    def deriv_at(self, t):
        dth = (self.theta2 - self.theta1) / 2
        return 1j * dth * self.radius * np.exp(1j * self._angle(t))


@dataclass
class ParamArc(ArcSpec):
    """Polynomial arc z(t) = sum coeffs[k] t^k on [-1, 1]."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if len(self.coeffs) < 2:
            raise DomainError("ParamArc needs degree >= 1")
        self._p = Poly(self.coeffs)
        self._dp = self._p.deriv()
        self._validate()

    def at(self, t):
        return self._p(np.asarray(t, dtype=float) + 0j)

    def deriv_at(self, t):
        return self._dp(np.asarray(t, dtype=float) + 0j)


# ---------------------------------------------------------------------------
# the open-up map
# ---------------------------------------------------------------------------

@dataclass
class OpenUp:
    endpoints: list
    ustar: complex
    delta: complex  # None when k0 > 1
    F: RationalFn
    k0: int
    endpoint_matched: bool

    def __call__(self, u):
        return self.F(u)

    def deriv(self, u):
        return self.F.deriv()(u)

    def second_deriv(self, u):
        return self.F.deriv().deriv()(u)

    def preimage_pair(self, z):
        """Both solutions of F(u) = z in closed form (k0 = 1 only)."""
        if self.k0 != 1:
            raise DomainError("closed-form preimages exist only for k0 = 1")
        z = np.asarray(z, dtype=complex)
        s = np.sqrt((z - self.ustar) ** 2 - self.delta ** 2)
        return (z - self.ustar) + s + self.ustar, (z - self.ustar) - s + self.ustar


def build_open_up(endpoints):
    """Open-up map for 2*k0 pairwise distinct endpoints.

    k0 = 1 uses the closed Joukowski form (endpoint matched exactly);
    k0 > 1 returns the residue-free antiderivative with unit scale and
    zero shift, flagged endpoint_matched=False.
    """
    eps = [complex(z) for z in endpoints]
    if len(eps) < 2 or len(eps) % 2 != 0:
        raise DomainError("need an even number (>= 2) of endpoints")
    scale = max(1.0, max(abs(z) for z in eps))
    for i in range(len(eps)):
        for j in range(i + 1, len(eps)):
            if abs(eps[i] - eps[j]) < 1e-12 * scale:
                raise DomainError(f"duplicate endpoint {eps[i]!r}")
    k0 = len(eps) // 2
    ustar = sum(eps) / len(eps)

    if k0 == 1:
        z1, z2 = eps
        delta = (z2 - z1) / 2
        # c + ((u-c) + d^2/(u-c))/2 as a partial-fraction object
        F = RationalFn(Poly([ustar / 2, 0.5]),
                       [PoleTerm(ustar, 1, [delta ** 2 / 2])])
        return OpenUp(eps, ustar, delta, F, 1, True)

    # k0 > 1: F' = prod(u - z_j) / (u - u*)^(2 k0); the endpoint mean kills
    # the residue at u*, so the antiderivative is rational.
    numer = Poly([1.0])
    for z in eps:
        numer = _poly_mul_shift(numer, z)
    Fprime = to_partial_fractions(numer, [(ustar, 2 * k0)])
    F = antiderivative(Fprime)
    return OpenUp(eps, ustar, None, F, k0, False)


def _poly_mul_shift(p, root):
    from numpy.polynomial import polynomial as npoly
    return Poly(npoly.polymul(p.coeffs, np.array([-root, 1.0])))


@dataclass
class CriticalReport:
    ok: bool
    checks: list  # (endpoint, name, value, passed)

    def failures(self):
        return [c for c in self.checks if not c[3]]


def critical_check(open_up):
    """Verify the critical structure: F' = 0 exactly at the endpoints,
    each endpoint is fixed, and the second derivative is nonzero there."""
    if not open_up.endpoint_matched:
        raise DomainError("critical_check requires an endpoint-matched map")
    tol = 1e-10
    checks = []
    dF = open_up.F.deriv()
    ddF = dF.deriv()
    scale = max(1.0, max(abs(z) for z in open_up.endpoints))
    for z in open_up.endpoints:
        fp = abs(dF(z))
        checks.append((z, "F'(endpoint) = 0", fp, fp <= tol * scale))
        fixed = abs(open_up.F(z) - z)
        checks.append((z, "F(endpoint) = endpoint", fixed, fixed <= tol * scale))
        fpp = abs(ddF(z))
        checks.append((z, "F''(endpoint) != 0", fpp, fpp >= 1e-8))
    # zeros of F' are only the endpoints: for k0=1 the derivative numerator
    # (u-u*)^2 - d^2 has exactly the endpoints as roots; verify by value
    ok = all(c[3] for c in checks)
    return CriticalReport(ok, checks)


# ---------------------------------------------------------------------------
# boundary tracing
# ---------------------------------------------------------------------------

@dataclass
class BoundaryTrace:
    branch1: SampledCurve
    branch2: SampledCurve
    combined: SampledCurve
    arc: ArcSpec
    open_up: OpenUp
    ts: np.ndarray  # arc parameters shared by the branches

    def branch_points(self, which):
        return (self.branch1 if which == 1 else self.branch2).points


def _newton_f(open_up, target, u0, tol, maxit=80):
    dF = open_up.F.deriv()
    u = complex(u0)
    for _ in range(maxit):
        r = open_up.F(u) - target
        if abs(r) <= tol:
            return u
        d = dF(u)
        if d == 0:
            # sitting on a critical point: nudge off it
            u = u + 1e-9 * (1 + 1j) * max(1.0, abs(u))
            continue
        u = u - r / d
    r = abs(open_up.F(u) - target)
    if r <= tol * 100:
        return u
    raise NewtonError(f"Newton stalled, residual {r:.3e}")


def _trace_branch(open_up, arc, ts, sign, tol):
    """Follow one preimage branch from the t=-1 endpoint."""
    z1 = complex(arc.at(-1.0))
    z2 = complex(arc.at(1.0))
    ddF = open_up.F.deriv().deriv()
    fpp = ddF(z1)
    us = np.empty(len(ts), dtype=complex)
    us[0] = z1
    prev = None
    for i, t in enumerate(ts):
        if i == 0:
            continue
        if i == len(ts) - 1 and t == 1.0:
            # both branches terminate at the critical preimage exactly
            us[i] = z2
            continue
        target = complex(arc.at(t))
        if prev is None or i <= 2:
            seed = z1 + sign * np.sqrt(2 * (target - z1) / fpp)
        else:
            seed = 2 * us[i - 1] - us[i - 2]  # linear continuation
        try:
            us[i] = _newton_f(open_up, target, seed, tol)
        except NewtonError:
            # step halving: walk from the previous accepted parameter
            u = us[i - 1]
            t_prev = ts[i - 1]
            success = False
            for halves in range(1, 9):
                n_sub = 2 ** halves
                try:
                    for s in np.linspace(t_prev, t, n_sub + 1)[1:]:
                        u = _newton_f(open_up, complex(arc.at(s)), u, tol)
                    us[i] = u
                    success = True
                    break
                except NewtonError:
                    continue
            if not success:
                raise TraceFailureError(t, "Newton continuation diverged")
        prev = us[i]
    return us


def trace_boundary(open_up, arc, n_samples=512, tol=None):
    """Trace both preimage branches of the arc and join them into the
    closed boundary curve of the open-up domain."""
    if tol is None:
        tol = tolerances.get("newton")
    if n_samples < 64:
        raise DomainError("n_samples must be >= 64")
    if not open_up.endpoint_matched:
        raise DomainError("cannot trace an unmatched open-up map")
    z1, z2 = arc.endpoints()
    e1, e2 = open_up.endpoints
    scale = max(1.0, abs(e1), abs(e2))
    if not ((abs(z1 - e1) < 1e-9 * scale and abs(z2 - e2) < 1e-9 * scale) or
            (abs(z1 - e2) < 1e-9 * scale and abs(z2 - e1) < 1e-9 * scale)):
        raise DomainError("arc endpoints do not match the open-up endpoints")

    ts = np.linspace(-1.0, 1.0, n_samples + 1)
    us1 = _trace_branch(open_up, arc, ts, +1.0, tol)
    us2 = _trace_branch(open_up, arc, ts, -1.0, tol)

    # interior collision means the preimage curve is not simple
    interior = slice(2, len(ts) - 2)
    gap = np.abs(us1[interior] - us2[interior])
    if np.min(gap) < 1e-9 * scale:
        raise NotSimpleError("branches collide away from the endpoints")

    resid = max(np.max(np.abs(open_up.F(us1) - arc.at(ts))),
                np.max(np.abs(open_up.F(us2) - arc.at(ts))))
    if resid > tolerances.get("trace"):
        raise TraceFailureError(float("nan"), f"residual {resid:.3e}")

    b1 = SampledCurve(us1, ts, closed=False,
                      fn=_branch_fn(open_up, arc, ts, us1, tol))
    b2 = SampledCurve(us2, ts, closed=False,
                      fn=_branch_fn(open_up, arc, ts, us2, tol))

    pts = np.concatenate([us1, us2[::-1][1:]])
    pts[-1] = pts[0]  # seam: both branches start at the t=-1 endpoint
    s = np.concatenate([(ts + 1) / 2, 2 - (ts[::-1][1:] + 1) / 2])
    combined = SampledCurve(pts, s, closed=True,
                            fn=_combined_fn(open_up, arc, ts, us1, us2, tol))
    return BoundaryTrace(b1, b2, combined, arc, open_up, ts)


def _branch_fn(open_up, arc, ts, us, tol):
    def fn(tq):
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        out = np.empty(len(tq), dtype=complex)
        for i, t in enumerate(tq):
            if t <= ts[0]:
                out[i] = us[0]
            elif t >= ts[-1]:
                out[i] = us[-1]
            else:
                j = _seed_index(ts, t)
                out[i] = _newton_f(open_up, complex(arc.at(t)), us[j], tol)
        return out
    return fn


def _seed_index(ts, t):
    """Nearest interior sample index; endpoint seeds are critical points."""
    j = int(np.clip(np.searchsorted(ts, t), 1, len(ts) - 1))
    if abs(ts[j - 1] - t) < abs(ts[j] - t):
        j = j - 1
    return int(np.clip(j, 1, len(ts) - 2))


def _combined_fn(open_up, arc, ts, us1, us2, tol):
    def fn(sq):
        sq = np.atleast_1d(np.asarray(sq, dtype=float))
        sq = np.mod(sq, 2.0)
        out = np.empty(len(sq), dtype=complex)
        for i, s in enumerate(sq):
            if s <= 1.0:
                t = 2 * s - 1
                us = us1
            else:
                t = 2 * (2 - s) - 1
                us = us2
            if t <= ts[0]:
                out[i] = us[0]
            elif t >= ts[-1]:
                out[i] = us[-1]
            else:
                j = _seed_index(ts, t)
                out[i] = _newton_f(open_up, complex(arc.at(t)), us[j], tol)
        return out
    return fn


# ---------------------------------------------------------------------------
# preimages with the normal-labeling convention
# ---------------------------------------------------------------------------

def _combined_orientation(trace):
    """+1 when the combined curve runs counterclockwise (signed area)."""
    p = trace.combined.points
    area = 0.5 * np.sum(np.real(p[:-1]) * np.imag(p[1:])
                        - np.real(p[1:]) * np.imag(p[:-1]))
    return 1.0 if area > 0 else -1.0


def _arc_param_of(trace, z):
    ts = trace.ts
    z = complex(z)
    d = np.abs(np.asarray(trace.arc.at(ts), dtype=complex) - z)
    j = int(np.argmin(d))
    t = float(ts[j])
    # few Newton steps on |gamma(t)-z|^2 via the tangent projection
    for _ in range(30):
        g = complex(trace.arc.at(t)) - z
        dg = complex(trace.arc.deriv_at(t))
        step = -np.real(np.conj(dg) * g) / abs(dg) ** 2
        t = float(np.clip(t + step, -1.0, 1.0))
        if abs(step) < 1e-14:
            break
    if abs(complex(trace.arc.at(t)) - z) > 1e-7 * max(1.0, abs(z)):
        raise DomainError("point does not lie on the arc")
    return t


def preimages(trace, z):
    """The two boundary preimages (u1, u2) of an interior arc point.

    Labeled so the image under F of the inward (exterior-side) normal at
    u1 is the side-2 normal of the arc; for k0 = 1 the pair satisfies
    (u1 - u*)(u2 - u*) = delta^2.
    """
    z = complex(z)
    ou = trace.open_up
    scale = max(1.0, max(abs(e) for e in ou.endpoints))
    if any(abs(z - e) < 1e-9 * scale for e in ou.endpoints):
        raise DomainError("endpoint has a single critical preimage")

    t = _arc_param_of(trace, z)
    tol = tolerances.get("newton")
    ua = _newton_f(ou, z, complex(trace.branch1.at(np.array([t]))[0]), tol)
    ub = _newton_f(ou, z, complex(trace.branch2.at(np.array([t]))[0]), tol)

    n2_arc = trace.arc.normal2(t)
    orient = _combined_orientation(trace)
    dF = ou.F.deriv()

    def pushforward_normal(u, t_arc, on_branch1):
        # tangent of the combined curve at u: du/dt = gamma'/F'(u), with
        # branch2 traversed backwards in the combined parametrization
        du = complex(trace.arc.deriv_at(t_arc)) / dF(u)
        if not on_branch1:
            du = -du
        tangent = du / abs(du)
        # exterior-side normal: left of travel for clockwise curves
        n2_u = 1j * tangent * (-orient)
        w = dF(u) * n2_u
        return w / abs(w)

    wa = pushforward_normal(ua, t, True)
    if np.real(np.conj(n2_arc) * wa) > 0:
        u1, u2 = ua, ub
    else:
        u1, u2 = ub, ua

    if ou.k0 == 1:
        prod = (u1 - ou.ustar) * (u2 - ou.ustar)
        if abs(prod - ou.delta ** 2) > 1e-9 * max(1.0, abs(ou.delta) ** 2):
            raise NewtonError("preimage pairing identity violated")
    return u1, u2


# ---------------------------------------------------------------------------
# univalence via the argument principle
# ---------------------------------------------------------------------------

def univalence_index(open_up, trace, b, n_outer=4096):
    """Number of preimages of b in the open-up domain, counted by the
    argument principle along the traced curve plus a large circle."""
    b = complex(b)
    dF = open_up.F.deriv()

    # b must avoid the arc and the traced curve's image (the same arc)
    try:
        _arc_param_of(trace, b)
    except DomainError:
        pass
    else:
        raise DomainError("probe point lies on the arc")

    scale = max(1.0, max(abs(e) for e in open_up.endpoints),
                abs(open_up.ustar), abs(b))
    R = 8.0 * scale
    th = np.linspace(0, 2 * np.pi, n_outer, endpoint=False)
    uo = R * np.exp(1j * th)
    io = np.sum(dF(uo) / (open_up.F(uo) - b) * 1j * uo) * (2 * np.pi / n_outer)

    # combined curve integral, oriented so the domain lies on the left;
    # for the unbounded domain that is the curve's own orientation when
    # it runs clockwise, else reversed
    p = trace.combined.at(np.linspace(0, 2, 4 * len(trace.ts), endpoint=False))
    dp = np.roll(p, -1) - np.roll(p, 1)
    vals = dF(p) / (open_up.F(p) - b)
    ic = np.sum(vals * dp) / 2.0
    if _combined_orientation(trace) > 0:
        ic = -ic

    total = (io + ic) / (2j * np.pi)
    nearest = round(float(np.real(total)))
    if abs(total - nearest) > 0.1:
        raise ResolutionError(
            f"winding count {total:.4f} not within 0.1 of an integer")
    return int(nearest)
