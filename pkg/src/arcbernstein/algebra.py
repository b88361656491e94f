"""Complex polynomial and rational-function algebra on sampled curves.

Everything is plain numpy double precision.  Rational functions are kept
in partial-fraction canonical form: a polynomial part plus principal
parts at known pole locations.  Callers in this package always construct
their poles explicitly, so nothing here ever root-finds.

Two stability conventions matter throughout:

* High-degree polynomials are never evaluated through their monomial
  coefficients when a better basis is available.  ``ChebyshevPoly``,
  ``ShiftedPoly`` and ``FaberPoly`` subclass ``Poly``, keep the monomial
  coefficients for inspection, and override evaluation with a
  well-conditioned scheme (Clenshaw, shifted Horner, map recurrence).
* Sup norms are reported as maxima over actually evaluated points, so
  they are lower bounds and can only grow under refinement.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as npcheb
from numpy.polynomial import polynomial as npoly
from scipy.interpolate import CubicSpline

from .errors import (
    DomainError,
    IllConditionedInputError,
    NotRationalError,
    PoleOnCurveError,
)
from . import tolerances

_PROBE_SEED = 167320241


def _require_finite(z, what="value"):
    z = np.asarray(z)
    if not np.all(np.isfinite(z.real)) or not np.all(np.isfinite(z.imag)):
        raise DomainError(f"{what} must be finite, got {z!r}")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Complex polynomial with coefficients in ascending degree order.

    The zero polynomial is the empty coefficient list.  Trailing exact
    zeros are trimmed, so a nonzero polynomial has a nonzero leading
    coefficient and ``degree == len(coeffs) - 1``.
    """

    def __init__(self, coeffs=()):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if c.ndim != 1:
            raise DomainError("polynomial coefficients must be one-dimensional")
        _require_finite(c, "polynomial coefficient")
        nz = np.flatnonzero(c)
        self.coeffs = c[: nz[-1] + 1].copy() if nz.size else c[:0].copy()

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, u):
        return poly_eval(self, u)

    def deriv(self):
        return poly_deriv(self)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (len(self.coeffs) == len(other.coeffs)
                and bool(np.all(self.coeffs == other.coeffs)))

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree})"


def poly_eval(p, u):
    """Horner evaluation; scalars stay scalars, arrays stay arrays."""
    u = np.asarray(u, dtype=complex)
    if len(p.coeffs) == 0:
        out = np.zeros_like(u)
    else:
        out = npoly.polyval(u, p.coeffs)
    return complex(out) if out.ndim == 0 else out


def poly_deriv(p):
    if p.degree <= 0:
        return Poly()
    return Poly(npoly.polyder(p.coeffs))


def _poly_add(a, b):
    if len(a.coeffs) == 0:
        return Poly(b.coeffs)
    if len(b.coeffs) == 0:
        return Poly(a.coeffs)
    return Poly(npoly.polyadd(a.coeffs, b.coeffs))


def _poly_mul(a, b):
    if len(a.coeffs) == 0 or len(b.coeffs) == 0:
        return Poly()
    return Poly(npoly.polymul(a.coeffs, b.coeffs))


def taylor_shift(coeffs, a):
    """Coefficients of p(x + a) given ascending coefficients of p(x).

    Synthetic-division (Horner) shift; O(deg^2), exact up to rounding.
    """
    c = np.asarray(coeffs, dtype=complex).copy()
    n = len(c)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += a * c[j + 1]
    return c


class ShiftedPoly(Poly):
    """Polynomial stored as an expansion about a center.

    Evaluation uses Horner in (u - center), which keeps expansions
    produced by local Laurent analysis well conditioned where they are
    used; the monomial coefficients are recovered once for inspection.
    """

    def __init__(self, center, local_coeffs):
        self.center = complex(center)
        loc = np.atleast_1d(np.asarray(local_coeffs, dtype=complex))
        nz = np.flatnonzero(loc)
        self.local_coeffs = loc[: nz[-1] + 1].copy() if nz.size else loc[:0].copy()
        # sum e_j (u-c)^j in monomial form is the shift of e by -c
        super().__init__(taylor_shift(self.local_coeffs, -self.center)
                         if nz.size else ())

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        if len(self.local_coeffs) == 0:
            out = np.zeros_like(u)
        else:
            out = npoly.polyval(u - self.center, self.local_coeffs)
        return complex(out) if out.ndim == 0 else out

    def deriv(self):
        if len(self.local_coeffs) <= 1:
            return ShiftedPoly(self.center, ())
        return ShiftedPoly(self.center, npoly.polyder(self.local_coeffs))


class ChebyshevPoly(Poly):
    """Polynomial carried in the first-kind Chebyshev basis.

    Clenshaw evaluation stays well conditioned near [-1, 1] at degrees
    where the monomial form has already lost all accuracy.
    """

    def __init__(self, cheb_coeffs):
        cc = np.atleast_1d(np.asarray(cheb_coeffs, dtype=complex))
        nz = np.flatnonzero(cc)
        self.cheb_coeffs = cc[: nz[-1] + 1].copy() if nz.size else cc[:0].copy()
        super().__init__(npcheb.cheb2poly(self.cheb_coeffs)
                         if nz.size else ())

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        if len(self.cheb_coeffs) == 0:
            out = np.zeros_like(u)
        else:
            out = npcheb.chebval(u, self.cheb_coeffs)
        return complex(out) if out.ndim == 0 else out

    def deriv(self):
        if len(self.cheb_coeffs) <= 1:
            return ChebyshevPoly(())
        return ChebyshevPoly(npcheb.chebder(self.cheb_coeffs))


def chebyshev(n):
    """First-kind Chebyshev polynomial of degree n, T_n(1) = 1."""
    if n < 0:
        raise DomainError("chebyshev degree must be >= 0")
    e = np.zeros(n + 1)
    e[n] = 1.0
    return ChebyshevPoly(e)


# ---------------------------------------------------------------------------
# rational functions in partial-fraction form
# ---------------------------------------------------------------------------

@dataclass
class PoleTerm:
    """Principal part at one pole: sum of coeffs[k-1] / (u - location)^k."""

    location: complex
    order: int
    coeffs: np.ndarray  # ascending in k = 1..order

    def __post_init__(self):
        self.location = complex(self.location)
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        _require_finite(self.location, "pole location")
        _require_finite(self.coeffs, "pole coefficient")
        if self.order != len(self.coeffs):
            raise DomainError("pole order must equal len(coeffs)")
        if self.order < 1 or self.coeffs[-1] == 0:
            raise DomainError("top pole coefficient must be nonzero")

    def eval(self, u):
        u = np.asarray(u, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / (u - self.location)
            out = np.zeros_like(u)
            p = np.ones_like(u)
            for k in range(self.order):
                p = p * inv
                out = out + self.coeffs[k] * p
        return out

    def deriv(self):
        # d/du (u-a)^(-k) = -k (u-a)^(-k-1)
        c = np.zeros(self.order + 1, dtype=complex)
        for k in range(1, self.order + 1):
            c[k] = -k * self.coeffs[k - 1]
        return PoleTerm(self.location, self.order + 1, c)


@dataclass
class RationalFn:
    """poly_part + sum of principal parts at pairwise distinct poles."""

    poly_part: Poly
    pole_terms: list

    def __post_init__(self):
        locs = [pt.location for pt in self.pole_terms]
        for i in range(len(locs)):
            for j in range(i + 1, len(locs)):
                if abs(locs[i] - locs[j]) <= 1e-12 * max(1.0, abs(locs[i])):
                    raise DomainError(f"duplicate pole location {locs[i]!r}")

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        out = np.asarray(self.poly_part(u), dtype=complex) + np.zeros_like(u)
        for pt in self.pole_terms:
            out = out + pt.eval(u)
        return complex(out) if out.ndim == 0 else out

    def deriv(self):
        return RationalFn(self.poly_part.deriv(),
                          [pt.deriv() for pt in self.pole_terms])

    def pole_order(self, a):
        for pt in self.pole_terms:
            if abs(pt.location - a) <= 1e-9 * max(1.0, abs(a)):
                return pt.order
        return 0

    @property
    def degree_at_infinity(self):
        return self.poly_part.degree


def _series_div(num, den, nterms):
    """First nterms coefficients of the power series num/den, den[0] != 0."""
    out = np.zeros(nterms, dtype=complex)
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    for k in range(nterms):
        s = num[k] if k < len(num) else 0.0
        for j in range(1, min(k, len(den) - 1) + 1):
            s -= den[j] * out[k - j]
        out[k] = s / den[0]
    return out


def _probe_points(scale, avoid, rng_seed=_PROBE_SEED, count=64):
    """Deterministic probe points off the given locations."""
    rng = np.random.default_rng(rng_seed)
    pts = []
    while len(pts) < count:
        cand = (rng.uniform(-2, 2) + 1j * rng.uniform(-2, 2)) * scale
        if all(abs(cand - a) > 0.1 * scale for a in avoid):
            pts.append(cand)
    return np.array(pts)


def to_partial_fractions(numer, den_roots):
    """Partial-fraction decomposition of numer / prod (u-a)^m.

    den_roots is a list of (location, order) with pairwise distinct
    locations.  The principal coefficients come from local Taylor
    expansions (synthetic shift + series division), never root-finding.
    Recombination is verified at 64 probe points to relative 1e-10.
    """
    if isinstance(numer, (list, tuple, np.ndarray)):
        numer = Poly(numer)
    roots = [(complex(a), int(m)) for a, m in den_roots]
    for a, m in roots:
        if m < 1:
            raise DomainError("pole orders must be >= 1")
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i][0] - roots[j][0]) <= 1e-12 * max(1.0, abs(roots[i][0])):
                raise DomainError("duplicate locations in den_roots")

    den = np.array([1.0 + 0j])
    for a, m in roots:
        for _ in range(m):
            den = npoly.polymul(den, np.array([-a, 1.0]))

    if numer.degree < 0:
        return RationalFn(Poly(), [])

    quo, _rem = npoly.polydiv(numer.coeffs, den)
    poly_part = Poly(np.where(np.abs(quo) > 0, quo, 0)) if len(quo) else Poly()
    # polydiv returns [0] for lower-degree numerators
    if poly_part.degree == 0 and abs(poly_part.coeffs[0]) < 1e-300:
        poly_part = Poly()

    terms = []
    for a, m in roots:
        other = np.array([1.0 + 0j])
        for b, mb in roots:
            if b == a and mb == m and (b is a or abs(b - a) == 0):
                continue
            for _ in range(mb):
                other = npoly.polymul(other, np.array([-b, 1.0]))
        num_loc = taylor_shift(numer.coeffs, a)
        den_loc = taylor_shift(other, a)
        w = _series_div(num_loc, den_loc, m)
        # coefficient of (u-a)^(-k) is w[m-k]
        coeffs = w[::-1]
        nz = np.flatnonzero(coeffs)
        if nz.size:
            k_top = nz[-1] + 1
            terms.append(PoleTerm(a, int(k_top), coeffs[:k_top]))

    rf = RationalFn(poly_part, terms)

    scale = max(1.0, max((abs(a) for a, _ in roots), default=1.0))
    probes = _probe_points(scale, [a for a, _ in roots])
    direct = numer(probes) / npoly.polyval(probes, den)
    err = np.abs(rf(probes) - direct) / np.maximum(1.0, np.abs(direct))
    tol = tolerances.get("algebraic")
    if np.max(err) > tol:
        raise IllConditionedInputError(
            f"partial fractions residual {np.max(err):.3e} exceeds {tol:.1e}")
    return rf


def residue(rf, a):
    """Coefficient of 1/(u-a); zero when a is not a pole location."""
    for pt in rf.pole_terms:
        if abs(pt.location - a) <= 1e-9 * max(1.0, abs(a)):
            return complex(pt.coeffs[0])
    return 0j


def antiderivative(rf):
    """Rational antiderivative with integration constant 0.

    Exists only when every finite residue vanishes; otherwise the
    offending pole is reported via NotRationalError.
    """
    scale = max([1.0] + [float(np.max(np.abs(pt.coeffs))) for pt in rf.pole_terms])
    terms = []
    for pt in rf.pole_terms:
        res = pt.coeffs[0]
        if abs(res) > tolerances.get("residue") * scale:
            raise NotRationalError(pt.location, complex(res))
        if pt.order >= 2:
            c = np.array([-pt.coeffs[k - 1] / (k - 1)
                          for k in range(2, pt.order + 1)], dtype=complex)
            nz = np.flatnonzero(c)
            if nz.size:
                terms.append(PoleTerm(pt.location, int(nz[-1] + 1), c[: nz[-1] + 1]))
    pc = rf.poly_part.coeffs
    poly = Poly(np.concatenate([[0.0], pc / (1.0 + np.arange(len(pc)))])
                if len(pc) else ())
    out = RationalFn(poly, terms)

    probes = _probe_points(max([1.0] + [abs(pt.location) for pt in rf.pole_terms]),
                           [pt.location for pt in rf.pole_terms])
    err = np.abs(out.deriv()(probes) - rf(probes)) / np.maximum(1.0, np.abs(rf(probes)))
    if np.max(err) > tolerances.get("algebraic"):
        raise IllConditionedInputError(
            f"antiderivative self-check failed ({np.max(err):.3e})")
    return out


# ---------------------------------------------------------------------------
# sampled curves and sup norms
# ---------------------------------------------------------------------------

@dataclass
class SampledCurve:
    """Discretized curve: points z(params), optionally with the exact map.

    When ``fn`` is present, refinement evaluates the true curve; without
    it a cubic spline through the stored points stands in (periodic for
    closed curves).
    """

    points: np.ndarray
    params: np.ndarray
    closed: bool = False
    fn: object = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex)
        self.params = np.asarray(self.params, dtype=float)
        _require_finite(self.points, "curve point")
        if len(self.points) != len(self.params) or len(self.points) < 2:
            raise DomainError("curve needs matching points/params, length >= 2")
        if np.any(np.diff(self.params) <= 0):
            raise DomainError("curve params must be strictly increasing")
        if self.closed:
            gap = abs(self.points[0] - self.points[-1])
            scale = max(1.0, float(np.max(np.abs(self.points))))
            if gap > tolerances.get("curve_close") * scale:
                raise DomainError(f"closed curve seam gap {gap:.3e} too large")
        self._spline = None

    def _interp(self):
        if self._spline is None:
            bc = "periodic" if self.closed else "not-a-knot"
            pts = self.points.copy()
            if self.closed:
                pts[-1] = pts[0]  # exact seam for the periodic spline
            self._spline = CubicSpline(self.params, pts, bc_type=bc)
        return self._spline

    def at(self, ts):
        """Curve points at arbitrary parameters (fn if available)."""
        ts = np.asarray(ts, dtype=float)
        if self.closed:
            t0, t1 = self.params[0], self.params[-1]
            ts = t0 + np.mod(ts - t0, t1 - t0)
        else:
            ts = np.clip(ts, self.params[0], self.params[-1])
        if self.fn is not None:
            return np.asarray(self.fn(ts), dtype=complex)
        return self._interp()(ts)


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_max(g, a, b, iters=60):
    """Golden-section maximization of g on [a, b]; returns best value."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = g(x1), g(x2)
    best = max(f1, f2)
    for _ in range(iters):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = g(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = g(x1)
        best = max(best, f1, f2)
    return best


def sup_norm(f, curve, degree_hint):
    """Sup of |f| over the curve, reported from evaluated points only.

    Stage one samples at least 16*degree_hint parameters plus the
    curve's own nodes; stage two refines golden-section brackets around
    the top local maxima.  The result is a lower bound on the true sup
    with relative defect around 1e-6 for polynomial-modulus profiles on
    analytic curves, and never decreases when samples are added.
    """
    if degree_hint < 1:
        raise DomainError("degree_hint must be >= 1")
    if len(curve.points) < 2:
        raise DomainError("curve must be nonempty")

    t0, t1 = float(curve.params[0]), float(curve.params[-1])
    n = max(16 * int(degree_hint), 64)
    ts = np.linspace(t0, t1, n, endpoint=False) if curve.closed else \
        np.linspace(t0, t1, n + 1)
    ts = np.unique(np.concatenate([ts, curve.params]))

    vals = np.abs(np.asarray(f(curve.at(ts)), dtype=complex))
    if not np.all(np.isfinite(vals)):
        raise PoleOnCurveError("non-finite value while sampling |f| on curve")
    best = float(np.max(vals))

    def g(t):
        v = abs(complex(np.asarray(f(curve.at(np.array([t]))), dtype=complex)[0]))
        if not np.isfinite(v):
            raise PoleOnCurveError(f"non-finite |f| at parameter {t}")
        return v

    # refine around the few largest grid values
    order = np.argsort(vals)[::-1]
    picked = []
    for idx in order:
        if len(picked) >= 4:
            break
        if all(abs(ts[idx] - ts[p]) > 2 * (t1 - t0) / n for p in picked):
            picked.append(idx)
    for idx in picked:
        lo = ts[idx - 1] if idx > 0 else (ts[-1] - (t1 - t0) if curve.closed else ts[0])
        hi = ts[idx + 1] if idx < len(ts) - 1 else \
            (ts[0] + (t1 - t0) if curve.closed else ts[-1])
        if hi > lo:
            best = max(best, _golden_max(g, lo, hi))
    return best


# ---------------------------------------------------------------------------
# Faber polynomials of an exterior (Laurent) map
# ---------------------------------------------------------------------------

def _faber_run(cap, coeffs, kmax, z, with_deriv=False):
    """Values (and optionally derivatives) of the Faber family at z.

    The family attached to the map cap*v + coeffs[0] + coeffs[1]/v + ...
    satisfies  cap*F_{m+1} = (z - c0) F_m - sum_{k=1..m} c_k F_{m-k} - m c_m,
    run here on values, which is stable on and near the mapped set.
    """
    z = np.asarray(z, dtype=complex)
    c0 = coeffs[0] if len(coeffs) else 0j
    tail = coeffs[1:]
    F = [np.ones_like(z)]
    dF = [np.zeros_like(z)] if with_deriv else None
    for m in range(kmax):
        acc = (z - c0) * F[m]
        if with_deriv:
            dacc = (z - c0) * dF[m] + F[m]
        for k in range(1, m + 1):
            ck = tail[k - 1] if k - 1 < len(tail) else 0j
            if ck != 0:
                acc = acc - ck * F[m - k]
                if with_deriv:
                    dacc = dacc - ck * dF[m - k]
        cm = tail[m - 1] if 0 < m <= len(tail) else 0j
        acc = acc - m * cm
        F.append(acc / cap)
        if with_deriv:
            dF.append(dacc / cap)
    return (F, dF) if with_deriv else F


class FaberPoly(Poly):
    """Polynomial part of the k-th power of the inverse exterior map.

    Evaluation reruns the map-coefficient recurrence on values; the
    monomial coefficients from the same recurrence are kept for
    inspection but are exponentially ill-conditioned at high degree.
    """

    def __init__(self, cap, map_coeffs, k, monomial=None):
        self.cap = complex(cap)
        self.map_coeffs = np.asarray(map_coeffs, dtype=complex)
        self.k = int(k)
        if monomial is None:
            monomial = _faber_coeff_run(self.cap, self.map_coeffs, self.k)[self.k]
        super().__init__(monomial)

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        out = _faber_run(self.cap, self.map_coeffs, self.k, u)[self.k]
        return complex(out) if out.ndim == 0 else out

    def deriv(self):
        return _FaberDerivPoly(self.cap, self.map_coeffs, self.k)


class _FaberDerivPoly(Poly):
    def __init__(self, cap, map_coeffs, k):
        self.cap = complex(cap)
        self.map_coeffs = np.asarray(map_coeffs, dtype=complex)
        self.k = int(k)
        mono = _faber_coeff_run(self.cap, self.map_coeffs, self.k)[self.k]
        super().__init__(npoly.polyder(mono) if len(mono) > 1 else ())

    def __call__(self, u):
        u = np.asarray(u, dtype=complex)
        _, dF = _faber_run(self.cap, self.map_coeffs, self.k, u, with_deriv=True)
        out = dF[self.k]
        return complex(out) if out.ndim == 0 else out


def _faber_coeff_run(cap, coeffs, kmax):
    """Monomial coefficient vectors of the Faber family (same recurrence)."""
    c0 = coeffs[0] if len(coeffs) else 0j
    tail = coeffs[1:]
    fam = [np.array([1.0 + 0j])]
    for m in range(kmax):
        acc = npoly.polymul(np.array([-c0, 1.0]), fam[m])
        for k in range(1, m + 1):
            ck = tail[k - 1] if k - 1 < len(tail) else 0j
            if ck != 0:
                acc = npoly.polyadd(acc, -ck * np.pad(fam[m - k],
                                                      (0, len(acc) - len(fam[m - k]))))
        cm = tail[m - 1] if 0 < m <= len(tail) else 0j
        acc = npoly.polyadd(acc, np.array([-m * cm]))
        fam.append(acc / cap)
    return fam


def faber_family(exterior_map, n_max, check_bound=4.0):
    """Faber polynomials 0..n_max of a Laurent exterior map.

    ``exterior_map`` provides .cap and .coeffs (a0, a1, ...) as in the
    conformal module.  Each member is sup-norm checked on the image of
    the unit circle under the map.
    """
    cap = complex(exterior_map.cap)
    if cap == 0:
        raise DomainError("exterior map has zero capacity")
    coeffs = np.asarray(exterior_map.coeffs, dtype=complex)

    fam = [FaberPoly(cap, coeffs, k,
                      monomial=_faber_coeff_run(cap, coeffs, n_max)[k])
           for k in range(n_max + 1)]

    theta = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
    v = np.exp(1j * theta)
    pts = cap * v + npoly.polyval(1.0 / v, coeffs)
    curve = SampledCurve(np.append(pts, pts[0]),
                         np.append(theta, 2 * np.pi), closed=True)
    for k in (1, n_max) if n_max >= 1 else ():
        nrm = sup_norm(fam[k], curve, max(k, 1))
        if nrm > check_bound:
            raise IllConditionedInputError(
                f"Faber member {k} has sup norm {nrm:.3f} > {check_bound}")
    return fam
