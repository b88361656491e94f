"""Numerical Riemann maps for analytic near-circle Jordan curves.

Both maps are fitted by boundary-correspondence (conjugate-function)
iteration on star-like curves: writing the target in polar form
rho(phi) about its centroid, the correspondence phi(theta) satisfies a
fixed-point equation whose correction is the circle conjugation
operator, applied here with the FFT.  For analytic near-circles the
iteration converges geometrically and the truncated series reproduces
the boundary to spectral accuracy.

The normalization used downstream fixes a boundary point: a rotation
followed by the hyperbolic translation chi_t(v) = (v-t)/(1-tv) makes
Phi(1) the marked point with |Phi'(1)| = 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.interpolate import CubicSpline

from . import tolerances
from .errors import (
    DomainError,
    FitFailureError,
    NewtonError,
    UnsupportedGeometryError,
)

# ---------------------------------------------------------------------------
# fitted map containers
# ---------------------------------------------------------------------------


@dataclass
class LaurentMap:
    """Exterior map cap*v + coeffs[0] + coeffs[1]/v + ... fixing infinity."""

    cap: complex
    coeffs: np.ndarray
    M: int
    boundary_residual: float = 0.0

    def __call__(self, v):
        v = np.asarray(v, dtype=complex)
        out = self.cap * v + npoly.polyval(1.0 / v, self.coeffs)
        return complex(out) if out.ndim == 0 else out

    def deriv(self, v):
        v = np.asarray(v, dtype=complex)
        d = np.asarray(npoly.polyval(1.0 / v, npoly.polyder(self.coeffs)),
                       dtype=complex) if len(self.coeffs) > 1 else 0.0
        out = self.cap - d / v ** 2
        return complex(out) if np.ndim(out) == 0 else out


@dataclass
class PowerMap:
    """Interior map coeffs[0] + coeffs[1] v + ... on the unit disk."""

    coeffs: np.ndarray
    boundary_residual: float = 0.0

    def __call__(self, v):
        v = np.asarray(v, dtype=complex)
        out = npoly.polyval(v, self.coeffs)
        return complex(out) if np.ndim(out) == 0 else out

    def deriv(self, v):
        v = np.asarray(v, dtype=complex)
        out = npoly.polyval(v, npoly.polyder(self.coeffs))
        return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# polar representation of a star-like boundary
# ---------------------------------------------------------------------------

class _PolarBoundary:
    def __init__(self, curve, n_dense=4096):
        pts = curve.at(np.linspace(curve.params[0], curve.params[-1],
                                   n_dense, endpoint=False)) \
            if curve.fn is not None else curve.points[:-1]
        self.center = complex(np.mean(pts))
        rel = pts - self.center
        rad = np.abs(rel)
        if len(rel) < 16:
            raise UnsupportedGeometryError("too few samples for a polar fit")
        scale = float(np.max(rad))
        if np.min(rad) < 1e-9 * scale:
            raise UnsupportedGeometryError("boundary passes through its centroid")
        # star-like about the centroid: the polar angle must be strictly
        # monotone along the traversal, turning exactly one revolution
        ang = np.unwrap(np.angle(rel))
        if ang[-1] < ang[0]:
            ang, rad = ang[::-1], rad[::-1]
        if np.any(np.diff(ang) <= 0) or ang[-1] - ang[0] >= 2 * np.pi:
            raise UnsupportedGeometryError(
                "boundary is not star-like about its centroid")
        ang_ext = np.concatenate([ang, [ang[0] + 2 * np.pi]])
        rad_ext = np.concatenate([rad, [rad[0]]])
        self._spline = CubicSpline(ang_ext, rad_ext, bc_type="periodic")
        self._lo = ang[0]

    def rho(self, phi):
        phi = self._lo + np.mod(phi - self._lo, 2 * np.pi)
        return self._spline(phi)


def _conjugate(u):
    """Circle conjugation: cos k -> sin k, sin k -> -cos k, zero mean."""
    n = len(u)
    uh = np.fft.fft(u)
    k = np.fft.fftfreq(n, d=1.0 / n)
    mult = -1j * np.sign(k)
    return np.real(np.fft.ifft(mult * uh))


def _correspondence(poly, n_grid, exterior, max_sweeps=200):
    theta = np.linspace(0, 2 * np.pi, n_grid, endpoint=False)
    phi = theta.copy()
    sign = -1.0 if exterior else 1.0
    for sweep in range(max_sweeps):
        u = np.log(poly.rho(phi))
        phi_new = theta + sign * _conjugate(u)
        delta = float(np.max(np.abs(phi_new - phi)))
        phi = phi_new
        if delta < 5e-14:
            return theta, phi
    raise FitFailureError(delta, "(boundary correspondence)")


def _fit(curve, M, tol, exterior, poly=None):
    if poly is None:
        poly = _PolarBoundary(curve)
    n_grid = max(512, 8 * M)
    theta, phi = _correspondence(poly, n_grid, exterior)
    samples = poly.center + poly.rho(phi) * np.exp(1j * phi)
    bins = np.fft.fft(samples) / n_grid  # bins[k] multiplies e^{ik theta}

    if exterior:
        cap = bins[1]
        # rotation normalization: absorb arg(cap) into the v variable
        sigma = np.angle(cap)
        coeffs = np.array([bins[0]] + [bins[-k] * np.exp(1j * k * sigma)
                                       for k in range(1, M + 1)])
        cap = abs(cap)
        fitted = LaurentMap(cap, coeffs, M)
        junk = float(np.max(np.abs(bins[2: n_grid // 4])))
    else:
        coeffs = np.array([bins[k] for k in range(0, M + 1)])
        fitted = PowerMap(coeffs)
        junk = float(np.max(np.abs(bins[-n_grid // 4:])))

    # residual: fitted circle image against the target in polar distance
    th2 = np.linspace(0, 2 * np.pi, 2 * n_grid, endpoint=False)
    w = fitted(np.exp(1j * th2))
    rel = w - poly.center
    resid = float(np.max(np.abs(np.abs(rel) - poly.rho(np.angle(rel)))))
    resid = max(resid, junk)
    if resid > tol:
        raise FitFailureError(resid, "(series truncation)")
    fitted.boundary_residual = resid
    return fitted


def fit_exterior_map(boundary, M=64, tol=None):
    """Exterior Riemann map of a star-like analytic curve, fixing infinity,
    with real positive capacity."""
    if tol is None:
        tol = tolerances.get("fit")
    if not boundary.closed:
        raise DomainError("boundary must be a closed curve")
    fitted = _fit(boundary, M, tol, exterior=True)
    if not (fitted.cap > 0):
        raise FitFailureError(float("nan"), "(capacity)")
    return fitted


def fit_interior_map(boundary, M=64, tol=None):
    """Interior Riemann map onto the bounded complement component."""
    if tol is None:
        tol = tolerances.get("fit")
    if not boundary.closed:
        raise DomainError("boundary must be a closed curve")
    fitted = _fit(boundary, M, tol, exterior=False)
    _check_interior_derivative(fitted)
    return fitted


def _check_interior_derivative(fitted):
    rr, th = np.meshgrid(np.linspace(0.05, 1.0, 24),
                         np.linspace(0, 2 * np.pi, 96, endpoint=False))
    grid = (rr * np.exp(1j * th)).ravel()
    dmin = float(np.min(np.abs(fitted.deriv(grid))))
    if dmin < 1e-10:
        raise FitFailureError(dmin, "(interior derivative vanishes)")


def fit_map_pair(boundary, M=64, tol=None):
    """Both Riemann maps of one curve, sharing the polar resampling."""
    if tol is None:
        tol = tolerances.get("fit")
    if not boundary.closed:
        raise DomainError("boundary must be a closed curve")
    poly = _PolarBoundary(boundary)
    interior = _fit(boundary, M, tol, exterior=False, poly=poly)
    _check_interior_derivative(interior)
    exterior = _fit(boundary, M, tol, exterior=True, poly=poly)
    if not (exterior.cap > 0):
        raise FitFailureError(float("nan"), "(capacity)")
    return interior, exterior


# ---------------------------------------------------------------------------
# inverse maps
# ---------------------------------------------------------------------------

def _invert(mapping, deriv, target, seed, tol=None, maxit=50):
    if tol is None:
        tol = tolerances.get("newton")
    v = complex(seed)
    scale = max(1.0, abs(target))
    for _ in range(maxit):
        r = mapping(v) - target
        if abs(r) <= tol * scale:
            return v
        d = deriv(v)
        if d == 0:
            raise NewtonError("zero derivative during map inversion")
        v = v - r / d
    r = abs(mapping(v) - target)
    if r <= 100 * tol * scale:
        return v
    raise NewtonError(f"map inversion stalled (residual {r:.3e})")


# ---------------------------------------------------------------------------
# normalized pair
# ---------------------------------------------------------------------------

def _chi(t, v):
    return (v - t) / (1.0 - t * v)


def _chi_inv(t, y):
    return (y + t) / (1.0 + t * y)


def _chi_deriv(t, v):
    return (1.0 - t * t) / (1.0 - t * v) ** 2


@dataclass
class NormalizedPair:
    """Interior/exterior maps renormalized to share a boundary point.

    Phi_j(1) = u0 with |Phi_j'(1)| = 1, realized as
    Phi_raw(rot * chi_t(v)); a1 is the disk preimage of the interior
    pole of interest, a2 the exterior preimage of infinity (None for
    infinity itself).
    """

    Phi1_raw: PowerMap
    Phi2_raw: LaurentMap
    u0: complex
    rot1: complex
    rot2: complex
    t1: float
    t2: float
    a1: complex
    a2: object  # complex or None for infinity

    def phi1(self, v):
        return self.Phi1_raw(self.rot1 * _chi(self.t1, np.asarray(v, complex)))

    def phi1_deriv(self, v):
        v = np.asarray(v, dtype=complex)
        return self.Phi1_raw.deriv(self.rot1 * _chi(self.t1, v)) * \
            self.rot1 * _chi_deriv(self.t1, v)

    def phi2(self, v):
        return self.Phi2_raw(self.rot2 * _chi(self.t2, np.asarray(v, complex)))

    def phi2_deriv(self, v):
        v = np.asarray(v, dtype=complex)
        return self.Phi2_raw.deriv(self.rot2 * _chi(self.t2, v)) * \
            self.rot2 * _chi_deriv(self.t2, v)

    def phi1_inv(self, u, seed=None):
        if seed is None:
            seed = 0.5
        raw = _invert(self.Phi1_raw, self.Phi1_raw.deriv, u,
                      self.rot1 * _chi(self.t1, complex(seed)))
        return complex(_chi_inv(self.t1, raw / self.rot1))

    def phi2_inv(self, u, seed=None):
        if seed is None:
            seed = _nearest_circle_seed(self.phi2, u)
        raw = _invert(self.Phi2_raw, self.Phi2_raw.deriv, u,
                      self.rot2 * _chi(self.t2, complex(seed)))
        return complex(_chi_inv(self.t2, raw / self.rot2))


def _nearest_circle_seed(mapping, u, n=256, radius=1.0):
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    v = radius * np.exp(1j * th)
    return complex(v[int(np.argmin(np.abs(np.asarray(mapping(v)) - u)))])


def _boundary_preimage_angle(mapping, u0, n=4096):
    """Angle theta with mapping(e^{i theta}) = u0, polished by projection."""
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    vals = np.asarray(mapping(np.exp(1j * th)))
    j = int(np.argmin(np.abs(vals - u0)))
    t = th[j]
    for _ in range(60):
        v = np.exp(1j * t)
        g = complex(mapping(v)) - u0
        dg = complex(_num_angle_deriv(mapping, t))
        step = -np.real(np.conj(dg) * g) / max(abs(dg) ** 2, 1e-300)
        t += step
        if abs(step) < 1e-15:
            break
    return float(t)


def _num_angle_deriv(mapping, t, h=1e-7):
    return (complex(mapping(np.exp(1j * (t + h))))
            - complex(mapping(np.exp(1j * (t - h))))) / (2 * h)


def normalize_pair(phi1_raw, phi2_raw, u0, interior_pole=None):
    """Renormalize raw maps so both send 1 to u0 with unit derivative
    modulus; records a1 (preimage of interior_pole) and a2 (preimage of
    infinity, None when the exterior map already fixes it)."""
    u0 = complex(u0)

    th1 = _boundary_preimage_angle(phi1_raw, u0)
    th2 = _boundary_preimage_angle(phi2_raw, u0)
    res1 = abs(complex(phi1_raw(np.exp(1j * th1))) - u0)
    res2 = abs(complex(phi2_raw(np.exp(1j * th2))) - u0)
    lim = 100 * max(phi1_raw.boundary_residual, phi2_raw.boundary_residual,
                    tolerances.get("newton"))
    if max(res1, res2) > max(lim, 1e-8):
        raise DomainError("u0 does not lie on the fitted boundary")

    pair_args = []
    for raw, th, which in ((phi1_raw, th1, 1), (phi2_raw, th2, 2)):
        rot = np.exp(1j * th)
        s = abs(raw.deriv(rot))
        if not np.isfinite(s) or s <= 0:
            raise DomainError("degenerate boundary derivative")
        t = (1.0 - s) / (1.0 + s)
        pair_args.append((rot, float(t)))

    (rot1, t1), (rot2, t2) = pair_args
    pair = NormalizedPair(phi1_raw, phi2_raw, u0, rot1, rot2, t1, t2, 0j, None)

    if abs(t2) > 1e-13:
        pair.a2 = complex(1.0 / t2)
    else:
        pair.a2 = None

    if interior_pole is not None:
        pair.a1 = pair.phi1_inv(complex(interior_pole), seed=0.0)
        if abs(pair.a1) >= 1.0:
            raise DomainError("interior pole preimage escaped the disk")
    return pair


# ---------------------------------------------------------------------------
# Moebius psi sending a2 to infinity
# ---------------------------------------------------------------------------

@dataclass
class MoebiusPsi:
    """psi(v) = (1 - conj(a2) v)/(v - a2); identity when a2 is infinity.

    Maps the unit circle to itself with psi(1) = b1 unimodular.
    """

    a2: object  # complex or None
    b1: complex

    def __call__(self, v):
        v = np.asarray(v, dtype=complex)
        if self.a2 is None:
            out = v
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = (1.0 - np.conj(self.a2) * v) / (v - self.a2)
        return complex(out) if np.ndim(out) == 0 else out

    def inv(self, w):
        w = np.asarray(w, dtype=complex)
        if self.a2 is None:
            out = w
        else:
            out = (1.0 + self.a2 * w) / (w + np.conj(self.a2))
        return complex(out) if np.ndim(out) == 0 else out

    def deriv(self, v):
        v = np.asarray(v, dtype=complex)
        if self.a2 is None:
            out = np.ones_like(v)
        else:
            out = (abs(self.a2) ** 2 - 1.0) / (v - self.a2) ** 2
        return complex(out) if np.ndim(out) == 0 else out

    def inv_deriv(self, w):
        w = np.asarray(w, dtype=complex)
        if self.a2 is None:
            out = np.ones_like(w)
        else:
            out = (abs(self.a2) ** 2 - 1.0) / (w + np.conj(self.a2)) ** 2
        return complex(out) if np.ndim(out) == 0 else out


def psi_build(a2):
    """Moebius factor for the exterior pole; a2=None means infinity and
    yields the identity with b1 = 1."""
    if a2 is None:
        return MoebiusPsi(None, 1.0 + 0j)
    a2 = complex(a2)
    if abs(a2) <= 1.0:
        raise DomainError("a2 must lie outside the closed unit disk")
    b1 = (1.0 - np.conj(a2)) / (1.0 - a2)
    psi = MoebiusPsi(a2, b1)
    th = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
    err = np.max(np.abs(np.abs(psi(np.exp(1j * th))) - 1.0))
    if err > 1e-10:
        raise DomainError(f"psi does not preserve the unit circle ({err:.2e})")
    return psi


# ---------------------------------------------------------------------------
# the transition map psi o Phi2^{-1} o Phi1 o psi^{-1}
# ---------------------------------------------------------------------------

def transition_eval(pair, psi, w):
    """Value and derivative of the circle-to-circle transition map at w.

    Defined on the closed annulus where the interior map's analytic
    extension is trusted; the exterior inverse runs through Newton with
    a boundary-correspondence seed.
    """
    w = complex(w)
    v = psi.inv(w)
    u = complex(pair.phi1(v))
    x = pair.phi2_inv(u)
    out = complex(psi(x))
    dv = complex(psi.inv_deriv(w))
    du = complex(pair.phi1_deriv(v))
    dphi2 = complex(pair.phi2_deriv(x))
    if dphi2 == 0:
        raise NewtonError("exterior map derivative vanished")
    dout = complex(psi.deriv(x)) * (du * dv) / dphi2
    return out, dout


def validated_extension_margin(pair, cap=0.9, target=1e-9):
    """Radial margin on which the interior series extension is trusted.

    Estimated from the decay of the fitted coefficients: the truncation
    tail at radius r stays below the target.  Capped to keep Moebius
    distortion in check.
    """
    c = np.abs(pair.Phi1_raw.coeffs)
    M = len(c) - 1
    tail = max(float(c[-1]), 1e-300)
    scale = max(1.0, float(np.max(c)))
    if tail <= 1e-15 * scale:
        r = 1.0 + cap
    else:
        r = (target * scale / tail) ** (1.0 / M)
        r = min(max(r, 1.0), 1.0 + cap)
    return min(r - 1.0, _psi_image_margin(pair, r))


def _psi_image_margin(pair, r):
    """How far beyond the unit circle psi maps the extension disk."""
    if pair.a2 is None:
        return r - 1.0
    psi = psi_build(pair.a2)
    th = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    return float(np.min(np.abs(psi(r * np.exp(1j * th))))) - 1.0


def estimate_C4_C5(pair, psi, delta0, n_ang=256, n_rad=64):
    """Grid estimates of the transition-map growth constants.

    C4 bounds |T'/T| on the annulus 1 <= |w| <= 1+delta0; C5 bounds
    (|T'/T| - 1)/|w - b1| from above (clamped at zero).  Both feed the
    radial-integration bounds on the exterior Green's function.
    """
    margin = validated_extension_margin(pair)
    if delta0 > margin + 1e-12:
        raise DomainError(
            f"delta0={delta0:.3e} exceeds validated margin {margin:.3e}")
    b1 = psi.b1
    c4 = 0.0
    c5 = 0.0
    for r in np.linspace(1.0, 1.0 + delta0, n_rad):
        for th in np.linspace(0, 2 * np.pi, n_ang, endpoint=False):
            w = r * np.exp(1j * th)
            val, dval = transition_eval(pair, psi, w)
            g = abs(dval) / abs(val)
            c4 = max(c4, g)
            dist = abs(w - b1)
            if dist > 1e-9:
                c5 = max(c5, (g - 1.0) / dist)
    return c4, max(c5, 0.0)
