"""Green's functions, boundary normal derivatives, and the arc factor.

Closed forms cover the disk, the exterior disk and the segment; every
other geometry goes through the open-up / conformal-map pipeline and
the transfer rule nd(z) = nd(u) / |F'(u)|.  An arc has two sides and
therefore two normal derivatives at each interior point; the factor
entering derivative bounds for polynomials is n times their maximum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances
from .algebra import SampledCurve
from .conformal import (
    fit_map_pair,
    normalize_pair,
    psi_build,
    validated_extension_margin,
)
from .errors import DomainError, NewtonError
from .openup import build_open_up, preimages, trace_boundary


@dataclass
class NormalDeriv:
    value: float
    side: str  # "n1" | "n2"
    at: complex

    def __post_init__(self):
        if self.side not in ("n1", "n2"):
            raise DomainError("side label must be 'n1' or 'n2'")
        if not np.isfinite(self.value) or self.value < 0:
            raise DomainError("normal derivative must be finite and >= 0")


# ---------------------------------------------------------------------------
# closed forms on the disk and its exterior
# ---------------------------------------------------------------------------

def green_disk(u, a):
    """log |(1 - conj(a) u)/(u - a)| for u, a in the closed unit disk."""
    u, a = complex(u), complex(a)
    if abs(u) > 1 + 1e-12 or abs(a) >= 1:
        raise DomainError("green_disk needs |u| <= 1 and |a| < 1")
    if u == a:
        raise DomainError("evaluation at the pole")
    return float(np.log(abs((1 - np.conj(a) * u) / (u - a))))


def nd_disk(u, a):
    """Inner-normal derivative of the disk Green's function on |u| = 1:
    (1 - |a|^2)/|u - a|^2."""
    u, a = complex(u), complex(a)
    if abs(abs(u) - 1) > 1e-9:
        raise DomainError("u must be unimodular")
    if abs(a) >= 1:
        raise DomainError("pole must be interior")
    val = (1 - abs(a) ** 2) / abs(u - a) ** 2
    return NormalDeriv(float(val), "n1", u)


def nd_exterior(u, a):
    """Outer-normal derivative of the exterior Green's function on |u|=1:
    (|a|^2 - 1)/|u - a|^2 for finite a, exactly 1 for a = None (infinity)."""
    u = complex(u)
    if abs(abs(u) - 1) > 1e-9:
        raise DomainError("u must be unimodular")
    if a is None:
        return NormalDeriv(1.0, "n2", u)
    a = complex(a)
    if abs(a) <= 1:
        raise DomainError("pole must be exterior")
    val = (abs(a) ** 2 - 1) / abs(u - a) ** 2
    return NormalDeriv(float(val), "n2", u)


def green_exterior(u, a):
    """Green's function of the exterior disk, pole at a (None = infinity)."""
    u = complex(u)
    if abs(u) < 1 - 1e-12:
        raise DomainError("u must lie outside the unit disk")
    if a is None:
        return float(np.log(abs(u)))
    a = complex(a)
    return float(np.log(abs((1 - np.conj(a) * u) / (u - a))))


# ---------------------------------------------------------------------------
# the segment oracle
# ---------------------------------------------------------------------------

def green_segment(z):
    """log |z + sqrt(z^2 - 1)| with the branch giving a value >= 0."""
    z = complex(z)
    if abs(z.imag) < 1e-14 and -1 <= z.real <= 1:
        raise DomainError("z must lie off the segment [-1, 1]")
    s = np.sqrt(z * z - 1)
    w = z + s
    if abs(w) < 1:
        w = z - s
    return float(np.log(abs(w)))


def nd_segment(x0):
    """Both normal derivatives of the segment Green's function at x0,
    equal to 1/sqrt(1 - x0^2) on either side."""
    if not -1 < x0 < 1:
        raise DomainError("x0 must be interior to (-1, 1)")
    v = 1.0 / np.sqrt(1 - x0 * x0)
    return (NormalDeriv(v, "n1", complex(x0)), NormalDeriv(v, "n2", complex(x0)))


# ---------------------------------------------------------------------------
# transfer across a conformal map
# ---------------------------------------------------------------------------

def transfer_nd(nd, fprime_abs):
    """Pull a normal derivative through a conformal map with |F'| given.

    Endpoints are excluded upstream, so a vanishing derivative is a
    caller error, not a limit case.
    """
    if not fprime_abs > 0:
        raise DomainError("|F'| must be positive (critical points excluded)")
    return NormalDeriv(nd.value / fprime_abs, nd.side, nd.at)


def bernstein_walsh(supnorm, n, gval):
    """Growth bound supnorm * exp(n * g) for degree-n boundary data."""
    if supnorm < 0 or gval < 0:
        raise DomainError("supnorm and gval must be nonnegative")
    return float(supnorm * np.exp(n * gval))


# ---------------------------------------------------------------------------
# the full pipeline for one arc point
# ---------------------------------------------------------------------------

@dataclass
class ArcArtifacts:
    """Everything the estimates need for one (arc, z0) configuration."""

    arc: object
    z0: complex
    open_up: object
    trace: object
    u1: complex
    u2: complex
    pair: object
    psi: object
    fprime_abs: float
    margin: float

    @property
    def a1(self):
        return self.pair.a1

    @property
    def a2(self):
        return self.pair.a2

    @property
    def b1(self):
        return self.psi.b1

    def green_g2(self, u, seed=None):
        """Green's function of the unbounded open-up domain with pole at
        infinity, via log |psi(Phi2^{-1}(u))|."""
        v = self.pair.phi2_inv(u, seed=seed)
        return float(np.log(abs(complex(self.psi(v)))))

    def green_arc(self, z):
        """Green's function of the arc complement with pole at infinity."""
        u = self._g2_preimage(z)
        return self.green_g2(u)

    def _g2_preimage(self, z):
        ua, ub = self.open_up.preimage_pair(complex(z))
        us = self.open_up.ustar
        # the unbounded-domain preimage lies outside the traced curve
        u = ua if abs(ua - us) >= abs(ub - us) else ub
        return complex(u)


def build_arc_artifacts(arc, z0, n_trace=512, fit_M=64, fit_tol=None):
    """Run open-up, trace, conformal fit and normalization for one point."""
    z0 = complex(z0)
    ou = build_open_up(list(arc.endpoints()))
    trace = trace_boundary(ou, arc, n_samples=n_trace)
    u1, u2 = preimages(trace, z0)

    interior, exterior = fit_map_pair(trace.combined, M=fit_M, tol=fit_tol)
    pair = normalize_pair(interior, exterior, u1, interior_pole=ou.ustar)
    psi = psi_build(pair.a2)
    fprime_abs = abs(complex(ou.F.deriv()(u1)))
    if fprime_abs <= 0:
        raise DomainError("z0 coincides with a critical value")
    margin = validated_extension_margin(pair)
    return ArcArtifacts(arc, z0, ou, trace, u1, u2, pair, psi,
                        float(fprime_abs), float(margin))


def arc_normal_derivs(artifacts):
    """The two transferred normal derivatives of the arc at z0.

    Side n1 comes through the bounded domain (pole at the open-up pole),
    side n2 through the unbounded domain (pole at infinity); both are
    evaluated at the same preimage u1 and divided by |F'(u1)|.
    """
    a = artifacts
    side1 = transfer_nd(nd_disk(1.0, a.a1), a.fprime_abs)
    side1 = NormalDeriv(side1.value, "n1", a.z0)
    side2 = transfer_nd(nd_exterior(1.0, a.a2), a.fprime_abs)
    side2 = NormalDeriv(side2.value, "n2", a.z0)
    return side1, side2


def arc_factor(arc, z0, artifacts=None):
    """max of the two normal derivatives of the arc's Green's function
    at z0, computed through the full open-up + conformal pipeline."""
    if artifacts is None:
        artifacts = build_arc_artifacts(arc, z0)
    side1, side2 = arc_normal_derivs(artifacts)
    return max(side1.value, side2.value)


def fd_normal_probe(artifacts, side, h=1e-6):
    """One-sided finite difference of the numerically computed Green's
    function along the chosen arc normal; cross-validation only."""
    a = artifacts
    from .openup import _arc_param_of
    t = _arc_param_of(a.trace, a.z0)
    n2 = a.arc.normal2(t)
    direction = n2 if side == "n2" else -n2
    g = a.green_arc(a.z0 + h * direction)
    return g / h
