import numpy as np
import pytest

from arcbernstein.algebra import SampledCurve
from arcbernstein.conformal import (
    LaurentMap,
    PowerMap,
    estimate_C4_C5,
    fit_exterior_map,
    fit_interior_map,
    normalize_pair,
    psi_build,
    transition_eval,
    validated_extension_margin,
)
from arcbernstein.errors import DomainError, UnsupportedGeometryError
from arcbernstein.openup import ParamArc, build_open_up, trace_boundary


def circle_curve(center=0.0, radius=1.0, n=512):
    th = np.linspace(0, 2 * np.pi, n + 1)
    pts = center + radius * np.exp(1j * th)
    return SampledCurve(pts, th, closed=True,
                        fn=lambda t: center + radius * np.exp(1j * np.asarray(t)))


@pytest.fixture(scope="module")
def parabola_trace():
    arc = ParamArc([0.2j, 1.0, 0.2j])
    ou = build_open_up(list(arc.endpoints()))
    return trace_boundary(ou, arc, n_samples=512)


class TestFits:
    def test_exterior_identity(self):
        m = fit_exterior_map(circle_curve(), M=16)
        assert m.cap == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(m.coeffs)) < 1e-12

    def test_exterior_affine(self):
        m = fit_exterior_map(circle_curve(center=1.0, radius=2.0), M=16)
        assert m.cap == pytest.approx(2.0, abs=1e-12)
        assert m.coeffs[0] == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(m.coeffs[1:])) < 1e-12

    def test_interior_identity(self):
        m = fit_interior_map(circle_curve(), M=16)
        assert m.coeffs[1] == pytest.approx(1.0, abs=1e-12)
        assert abs(m.coeffs[0]) < 1e-12

    def test_interior_affine(self):
        m = fit_interior_map(circle_curve(center=1.0, radius=2.0), M=16)
        assert m.coeffs[0] == pytest.approx(1.0, abs=1e-12)
        assert m.coeffs[1] == pytest.approx(2.0, abs=1e-12)

    def test_parabola_trace_residual(self, parabola_trace):
        ext = fit_exterior_map(parabola_trace.combined, M=64)
        assert ext.boundary_residual <= 1e-7
        inte = fit_interior_map(parabola_trace.combined, M=64)
        assert inte.boundary_residual <= 1e-7

    def test_non_star_like_rejected(self):
        # a limaçon-like loop that is not star-like about its centroid
        th = np.linspace(0, 2 * np.pi, 1025)
        pts = (0.48 + np.cos(th)) * np.exp(1j * th) * 0.5
        pts[-1] = pts[0]
        curve = SampledCurve(pts, th, closed=True)
        with pytest.raises(UnsupportedGeometryError):
            fit_exterior_map(curve, M=32)


class TestNormalize:
    def test_identity_at_one(self):
        ext = fit_exterior_map(circle_curve(), M=16)
        inte = fit_interior_map(circle_curve(), M=16)
        pair = normalize_pair(inte, ext, 1.0, interior_pole=0.0)
        assert pair.t2 == pytest.approx(0.0, abs=1e-12)
        assert pair.a2 is None
        assert pair.a1 == pytest.approx(0.0, abs=1e-10)
        assert complex(pair.phi1(1.0)) == pytest.approx(1.0, abs=1e-10)
        assert abs(pair.phi2_deriv(1.0)) == pytest.approx(1.0, abs=1e-10)

    def test_scaled_circle(self):
        ext = fit_exterior_map(circle_curve(radius=2.0), M=16)
        inte = fit_interior_map(circle_curve(radius=2.0), M=16)
        pair = normalize_pair(inte, ext, 2.0)
        assert pair.t2 == pytest.approx(-1 / 3, abs=1e-10)
        assert pair.a2 == pytest.approx(-3.0, abs=1e-9)
        assert abs(pair.phi2_deriv(1.0)) == pytest.approx(1.0, abs=1e-10)
        assert abs(pair.phi1_deriv(1.0)) == pytest.approx(1.0, abs=1e-10)

    def test_u0_off_boundary(self):
        ext = fit_exterior_map(circle_curve(), M=16)
        inte = fit_interior_map(circle_curve(), M=16)
        with pytest.raises(DomainError):
            normalize_pair(inte, ext, 5.0 + 5j)

    def test_parabola_normalization(self, parabola_trace):
        ext = fit_exterior_map(parabola_trace.combined, M=64)
        inte = fit_interior_map(parabola_trace.combined, M=64)
        u0 = parabola_trace.combined.points[130]
        pair = normalize_pair(inte, ext, u0,
                              interior_pole=parabola_trace.open_up.ustar)
        assert abs(complex(pair.phi1(1.0)) - u0) < 1e-8
        assert abs(complex(pair.phi2(1.0)) - u0) < 1e-8
        assert abs(abs(complex(pair.phi1_deriv(1.0))) - 1) < 1e-8
        assert abs(abs(complex(pair.phi2_deriv(1.0))) - 1) < 1e-8
        assert abs(pair.a1) < 1.0


class TestPsi:
    def test_a2_two(self):
        psi = psi_build(2.0)
        assert psi.b1 == pytest.approx(1.0)
        assert psi(1.0) == pytest.approx(1.0)
        assert abs(psi(2.0 + 1e-30)) > 1e20  # pole at a2

    def test_identity_convention(self):
        psi = psi_build(None)
        assert psi.b1 == 1.0
        assert psi(0.3 + 0.4j) == pytest.approx(0.3 + 0.4j)

    def test_a2_2i(self):
        psi = psi_build(2j)
        assert abs(psi.b1) == pytest.approx(1.0)
        assert psi.b1 == pytest.approx((1 + 2j) / (1 - 2j))

    def test_inside_rejected(self):
        with pytest.raises(DomainError):
            psi_build(0.5)

    def test_circle_preserved(self):
        psi = psi_build(1.5 - 0.7j)
        th = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
        assert np.max(np.abs(np.abs(psi(np.exp(1j * th))) - 1)) < 1e-10

    def test_inverse(self):
        psi = psi_build(-2.5 + 1j)
        w = np.array([1.2, 0.8j, -1.1 + 0.3j])
        np.testing.assert_allclose(psi(psi.inv(w)), w, rtol=1e-12)


class TestTransition:
    def test_identity_geometry(self):
        ext = fit_exterior_map(circle_curve(), M=16)
        inte = fit_interior_map(circle_curve(), M=16)
        pair = normalize_pair(inte, ext, 1.0)
        psi = psi_build(pair.a2)
        for w in (1.0, 1.05, 1.02j + 1.0 * np.exp(0.3j)):
            w = w / abs(w) * min(abs(w), 1.05)
            val, dval = transition_eval(pair, psi, w)
            assert val == pytest.approx(w, abs=1e-8)
            assert dval == pytest.approx(1.0, abs=1e-6)

    def test_parabola_unit_derivative_at_b1(self, parabola_trace):
        ext = fit_exterior_map(parabola_trace.combined, M=64)
        inte = fit_interior_map(parabola_trace.combined, M=64)
        u0 = parabola_trace.combined.points[200]
        pair = normalize_pair(inte, ext, u0,
                              interior_pole=parabola_trace.open_up.ustar)
        psi = psi_build(pair.a2)
        val, dval = transition_eval(pair, psi, psi.b1)
        assert abs(val) == pytest.approx(1.0, abs=1e-7)
        assert abs(dval) == pytest.approx(1.0, abs=1e-6)

    def test_circle_to_circle(self, parabola_trace):
        ext = fit_exterior_map(parabola_trace.combined, M=64)
        inte = fit_interior_map(parabola_trace.combined, M=64)
        u0 = parabola_trace.combined.points[200]
        pair = normalize_pair(inte, ext, u0,
                              interior_pole=parabola_trace.open_up.ustar)
        psi = psi_build(pair.a2)
        for th in np.linspace(0.1, 6.0, 7):
            val, _ = transition_eval(pair, psi, np.exp(1j * th))
            assert abs(abs(val) - 1.0) < 1e-7


class TestC4C5:
    def test_identity_geometry(self):
        ext = fit_exterior_map(circle_curve(), M=16)
        inte = fit_interior_map(circle_curve(), M=16)
        pair = normalize_pair(inte, ext, 1.0)
        psi = psi_build(pair.a2)
        c4, c5 = estimate_C4_C5(pair, psi, 0.05, n_ang=64, n_rad=8)
        assert c4 == pytest.approx(1.0, abs=1e-7)
        assert c5 == pytest.approx(0.0, abs=1e-6)

    def test_margin_guard(self):
        ext = fit_exterior_map(circle_curve(), M=16)
        inte = fit_interior_map(circle_curve(), M=16)
        pair = normalize_pair(inte, ext, 1.0)
        psi = psi_build(pair.a2)
        with pytest.raises(DomainError):
            estimate_C4_C5(pair, psi, 5.0)

    def test_parabola_finite(self, parabola_trace):
        ext = fit_exterior_map(parabola_trace.combined, M=64)
        inte = fit_interior_map(parabola_trace.combined, M=64)
        u0 = parabola_trace.combined.points[200]
        pair = normalize_pair(inte, ext, u0,
                              interior_pole=parabola_trace.open_up.ustar)
        psi = psi_build(pair.a2)
        d0 = validated_extension_margin(pair) / 2
        c4, c5 = estimate_C4_C5(pair, psi, d0, n_ang=64, n_rad=8)
        assert np.isfinite(c4) and c4 >= 1.0 - 1e-6
        assert np.isfinite(c5) and c5 >= 0.0


class TestComposition:
    def test_phi2_roundtrip(self, parabola_trace):
        ext = fit_exterior_map(parabola_trace.combined, M=64)
        inte = fit_interior_map(parabola_trace.combined, M=64)
        u0 = parabola_trace.combined.points[100]
        pair = normalize_pair(inte, ext, u0,
                              interior_pole=parabola_trace.open_up.ustar)
        for th in np.linspace(0, 2 * np.pi, 9, endpoint=False):
            v = 1.02 * np.exp(1j * th)
            u = complex(pair.phi2(v))
            assert abs(pair.phi2_inv(u) - v) < 1e-8
