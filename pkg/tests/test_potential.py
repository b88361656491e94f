import numpy as np
import pytest

from arcbernstein.errors import DomainError
from arcbernstein.openup import ParamArc, Segment
from arcbernstein.potential import (
    arc_factor,
    arc_normal_derivs,
    bernstein_walsh,
    build_arc_artifacts,
    fd_normal_probe,
    green_disk,
    green_exterior,
    green_segment,
    nd_disk,
    nd_exterior,
    nd_segment,
    transfer_nd,
)


class TestGreenDisk:
    def test_at_center(self):
        assert green_disk(0.5, 0.0) == pytest.approx(np.log(2))

    def test_boundary_zero(self):
        for th in (0.0, 1.0, 2.5):
            assert green_disk(np.exp(1j * th), 0.3 + 0.2j) == pytest.approx(0, abs=1e-12)

    def test_symmetry(self):
        assert green_disk(0.3, 0.5j) == pytest.approx(green_disk(0.5j, 0.3), abs=1e-12)


class TestNormalDerivs:
    def test_disk_center(self):
        for th in (0.0, 0.7, 3.1):
            assert nd_disk(np.exp(1j * th), 0.0).value == pytest.approx(1.0)

    def test_disk_half(self):
        assert nd_disk(1.0, 0.5).value == pytest.approx(3.0)

    def test_disk_matches_finite_difference(self):
        rng = np.random.default_rng(64)
        for _ in range(64):
            th = rng.uniform(0, 2 * np.pi)
            a = rng.uniform(0, 0.8) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            u = np.exp(1j * th)
            h = 1e-6
            fd = green_disk((1 - h) * u, a) / h
            assert nd_disk(u, a).value == pytest.approx(fd, abs=1e-5 * max(1, fd))

    def test_exterior_matches_finite_difference(self):
        rng = np.random.default_rng(65)
        for _ in range(64):
            u = np.exp(1j * rng.uniform(0, 2 * np.pi))
            a = rng.uniform(1.2, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            h = 1e-6
            fd = green_exterior((1 + h) * u, a) / h
            assert nd_exterior(u, a).value == pytest.approx(fd, abs=1e-5 * max(1, fd))

    def test_exterior_infinity(self):
        assert nd_exterior(1.0, None).value == 1.0
        assert nd_exterior(-1.0, None).value == 1.0

    def test_exterior_values(self):
        assert nd_exterior(1.0, 2.0).value == pytest.approx(3.0)
        assert nd_exterior(-1.0, 2.0).value == pytest.approx(1 / 3)

    def test_harmonic_measure_mass(self):
        # (1/2pi) * integral of nd over the circle is 1
        rng = np.random.default_rng(66)
        th = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        for _ in range(8):
            a = rng.uniform(0, 0.9) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            vals = np.array([nd_disk(np.exp(1j * t), a).value for t in th])
            assert np.mean(vals) == pytest.approx(1.0, abs=1e-8)


class TestSegment:
    def test_nd_zero(self):
        n1, n2 = nd_segment(0.0)
        assert n1.value == pytest.approx(1.0)
        assert n2.value == pytest.approx(1.0)

    def test_nd_half(self):
        n1, _ = nd_segment(0.5)
        assert n1.value == pytest.approx(2 / np.sqrt(3))

    def test_green_two(self):
        assert green_segment(2.0) == pytest.approx(np.log(2 + np.sqrt(3)))

    def test_green_fd(self):
        h = 1e-6
        for x0 in (0.0, 0.5, -0.7):
            fd = green_segment(x0 + 1j * h) / h
            assert nd_segment(x0)[0].value == pytest.approx(fd, rel=1e-4)

    def test_endpoint_rejected(self):
        with pytest.raises(DomainError):
            nd_segment(1.0)


class TestTransfer:
    def test_identity(self):
        nd = nd_exterior(1.0, None)
        assert transfer_nd(nd, 1.0).value == 1.0

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            transfer_nd(nd_exterior(1.0, None), 0.0)


class TestBernsteinWalsh:
    def test_boundary(self):
        assert bernstein_walsh(2.5, 10, 0.0) == 2.5

    def test_arithmetic(self):
        assert bernstein_walsh(1.0, 10, 0.1) == pytest.approx(np.e)

    def test_power_attains(self):
        # |u^n| on |u| = r equals the bound with g = log r
        n, r = 6, 1.5
        assert bernstein_walsh(1.0, n, np.log(r)) == pytest.approx(r ** n)


@pytest.fixture(scope="module")
def segment_artifacts():
    return {x0: build_arc_artifacts(Segment(-1, 1), x0)
            for x0 in (0.0, 0.3, -0.3, 0.7, -0.7)}


class TestArcFactor:
    def test_segment_oracle(self, segment_artifacts):
        for x0, art in segment_artifacts.items():
            want = 1.0 / np.sqrt(1 - x0 * x0)
            got = arc_factor(art.arc, x0, art)
            assert got == pytest.approx(want, abs=1e-6 * want)

    def test_segment_sides_equal(self, segment_artifacts):
        art = segment_artifacts[0.3]
        s1, s2 = arc_normal_derivs(art)
        assert s1.value == pytest.approx(s2.value, rel=1e-8)

    def test_parabola_sides_and_fd(self):
        arc = ParamArc([0.2j, 1.0, 0.2j])
        z0 = complex(arc.at(0.3))
        art = build_arc_artifacts(arc, z0)
        s1, s2 = arc_normal_derivs(art)
        assert abs(s1.value - s2.value) > 1e-3  # two-sided asymmetry
        fd1 = fd_normal_probe(art, "n1")
        fd2 = fd_normal_probe(art, "n2")
        assert s1.value == pytest.approx(fd1, abs=1e-4 * max(1, fd1))
        assert s2.value == pytest.approx(fd2, abs=1e-4 * max(1, fd2))

    def test_conformal_invariance_identity(self, segment_artifacts):
        # Green's function of the unbounded domain evaluated through the
        # exterior map equals log |psi(v)|
        art = segment_artifacts[0.0]
        for v in (1.3, 1.1 * np.exp(0.9j), 2.0 * np.exp(-2.1j)):
            u = complex(art.pair.phi2(v))
            want = np.log(abs(complex(art.psi(v))))
            assert art.green_g2(u) == pytest.approx(want, abs=1e-8)
