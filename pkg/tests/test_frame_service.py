"""
Unit tests for charts, coordinate coframes and adapted frames
"""

import math

import numpy as np
import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent / 'backend'))

from services.catalog_service import catalog
from services.clifford_service import Multivector, Signature
from services.frame_service import (coordinate_frame, frame_point, induced_metric, orthonormalize)
from services.oracle_service import fd_jacobian
from utils.errors import DegenerateTangent, InsufficientJetOrder, IsotropicDirection
from utils.sampling import random_points


def close(a: Multivector, b: Multivector, tol: float = 1e-10) -> bool:
    return np.allclose(a.value(), b.value(), atol=tol)


class TestCoordinateFrame:
    """Test gamma_i construction"""

    def setup_method(self):
        """Setup test fixtures"""
        self.plane = catalog.build('plane')
        self.sphere = catalog.build('sphere')

    def test_plane_coordinate_frame(self):
        sig = self.plane.signature
        gammas = coordinate_frame(self.plane, (0.3, -0.4), 1)
        assert close(gammas[0], Multivector.basis_vector(sig, 0))
        assert close(gammas[1], Multivector.basis_vector(sig, 1))

    def test_sphere_equator(self):
        sig = self.sphere.signature
        gammas = coordinate_frame(self.sphere, (0.0, math.pi / 2), 1)
        assert close(gammas[0], Multivector.basis_vector(sig, 1))
        assert close(gammas[1], -Multivector.basis_vector(sig, 2))

    def test_helicoid_matches_finite_differences(self):
        chart = catalog.build('helicoid')
        for point in random_points(chart.domain, 5, 3):
            gammas = coordinate_frame(chart, point, 1)
            jet = np.array([g.value()[[1, 2, 4]] for g in gammas])
            assert np.allclose(jet, fd_jacobian(chart, point), atol=1e-6)

    def test_order_zero_has_no_tangents(self):
        with pytest.raises(InsufficientJetOrder):
            coordinate_frame(self.sphere, (0.5, 1.0), 0)


class TestOrthonormalize:
    """Test indefinite Gram-Schmidt"""

    def test_orthonormal_input_is_unchanged(self):
        sig = Signature.parse('+,+,+')
        vectors = [Multivector.basis_vector(sig, i) for i in range(3)]
        result = orthonormalize(vectors, sig)
        assert result.signs == [1, 1, 1]
        for original, out in zip(vectors, result.coforms):
            assert close(original, out)

    def test_lorentzian_sequential(self):
        sig = Signature.parse('+,-')
        first = Multivector.vector(sig, [1.0, 0.5])
        second = Multivector.basis_vector(sig, 1)
        result = orthonormalize([first, second], sig, pivot='sequential')
        assert result.signs[0] == 1
        assert close(result.coforms[0], first.scale(1.0 / math.sqrt(0.75)))
        assert result.signs[1] == -1
        assert result.coforms[0].dot(result.coforms[1]).value == pytest.approx(0.0, abs=1e-12)

    def test_max_pivot_prefers_largest_norm(self):
        sig = Signature.parse('+,-')
        first = Multivector.vector(sig, [1.0, 0.5])
        second = Multivector.basis_vector(sig, 1)
        result = orthonormalize([first, second], sig)
        assert result.pivots == [1, 0]
        assert result.signs == [-1, 1]
        assert abs(result.coforms[0].dot(result.coforms[0]).value) == pytest.approx(1.0)

    def test_lightlike_vector(self):
        sig = Signature.parse('+,-')
        with pytest.raises(IsotropicDirection):
            orthonormalize([Multivector.vector(sig, [1.0, 1.0])], sig)

    def test_dependent_vectors(self):
        sig = Signature.parse('+,+,+')
        v = Multivector.vector(sig, [1.0, 2.0, 0.0])
        with pytest.raises(DegenerateTangent):
            orthonormalize([v, v.scale(2.0)], sig)


class TestInducedMetric:
    """Test the pullback metric"""

    def test_sphere_first_fundamental_form(self):
        sphere = catalog.build('sphere')
        theta = 1.1
        g = induced_metric(sphere, (0.4, theta))
        assert g == pytest.approx(np.diag([math.sin(theta) ** 2, 1.0]))

    def test_plane_identity(self):
        assert induced_metric(catalog.build('plane'), (0.1, 0.2)) == pytest.approx(np.eye(2))

    def test_de_sitter_signature(self):
        ds2 = catalog.build('ds2')
        t = 0.6
        g = induced_metric(ds2, (t, 1.0))
        assert abs(np.linalg.det(g)) == pytest.approx(math.cosh(t) ** 2)
        assert g[0, 0] * g[1, 1] < 0


class TestFramePoint:
    """Test adapted frames"""

    def test_plane_frame(self):
        plane = catalog.build('plane')
        sig = plane.signature
        frame = frame_point(plane, (0.2, 0.3))
        assert close(frame.theta[0], Multivector.basis_vector(sig, 0))
        assert close(frame.theta[1], Multivector.basis_vector(sig, 1))
        assert abs(frame.normal[0].value()[4]) == pytest.approx(1.0)
        assert close(frame.I_m, Multivector.blade(sig, 0b011))

    def test_sphere_radial_normal(self):
        sphere = catalog.build('sphere')
        frame = frame_point(sphere, (0.0, math.pi / 2))
        assert abs(frame.normal[0].value()[1]) == pytest.approx(1.0)
        assert frame.gram() == pytest.approx(np.eye(3), abs=1e-12)

    def test_clifford_torus_two_normals(self):
        torus = catalog.build('clifford-torus')
        frame = frame_point(torus, (0.7, 2.1))
        assert len(frame.normal) == 2
        assert frame.gram() == pytest.approx(np.eye(4), abs=1e-12)
        assert frame.signature_record() == {'tangent': '++', 'normal': '++'}

    def test_de_sitter_signs(self):
        frame = frame_point(catalog.build('ds2'), (0.2, 1.0))
        assert sorted(frame.eta_tangent) == [-1, 1]
        assert frame.eta_normal == [-1]

    def test_jet_orthonormality(self):
        frame = frame_point(catalog.build('torus'), (0.4, 1.3))
        for a in frame.theta:
            for b in frame.theta:
                assert np.abs(a.dot(b).coeffs[1:]).max() < 1e-10

    def test_frame_vector_duality(self):
        chart = catalog.build('paraboloid')
        frame = frame_point(chart, (0.3, -0.2))
        for a in range(2):
            e_a = [c.value for c in frame.frame_vector(a)]
            for b in range(2):
                pairing = sum(e_a[i] * frame.theta[b].dot(frame.gamma[i]).value for i in range(2))
                assert pairing == pytest.approx(1.0 if a == b else 0.0, abs=1e-12)


if __name__ == '__main__':
    pytest.main([__file__])
