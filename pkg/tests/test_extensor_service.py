"""
Unit tests for projection, shape and connection extensors
"""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent / 'backend'))

from services.catalog_service import catalog
from services.clifford_service import Multivector
from services.extensor_service import GeometryContext
from utils.errors import InsufficientJetOrder, NotTangent
from utils.sampling import LCG64


class TestProjection:
    """Test P and its complement on the flat plane"""

    def setup_method(self):
        """Setup test fixtures"""
        self.ctx = GeometryContext.at(catalog.build('plane'), (0.1, -0.3))
        self.sig = self.ctx.sig

    def test_tangent_vector_is_fixed(self):
        e1 = Multivector.basis_vector(self.sig, 0)
        assert np.allclose(self.ctx.project(e1).value(), e1.value())

    def test_normal_vector_is_killed(self):
        e3 = Multivector.basis_vector(self.sig, 2)
        assert self.ctx.project(e3).norm() < 1e-12
        assert np.allclose(self.ctx.project_perp(e3).value(), e3.value())

    def test_mixed_bivector_is_killed(self):
        e13 = Multivector.blade(self.sig, 0b101)
        assert self.ctx.project(e13).norm() < 1e-12

    def test_projection_is_idempotent(self):
        rng = LCG64(11)
        field = self.ctx.random_field(rng)
        once = self.ctx.project(field)
        assert np.allclose(self.ctx.project(once).coeffs, once.coeffs, atol=1e-10)

    def test_plane_has_no_shape(self):
        for shape in self.ctx.shape_frame:
            assert shape.norm() < 1e-12

    def test_order_zero_context(self):
        frame = GeometryContext.at(catalog.build('plane'), (0.1, 0.2), order=1).frame
        frame.order = 0
        with pytest.raises(InsufficientJetOrder):
            GeometryContext(frame)


class TestShape:
    """Test the shape biform on curved surfaces"""

    def setup_method(self):
        """Setup test fixtures"""
        self.sphere = GeometryContext.at(catalog.build('sphere', r=2.0), (0.4, 1.1))
        self.torus = GeometryContext.at(catalog.build('torus'), (0.3, 0.9))

    def test_sphere_shape_magnitude(self):
        for a in range(2):
            assert self.sphere.shape_biform(self.sphere.theta[a]).norm() == pytest.approx(0.5)

    def test_shape_is_purely_mixed(self):
        for a in range(2):
            shape = self.torus.shape_biform(self.torus.theta[a])
            assert self.torus.project(shape).norm() < 1e-10

    def test_shape_is_symmetric(self):
        u, v = self.torus.theta
        lhs = self.torus.shape_biform(u).rc(v)
        rhs = self.torus.shape_biform(v).rc(u)
        assert np.allclose(lhs.value(), rhs.value(), atol=1e-10)

    def test_two_constructions_agree(self):
        for a in range(2):
            v = self.torus.theta[a]
            lhs = self.torus.shape_biform(v)
            rhs = self.torus.shape_biform_from_coframe(v)
            assert np.allclose(lhs.value(), rhs.value(), atol=1e-10)

    def test_normal_argument_rejected(self):
        with pytest.raises(NotTangent):
            self.torus.shape_biform(self.torus.normal[0])

    def test_pseudoscalar_is_parallel(self):
        for a in range(2):
            moved = self.torus.covariant_derivative(self.torus.theta[a], self.torus.I)
            assert moved.norm() < 1e-10

    def test_covariant_derivative_stays_tangent(self):
        rng = LCG64(5)
        field = self.torus.random_tangent_field(rng)
        for a in range(2):
            moved = self.torus.covariant_derivative(self.torus.theta[a], field)
            assert self.torus.tangent_residual(moved) < 1e-10

    def test_unit_sphere_normal_derivative(self):
        ctx = GeometryContext.at(catalog.build('sphere'), (1.2, 0.8))
        nu = ctx.normal[0]
        outward = float(np.dot(nu.value()[[1, 2, 4]], ctx.frame.position)) > 0
        for u in ctx.theta:
            moved = ctx.p_u_extensor(u, nu)
            expected = -u if outward else u
            assert np.allclose(moved.value(), expected.value(), atol=1e-10)


class TestConnection:
    """Test connection coefficients and biforms"""

    def test_plane_connection_vanishes(self):
        ctx = GeometryContext.at(catalog.build('plane'), (0.5, 0.5))
        arrays = ctx.connection_arrays()
        assert np.abs(arrays['omega']).max() < 1e-12
        assert np.abs(arrays['lie']).max() < 1e-12

    def test_lowered_coefficients_antisymmetric(self):
        ctx = GeometryContext.at(catalog.build('torus'), (1.0, 2.0))
        omega = ctx.connection_arrays()['omega']
        eta = np.array(ctx.eta, dtype=float)
        lowered = eta[:, None, None] * omega
        assert np.allclose(lowered, -np.transpose(lowered, (2, 1, 0)), atol=1e-10)

    def test_connection_biform_is_tangent(self):
        ctx = GeometryContext.at(catalog.build('sphere'), (0.7, 1.3))
        for a in range(2):
            biform = ctx.connection_biform(ctx.theta[a])
            assert ctx.tangent_residual(biform) < 1e-10

    def test_codimension_one_normal_block(self):
        ctx = GeometryContext.at(catalog.build('paraboloid'), (0.2, 0.4))
        for a in range(2):
            assert ctx.normal_block(ctx.theta[a]).norm() < 1e-12

    def test_extensor_bundle(self):
        ctx = GeometryContext.at(catalog.build('helicoid'), (0.3, 1.0))
        bundle = ctx.connection_extensor()
        assert bundle['omega'].shape == (2, 2, 2)
        assert bundle['d_omega'].shape == (2, 2, 2, 2)
        sample = bundle['omega_extensor']
        direct = ctx.connection_biform(ctx.theta[1])
        assert np.allclose(sample.apply(ctx.theta[1]).value(), direct.value(), atol=1e-10)


if __name__ == '__main__':
    pytest.main([__file__])
