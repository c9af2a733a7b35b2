"""
Unit tests for curvature biforms, Ricci 1-forms and frame components
"""

import math

import numpy as np
import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent / 'backend'))

from services.catalog_service import catalog
from services.curvature_service import (CURVATURE_METHODS, SIGN_LEDGER, cartan_torsion, curvature_sample,
                                        curvature_scalar, frame_biforms, ledger_sign,
                                        riemann_torsion_components, ricci_oneform, torsion_extensor,
                                        validate_symmetries)
from services.extensor_service import GeometryContext
from services.oracle_service import classical_curvature
from utils.errors import ShapeMismatch


class TestCurvatureScalar:
    """Test the curvature scalar against known surfaces"""

    def test_plane_is_flat(self):
        ctx = GeometryContext.at(catalog.build('plane'), (0.3, 0.1))
        assert curvature_scalar(ctx) == pytest.approx(0.0, abs=1e-12)
        for value in frame_biforms(ctx).values():
            assert value.norm() < 1e-12

    def test_unit_sphere(self):
        ctx = GeometryContext.at(catalog.build('sphere'), (0.8, 1.2))
        assert curvature_scalar(ctx) == pytest.approx(2.0, abs=1e-9)

    def test_sphere_scales_with_radius(self):
        r = 3.0
        ctx = GeometryContext.at(catalog.build('sphere', r=r), (2.0, 0.7))
        assert curvature_scalar(ctx) == pytest.approx(2.0 / r ** 2, abs=1e-9)

    def test_hyperbolic_plane(self):
        ctx = GeometryContext.at(catalog.build('hyperbolic-h2'), (0.6, 1.0))
        assert curvature_scalar(ctx) == pytest.approx(-2.0, abs=1e-8)

    def test_clifford_torus_is_flat(self):
        ctx = GeometryContext.at(catalog.build('clifford-torus'), (1.1, 2.3))
        assert curvature_scalar(ctx) == pytest.approx(0.0, abs=1e-10)

    def test_torus_gaussian_curvature(self):
        chart = catalog.build('torus')
        R, r, theta = 2.0, 0.5, 0.9
        ctx = GeometryContext.at(chart, (0.4, theta))
        gaussian = math.cos(theta) / (r * (R + r * math.cos(theta)))
        assert curvature_scalar(ctx) == pytest.approx(2.0 * gaussian, abs=1e-9)

    @pytest.mark.parametrize('name', ['paraboloid', 'helicoid', 'ds2'])
    def test_matches_metric_oracle(self, name):
        chart = catalog.build(name)
        point = (0.3, 0.6)
        ctx = GeometryContext.at(chart, point)
        expected = classical_curvature(chart, point)['scalar']
        assert curvature_scalar(ctx) == pytest.approx(ledger_sign('scalar_oracle') * expected, abs=1e-8)


class TestCurvatureMethods:
    """Test that the biform constructions agree"""

    def setup_method(self):
        """Setup test fixtures"""
        self.ctx = GeometryContext.at(catalog.build('torus'), (0.5, 1.7))

    def test_methods_agree(self):
        reference = frame_biforms(self.ctx, 'shape')
        for method in CURVATURE_METHODS[1:]:
            other = frame_biforms(self.ctx, method)
            for key, value in reference.items():
                assert np.allclose(value.value(), other[key].value(), atol=1e-9), (method, key)

    def test_biforms_are_tangent(self):
        for value in frame_biforms(self.ctx).values():
            assert self.ctx.tangent_residual(value) < 1e-10

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            frame_biforms(self.ctx, 'bogus')


class TestRicci:
    """Test the Ricci 1-form constructions and their sign relations"""

    def setup_method(self):
        """Setup test fixtures"""
        self.ctx = GeometryContext.at(catalog.build('paraboloid'), (0.2, -0.4))

    def test_doubled_form(self):
        for a in range(2):
            v = self.ctx.theta[a]
            contract = ricci_oneform(self.ctx, v, 'contract')
            doubled = ricci_oneform(self.ctx, v, 'doubled')
            assert np.allclose(doubled.value(), ledger_sign('ricci_doubled') * contract.value(), atol=1e-9)

    def test_operator_form(self):
        for a in range(2):
            v = self.ctx.theta[a]
            contract = ricci_oneform(self.ctx, v, 'contract')
            operator = ricci_oneform(self.ctx, v, 'operator')
            assert np.allclose(operator.value(), ledger_sign('ricci_operator') * contract.value(), atol=1e-8)

    def test_ricci_is_tangent(self):
        for a in range(2):
            ricci = ricci_oneform(self.ctx, self.ctx.theta[a])
            assert self.ctx.tangent_residual(ricci) < 1e-10

    def test_ledger_keys(self):
        assert set(SIGN_LEDGER) >= {'ricci_doubled', 'ricci_operator', 'scalar_oracle'}
        assert all(entry.sign in (-1, 1) and entry.literal in (-1, 1) for entry in SIGN_LEDGER.values())
        assert ledger_sign('ricci_doubled') == -SIGN_LEDGER['ricci_doubled'].literal


class TestSymmetries:
    """Test Riemann symmetries on sampled points"""

    def test_torus_symmetries_pass(self):
        ctx = GeometryContext.at(catalog.build('torus'), (1.0, 0.4))
        records = validate_symmetries(curvature_sample(ctx))
        assert records
        assert all(record.status == 'pass' for record in records)

    def test_lorentzian_symmetries_pass(self):
        ctx = GeometryContext.at(catalog.build('ds2'), (0.4, 2.0))
        records = validate_symmetries(curvature_sample(ctx, 'pvpu'))
        assert all(record.status == 'pass' for record in records)

    @pytest.mark.parametrize('name, point', [('ds2', (0.4, 2.0)), ('hyperbolic-h2', (0.8, 1.1))])
    def test_indefinite_lowering(self, name, point):
        ctx = GeometryContext.at(catalog.build(name), point)
        sample = curvature_sample(ctx)
        R = sample.lowered
        eta = np.asarray(ctx.eta, dtype=float)
        assert np.allclose(R, -np.einsum('d,dcab->abcd', eta, sample.riemann))
        assert np.allclose(R, -R.transpose(1, 0, 2, 3), atol=1e-9)
        assert np.allclose(R, -R.transpose(0, 1, 3, 2), atol=1e-9)
        assert np.allclose(R, R.transpose(2, 3, 0, 1), atol=1e-9)
        biforms = frame_biforms(ctx)
        e01 = ctx.reciprocal(0).wedge(ctx.reciprocal(1))
        assert R[0, 1, 0, 1] == pytest.approx(biforms[(0, 1)].dot(e01).value, abs=1e-9)
        assert all(record.status == 'pass' for record in validate_symmetries(sample))


class TestFrameComponents:
    """Test curvature and torsion from connection coefficients"""

    def test_bracket_only_torsion(self):
        m = 2
        omega = np.zeros((m, m, m))
        lie = np.zeros((m, m, m))
        lie[0, 0, 1] = 1.0
        lie[0, 1, 0] = -1.0
        result = riemann_torsion_components(omega, lie, np.zeros((m, m, m, m)))
        assert result['torsion'][0, 0, 1] == pytest.approx(-1.0)
        assert result['torsion'][0, 1, 0] == pytest.approx(1.0)
        assert np.abs(result['riemann']).max() == 0.0

    def test_torsion_extensors(self):
        ctx = GeometryContext.at(catalog.build('plane'), (0.0, 0.0))
        m = 2
        lie = np.zeros((m, m, m))
        lie[0, 0, 1] = 1.0
        lie[0, 1, 0] = -1.0
        result = riemann_torsion_components(np.zeros((m, m, m)), lie, np.zeros((m, m, m, m)),
                                            coframe=ctx.theta, eta=ctx.eta)
        e12 = ctx.theta[0].wedge(ctx.theta[1])
        t = torsion_extensor(result, e12, ctx.theta)
        assert np.allclose(t.value(), -ctx.theta[0].value())
        cartan = cartan_torsion(result, ctx.theta[0], ctx.theta, ctx.eta)
        assert np.allclose(cartan.value(), -e12.value())

    def test_frame_arrays_match_biforms(self):
        ctx = GeometryContext.at(catalog.build('sphere'), (0.9, 1.4))
        arrays = ctx.connection_arrays()
        result = riemann_torsion_components(arrays['omega'], arrays['lie'], arrays['d_omega'])
        sample = curvature_sample(ctx)
        assert np.allclose(result['riemann'], sample.riemann, atol=1e-8)
        assert np.abs(result['torsion']).max() < 1e-9

    @pytest.mark.parametrize('name, point', [('ds2', (0.3, 1.7)), ('hyperbolic-h2', (0.6, 2.4))])
    def test_frame_arrays_match_biforms_indefinite(self, name, point):
        ctx = GeometryContext.at(catalog.build(name), point)
        arrays = ctx.connection_arrays()
        result = riemann_torsion_components(arrays['omega'], arrays['lie'], arrays['d_omega'])
        assert np.allclose(result['riemann'], curvature_sample(ctx).riemann, atol=1e-7)
        assert np.abs(result['riemann']).max() > 0.1

    def test_context_caches_frame_quantities(self):
        ctx = GeometryContext.at(catalog.build('torus'), (0.7, 0.9))
        first = frame_biforms(ctx)
        assert ('frame_biforms', 'shape') in ctx.cache
        first[(0, 1)] = None
        second = frame_biforms(ctx)
        assert second[(0, 1)] is not None
        assert np.allclose(second[(0, 1)].value(), frame_biforms(ctx)[(0, 1)].value())
        arrays = ctx.connection_arrays()
        assert 'connection_arrays' in ctx.cache
        assert np.array_equal(arrays['omega'], ctx.connection_arrays()['omega'])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            riemann_torsion_components(np.zeros((2, 2, 2)), np.zeros((3, 3, 3)), np.zeros((2, 2, 2, 2)))


if __name__ == '__main__':
    pytest.main([__file__])
