"""
Unit tests for Killing fields, the Maxwell encoding and the hills report
"""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent / 'backend'))

from services.catalog_service import catalog
from services.extensor_service import GeometryContext
from services.killing_service import (exterior_and_coderivative, hills_report, killing_residual,
                                      maxwell_encoding_residual, survey_field)
from services.manifest_service import resolve_target
from utils.sampling import random_points

THREE_SPHERE_MANIFEST = """
[ambient]
signature = +,+,+,+

[chart]
params = chi, theta, phi
chi = 0..pi
theta = 0..pi
phi = 0..2*pi

[embedding]
x1 = cos(chi)
x2 = sin(chi)*cos(theta)
x3 = sin(chi)*sin(theta)*cos(phi)
x4 = sin(chi)*sin(theta)*sin(phi)
"""


class TestKillingResidual:
    """Test the symmetrized covariant derivative of known fields"""

    def test_plane_translation(self):
        chart = catalog.build('plane')
        ctx = GeometryContext.at(chart, (0.4, -0.2))
        result = killing_residual(ctx, catalog.find_field(chart, 'tx'))
        assert result['killing_norm'] < 1e-12
        assert result['div_norm'] < 1e-12

    def test_sphere_rotation(self):
        chart = catalog.build('sphere')
        ctx = GeometryContext.at(chart, (1.0, 0.9))
        result = killing_residual(ctx, catalog.find_field(chart, 'rot_z'))
        assert result['killing_norm'] < 1e-9
        assert result['matrix'].shape == (2, 2)

    def test_de_sitter_boost(self):
        chart = catalog.build('ds2')
        ctx = GeometryContext.at(chart, (0.3, 1.2))
        result = killing_residual(ctx, catalog.find_field(chart, 'boost'))
        assert result['killing_norm'] < 1e-9

    def test_twist_control_fails(self):
        chart = catalog.build('sphere')
        twist = catalog.find_field(chart, 'twist')
        assert twist.control
        rows = survey_field(chart, twist, random_points(chart.domain, 4, 42))
        assert max(row['killing_norm'] for row in rows) > 0.1
        assert any(row['precondition'] for row in rows)

    def test_shear_control_fails(self):
        chart = catalog.build('plane')
        ctx = GeometryContext.at(chart, (0.0, 0.5))
        assert killing_residual(ctx, catalog.find_field(chart, 'shear'))['killing_norm'] > 0.1


class TestMaxwellEncoding:
    """Test the field strength of Killing 1-forms"""

    def test_sphere_rotation_residuals(self):
        chart = catalog.build('sphere')
        ctx = GeometryContext.at(chart, (0.5, 1.3))
        result = maxwell_encoding_residual(ctx, catalog.find_field(chart, 'rot_z'))
        assert result['precondition'] is None
        assert result['F'].norm() > 0.1
        assert result['residual'] < 1e-8
        assert result['codifferential_residual'] < 1e-8
        assert result['dalembertian_residual'] < 1e-8
        assert result['dF'].norm() < 1e-10

    def test_torus_rotation(self):
        chart = catalog.build('torus')
        ctx = GeometryContext.at(chart, (0.2, 2.4))
        result = maxwell_encoding_residual(ctx, catalog.find_field(chart, 'rot_z'))
        assert result['residual'] < 1e-8

    def test_translation_has_no_field_strength(self):
        chart = catalog.build('plane')
        rows = survey_field(chart, catalog.find_field(chart, 'ty'), [(0.1, 0.2), (-0.5, 0.7)])
        for row in rows:
            assert row['field_strength_norm'] < 1e-12
            assert row['maxwell_residual'] < 1e-12
            assert row['precondition'] is None

    def test_control_keeps_computing(self):
        chart = catalog.build('plane')
        ctx = GeometryContext.at(chart, (0.3, 0.3))
        result = maxwell_encoding_residual(ctx, catalog.find_field(chart, 'shear'))
        assert result['precondition'] is not None
        assert 'F' in result


class TestDecompositions:
    """Test the square of the Dirac operator on 1-forms"""

    def test_hodge_and_dalembertian(self):
        chart = catalog.build('torus')
        ctx = GeometryContext.at(chart, (0.6, 0.8))
        A = catalog.find_field(chart, 'rot_z').oneform(ctx)
        parts = exterior_and_coderivative(ctx, A)
        assert np.allclose(parts['box'].value(), parts['hodge'].value(), atol=1e-9)
        assert np.allclose(parts['remainder'].value(), parts['dalembertian'].value(), atol=1e-8)


class TestHillsReport:
    """Test the vacuum report"""

    def test_plane_is_vacuum(self):
        report = hills_report(GeometryContext.at(catalog.build('plane'), (0.2, 0.2)))
        assert report['vacuum']
        assert report['trace'] == 'undetermined (m=2)'

    def test_clifford_torus_is_vacuum(self):
        report = hills_report(GeometryContext.at(catalog.build('clifford-torus'), (0.5, 1.5)))
        assert report['vacuum']
        assert report['max_shape_norm'] > 0.5

    def test_sphere_is_not_vacuum(self):
        report = hills_report(GeometryContext.at(catalog.build('sphere'), (1.0, 1.0)))
        assert not report['vacuum']
        for frame in report['frames']:
            assert frame['residual'] < 1e-8

    def test_three_sphere_trace(self):
        chart, _ = resolve_target(manifest_text=THREE_SPHERE_MANIFEST)
        ctx = GeometryContext.at(chart, (1.0, 1.2, 0.5))
        report = hills_report(ctx)
        assert not report['vacuum']
        assert abs(report['trace']) == pytest.approx(12.0, abs=1e-7)
        assert report['trace_closure'] < 1e-8
        for a, frame in enumerate(report['frames']):
            assert frame['residual'] < 1e-7
            assert np.allclose(frame['source'].value(), ctx.theta[a].scale(-4.0).value(), atol=1e-7)
            assert np.allclose(frame['rhs'].value(), ctx.theta[a].scale(2.0).value(), atol=1e-7)
            assert np.allclose(frame['shape_squared'].value(), ctx.theta[a].scale(-2.0).value(), atol=1e-7)


if __name__ == '__main__':
    pytest.main([__file__])
