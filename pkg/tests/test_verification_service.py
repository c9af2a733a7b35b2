"""
Unit tests for the identity suite and its report
"""

import json

import pytest
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent / 'backend'))

from models.records import CheckRecord, Tolerance, VerifyReport
from services.catalog_service import catalog
from services.curvature_service import SIGN_LEDGER
from services.manifest_service import resolve_target
from services.verification_service import (CHECK_GROUPS, VerificationService, exit_code_for, observed_sign,
                                           run_verify)
from utils.sampling import LCG64


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


class TestExitCodes:
    """Test status aggregation"""

    def _record(self, status: str) -> CheckRecord:
        return CheckRecord.failed('x', 'x = x', status, '') if status != 'pass' else \
            CheckRecord.vanishes('x', 'x = 0', 0.0, Tolerance())

    def test_all_pass(self):
        assert exit_code_for([self._record('pass'), self._record('pass')]) == 0

    def test_failure_dominates(self):
        records = [self._record('pass'), self._record('insufficient_order'), self._record('fail')]
        assert exit_code_for(records) == 1

    def test_error_is_failure(self):
        assert exit_code_for([self._record('error')]) == 1

    def test_order_shortfall_only(self):
        assert exit_code_for([self._record('pass'), self._record('insufficient_order')]) == 3

    def test_observed_sign(self):
        assert observed_sign([1.0, 2.0], [1.0, 2.0]) == 1
        assert observed_sign([1.0, 2.0], [-1.0, -2.0]) == -1
        assert observed_sign([0.0], [1.0]) is None

    def test_literal_residual_under_quoted_sign(self):
        record = CheckRecord.compare('flip', 'a = -b', [1.0, 2.0], [-1.0, -2.0], Tolerance(), sign=-1, literal=1)
        assert record.passed
        assert record.abs_residual == 0.0
        assert record.literal_residual == pytest.approx(2.0 * 5.0 ** 0.5)
        assert CheckRecord.compare('same', 'a = b', 1.0, 1.0, Tolerance()).literal_residual is None


class TestRunVerify:
    """Test whole-suite runs on small sample counts"""

    def test_plane_passes(self):
        report = run_verify(catalog.build('plane'), samples=2, seed=1)
        assert report.exit_code == 0
        assert report.summary['fail'] == 0
        assert report.summary['pass'] > 20
        assert report.orientation == {'tangent': '++', 'normal': '+'}

    def test_sphere_passes(self):
        report = run_verify(catalog.build('sphere'), samples=2, seed=42)
        failures = [r.name for r in report.checks if r.status != 'pass']
        assert failures == []
        names = {r.name for r in report.checks}
        assert 'killing_negative_control' in names

    def test_lorentzian_passes(self):
        report = run_verify(catalog.build('ds2'), samples=2, seed=3,
                            groups=('frame', 'shape', 'curvature'))
        assert report.exit_code == 0

    def test_deterministic(self):
        chart = catalog.build('torus')
        first = run_verify(chart, samples=1, seed=9, groups=('frame', 'curvature'))
        second = run_verify(chart, samples=1, seed=9, groups=('frame', 'curvature'))
        assert first.model_dump() == second.model_dump()

    def test_low_order_is_reported(self):
        report = run_verify(catalog.build('sphere'), samples=1, seed=5, order=2)
        assert report.summary['insufficient_order'] > 0
        assert report.exit_code == 3

    def test_explicit_points(self):
        report = run_verify(catalog.build('plane'), points=[(0.0, 0.0)], groups=('frame',))
        assert report.samples == 1
        assert all(r.point == [0.0, 0.0] for r in report.checks)

    def test_report_serializes(self):
        report = run_verify(catalog.build('plane'), samples=1, groups=('frame',))
        payload = json.loads(report.model_dump_json())
        assert payload['target'] == 'plane'
        assert VerifyReport.model_validate(payload).exit_code == report.exit_code

    def test_sign_ledger_observed(self):
        report = run_verify(catalog.build('paraboloid'), samples=1, seed=2, groups=('curvature',))
        entries = {e.relation: e for e in report.sign_ledger}
        assert len(entries) == len(report.sign_ledger)
        for entry in report.sign_ledger:
            assert entry.observed in (None, entry.expected)

    def test_sign_ledger_literal_residual(self):
        report = run_verify(catalog.build('paraboloid'), samples=1, seed=2, groups=('curvature',))
        entries = {e.relation: e for e in report.sign_ledger}
        doubled = entries[SIGN_LEDGER['ricci_doubled'].relation]
        assert doubled.expected == -doubled.literal
        assert doubled.literal_residual > 1e-3
        scalar = entries[SIGN_LEDGER['scalar_oracle'].relation]
        assert scalar.literal_residual < 1e-4
        maxwell = entries[SIGN_LEDGER['dirac_maxwell'].relation]
        assert maxwell.literal_residual is None


class TestPointStreams:
    """Test per-point random streams"""

    def test_stream_is_deterministic(self):
        first = LCG64.stream(42, 3)
        second = LCG64.stream(42, 3)
        assert [first.next_u64() for _ in range(4)] == [second.next_u64() for _ in range(4)]

    def test_streams_differ_by_index(self):
        assert LCG64.stream(42, 0).next_u64() != LCG64.stream(42, 1).next_u64()
        assert LCG64.stream(42, 0).next_u64() == LCG64(42).next_u64()

    def test_point_outcome_ignores_neighbours(self):
        service = VerificationService(catalog.build('torus'), groups=('connection', 'operators'))
        points = [(0.3, 0.4), (1.1, 2.0)]
        fields = catalog.killing_fields(service.chart)
        alone = service.run_point(1, points[1], 7, fields)
        together = service.run_points(points, seed=7)
        assert [r.model_dump() for r in together if r.point == [1.1, 2.0]] == \
            [r.model_dump() for r in alone.records]


class TestVerificationService:
    """Test individual check groups"""

    def test_groups_are_known(self):
        assert CHECK_GROUPS[0] == 'frame'
        assert 'hills' in CHECK_GROUPS

    def test_degenerate_point_is_an_error(self):
        service = VerificationService(catalog.build('sphere'), groups=('frame',))
        records = service.run_points([(1.0, 0.0)])
        assert records[0].status == 'error'

    def test_clifford_torus_hills(self):
        service = VerificationService(catalog.build('clifford-torus'), groups=('hills',))
        records = service.run_points([(0.5, 1.0)])
        assert records
        assert all(r.status == 'pass' for r in records)

    def test_every_group_runs(self):
        service = VerificationService(catalog.build('plane'))
        assert service.groups == list(CHECK_GROUPS)
        for group in CHECK_GROUPS:
            assert callable(getattr(service, f'{group}_checks'))
        records = service.run_points([(0.1, 0.2)], seed=1)
        assert exit_code_for(records) == 0
        names = {r.name for r in records}
        assert {'exterior_nilpotent', 'dirac_square_hodge', 'killing_negative_control'} <= names

    def test_three_sphere_trace_closure(self):
        chart, _ = resolve_target(manifest_text=THREE_SPHERE_MANIFEST)
        service = VerificationService(chart, groups=('hills',))
        records = service.run_points([(1.0, 1.2, 0.5)])
        names = [r.name for r in records]
        assert names.count('hills_rearrangement') == 3
        assert 'hills_trace_closure' in names
        assert all(r.status == 'pass' for r in records)

    def test_parallel_points_match_serial(self):
        chart = catalog.build('sphere')
        serial = run_verify(chart, samples=3, seed=11, groups=('curvature', 'killing'))
        pooled = run_verify(chart, samples=3, seed=11, groups=('curvature', 'killing'), workers=2)
        assert pooled.model_dump() == serial.model_dump()

    def test_order_is_bounded(self):
        with pytest.raises(ValueError, match='0..3'):
            run_verify(catalog.build('plane'), samples=1, order=4)


if __name__ == '__main__':
    pytest.main([__file__])
