"""
Unit tests for the Clifford algebra service
"""

import numpy as np
import pytest
import sys
from pathlib import Path

from hypothesis import given, settings
from hypothesis.strategies import floats, lists

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent / 'backend'))

from services.clifford_service import (Multivector, Signature, commutator_x, graded_products,
                                       pseudoscalar_ops)
from services.jet_service import Jet, get_space
from utils.errors import GradeOutOfRange, NotOrthonormal, SignatureMismatch

coefficient = floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)


def close(a: Multivector, b: Multivector, tol: float = 1e-12) -> bool:
    return np.allclose(a.value(), b.value(), atol=tol)


class TestGeometricProduct:
    """Test blade products under arbitrary signatures"""

    def setup_method(self):
        """Setup test fixtures"""
        self.sig = Signature.parse('+,+,+')
        self.e1 = Multivector.basis_vector(self.sig, 0)
        self.e2 = Multivector.basis_vector(self.sig, 1)
        self.e3 = Multivector.basis_vector(self.sig, 2)

    def test_metric_normalization(self):
        assert close(self.e1 * self.e1, Multivector.scalar(self.sig, 1.0))

    def test_anticommutation(self):
        e12 = Multivector.blade(self.sig, 0b011)
        assert close(self.e1 * self.e2, e12)
        assert close(self.e2 * self.e1, -e12)

    def test_lorentzian_signature(self):
        sig = Signature.parse('+,-,-,-')
        e0 = Multivector.basis_vector(sig, 0)
        e1 = Multivector.basis_vector(sig, 1)
        assert close(e0 * e0, Multivector.scalar(sig, 1.0))
        assert close(e1 * e1, Multivector.scalar(sig, -1.0))

    def test_signature_parse_errors(self):
        with pytest.raises(ValueError):
            Signature.parse('+,0,-')
        assert Signature.parse('+,-,-').etas == (1, -1, -1)
        assert Signature.from_pq(1, 2) == Signature.parse('+,-,-')

    def test_signature_mismatch(self):
        other = Multivector.basis_vector(Signature.parse('+,-,-'), 0)
        with pytest.raises(SignatureMismatch):
            self.e1 * other


class TestGradedProducts:
    """Test wedge, contractions, scalar product and reverse"""

    def setup_method(self):
        """Setup test fixtures"""
        self.sig = Signature.parse('+,+,+')
        self.e1 = Multivector.basis_vector(self.sig, 0)
        self.e2 = Multivector.basis_vector(self.sig, 1)
        self.e12 = Multivector.blade(self.sig, 0b011)

    def test_wedge_nilpotent(self):
        assert self.e1.wedge(self.e1).norm() == 0.0

    def test_left_contraction_of_blade(self):
        sig = Signature.parse('+,+')
        e1 = Multivector.basis_vector(sig, 0)
        e12 = Multivector.blade(sig, 0b11)
        assert close(e1.lc(e12), Multivector.basis_vector(sig, 1))

    def test_reverse_and_scalar_product(self):
        e21 = self.e2 * self.e1
        assert self.e12.dot(e21).value == pytest.approx(-1.0)
        assert self.e12.dot(self.e12).value == pytest.approx(1.0)
        assert close(self.e12.reverse(), -self.e12)

    def test_scalar_product_across_grades_vanishes(self):
        assert self.e1.dot(self.e12).value == 0.0

    def test_graded_products_bundle(self):
        products = graded_products(self.e1, self.e12, r=2)
        assert close(products['left_contract'], self.e2)
        assert products['wedge'].norm() == 0.0
        assert close(products['grade_r'], Multivector.zero(self.sig))

    def test_grade_out_of_range(self):
        with pytest.raises(GradeOutOfRange):
            self.e1.grade(4)

    def test_commutator_product(self):
        sig = Signature.parse('+,+')
        e1 = Multivector.basis_vector(sig, 0)
        e12 = Multivector.blade(sig, 0b11)
        assert close(commutator_x(e12, e1), -Multivector.basis_vector(sig, 1))
        assert commutator_x(e12, e12).norm() == 0.0

    @settings(max_examples=50, deadline=None)
    @given(lists(coefficient, min_size=3, max_size=3), lists(coefficient, min_size=3, max_size=3))
    def test_biform_commutator_identity(self, b, v):
        """B x v + v ⌟ B = 0 for biforms B and 1-forms v"""
        B = Multivector.from_values(self.sig, [0, 0, 0, b[0], 0, b[1], b[2], 0])
        vec = Multivector.vector(self.sig, v)
        assert (B.cross(vec) + vec.lc(B)).norm() < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(lists(coefficient, min_size=8, max_size=8), lists(coefficient, min_size=8, max_size=8),
           lists(coefficient, min_size=8, max_size=8))
    def test_associativity(self, a, b, c):
        sig = Signature.parse('+,-,+')
        A, B, C = (Multivector.from_values(sig, x) for x in (a, b, c))
        assert np.allclose(((A * B) * C).value(), (A * (B * C)).value(), atol=1e-9)


class TestPseudoscalar:
    """Test volume elements and their inverses"""

    def test_euclidean_plane(self):
        sig = Signature.parse('+,+')
        ops = pseudoscalar_ops([Multivector.basis_vector(sig, 0), Multivector.basis_vector(sig, 1)])
        I = ops['I']
        assert close(I * I, Multivector.scalar(sig, -1.0))
        assert close(ops['I_inverse'], -I)

    def test_euclidean_space(self):
        sig = Signature.parse('+,+,+')
        ops = pseudoscalar_ops([Multivector.basis_vector(sig, i) for i in range(3)])
        assert close(ops['I'], Multivector.blade(sig, 0b111))
        assert close(ops['I_inverse'], -Multivector.blade(sig, 0b111))

    def test_mixed_signature(self):
        sig = Signature.parse('+,-')
        ops = pseudoscalar_ops([Multivector.basis_vector(sig, 0), Multivector.basis_vector(sig, 1)])
        assert close(ops['I'] * ops['I'], Multivector.scalar(sig, 1.0))
        assert close(ops['I_inverse'], ops['I'])

    def test_rejects_non_orthonormal(self):
        sig = Signature.parse('+,+')
        skew = Multivector.vector(sig, [1.0, 1.0])
        with pytest.raises(NotOrthonormal):
            pseudoscalar_ops([Multivector.basis_vector(sig, 0), skew])


class TestJetCoefficients:
    """Test multivectors with jet-valued coefficients"""

    def test_derivative_of_rotating_vector(self):
        sig = Signature.parse('+,+')
        space = get_space(1, 2)
        t = Jet.variable(space, 0, 0.3)
        v = Multivector.vector(sig, [t.apply('cos'), t.apply('sin')])
        dv = v.derivative(0)
        assert dv.value() == pytest.approx([0.0, -np.sin(0.3), np.cos(0.3), 0.0])
        assert (v.dot(v) - 1.0).coeffs == pytest.approx(np.zeros(3), abs=1e-12)
        assert v.dot(dv).value == pytest.approx(0.0, abs=1e-12)


if __name__ == '__main__':
    pytest.main([__file__])
