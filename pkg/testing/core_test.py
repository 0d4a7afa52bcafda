import unittest
from fractions import Fraction

import numpy as np

from quantum_periods_py.periods.core import PeriodSequence, DOperator, FanoRecord, RationalDivisionError, \
    normalize_rational, rational_div, rational_gcd
from quantum_periods_py.utils import as_fraction

P1_PERIOD = [1, 0, 2, 0, 6, 0, 20]
P1_TERMS = [(4, 1, 2), (-1, 1, 0), (4, 0, 2)]


class TestRationalArithmetic(unittest.TestCase):

    def test_normalize(self):
        self.assertEqual(normalize_rational(2, 4), Fraction(1, 2), "Failed lowest terms")
        self.assertEqual(normalize_rational(3, -6), Fraction(-1, 2), "Denominator should be positive")
        half = normalize_rational(2, 4)
        self.assertEqual(normalize_rational(half), half, "Normalization should be idempotent")

    def test_addition(self):
        self.assertEqual(Fraction(1, 3) + Fraction(1, 6), Fraction(1, 2))

    def test_gcd(self):
        self.assertEqual(rational_gcd(4, 1, 4), 1)
        self.assertEqual(rational_gcd(8, -2, 8), 2)

    def test_division_by_zero(self):
        self.assertRaises(RationalDivisionError, normalize_rational, 1, 0)
        self.assertRaises(RationalDivisionError, rational_div, Fraction(1, 2), 0)
        self.assertRaises(ZeroDivisionError, rational_div, 3, 0)
        self.assertEqual(rational_div(1, 3), Fraction(1, 3))

    def test_no_floats(self):
        self.assertRaises(TypeError, as_fraction, 0.5)
        self.assertEqual(as_fraction(np.int64(7)), Fraction(7))


class TestPeriodSequence(unittest.TestCase):

    def setUp(self):
        self.seq = PeriodSequence(P1_PERIOD)

    def test_basics(self):
        self.assertEqual(self.seq.length, 6)
        self.assertEqual(len(self.seq), 7)
        self.assertEqual(self.seq[4], 6)
        self.assertEqual(self.seq.to_list(), P1_PERIOD)
        self.assertEqual(self.seq, PeriodSequence(P1_PERIOD), "Failed basic equality check")
        self.assertNotEqual(self.seq, PeriodSequence([1, 0, 2, 0, 6, 0, 21]), "Failed positional inequality")
        self.assertRaises(ValueError, PeriodSequence, [])

    def test_truncation(self):
        self.assertEqual(self.seq.truncated(2), PeriodSequence([1, 0, 2]))
        self.assertRaises(ValueError, self.seq.truncated, 7)

    def test_scaled_and_integrality(self):
        third = self.seq.scaled(Fraction(1, 3))
        self.assertEqual(third[2], Fraction(2, 3))
        self.assertEqual(third.non_integral_indices(), [0, 2, 6], "c_4 = 6 divides by 3")
        self.assertFalse(third.is_integral())
        self.assertTrue(self.seq.is_integral())
        self.assertEqual(third.to_list()[1], 0)
        self.assertEqual(third.to_list()[4], 2)

    def test_gromov_witten_invariants(self):
        # c_d = r_d d!
        self.assertEqual(self.seq.gromov_witten_invariants(),
                         [1, 0, 1, 0, Fraction(1, 4), 0, Fraction(1, 36)])

    def test_period_issues(self):
        self.assertEqual(self.seq.period_issues(), [])
        issues = PeriodSequence([2, 1, -3]).period_issues()
        self.assertEqual(len(issues), 3, "c_0, c_1 and the negative c_2 should be reported")
        self.assertEqual(PeriodSequence([1]).period_issues(), [])


class TestDOperator(unittest.TestCase):

    def setUp(self):
        self.op = DOperator(P1_TERMS)

    def test_accessors(self):
        self.assertEqual(self.op.order, 1)
        self.assertEqual(self.op.coefficients, [4, -1, 4])
        self.assertEqual(self.op.exponents, [[1, 2], [1, 0], [0, 2]])
        self.assertEqual(self.op.max_shift, 2)
        self.assertEqual(self.op.min_shift, 0)
        self.assertEqual(str(self.op), "4*t^2*D - D + 4*t^2")

    def test_from_lists(self):
        self.assertEqual(DOperator.from_lists([4, -1, 4], [[1, 2], [1, 0], [0, 2]]), self.op)
        self.assertEqual(DOperator.from_dict(self.op.to_dict()), self.op)
        self.assertRaises(ValueError, DOperator.from_lists, [4, -1], [[1, 2], [1, 0], [0, 2]])

    def test_equality_ignores_term_order(self):
        shuffled = DOperator([P1_TERMS[2], P1_TERMS[0], P1_TERMS[1]])
        self.assertEqual(shuffled, self.op, "Failed ordered equality check")
        self.assertEqual(hash(shuffled), hash(self.op))
        self.assertFalse(shuffled.is_normalized(), "Non-canonical term order is not normalized")

    def test_is_normalized(self):
        self.assertTrue(self.op.is_normalized())
        self.assertFalse(self.op.scaled(2).is_normalized())
        self.assertFalse(self.op.scaled(-1).is_normalized())
        self.assertFalse(self.op.scaled(Fraction(1, 2)).is_normalized())

    def test_invalid(self):
        self.assertRaises(ValueError, DOperator, [])
        self.assertRaises(ValueError, DOperator, [(1, 0, 1)])
        self.assertRaises(ValueError, DOperator, [(0, 1, 0)])
        self.assertRaises(ValueError, DOperator, [(1, 1, 0), (2, 1, 0)])
        self.assertRaises(ValueError, DOperator, [(1, -1, 0)])
        self.assertRaises(ValueError, self.op.scaled, 0)

    def test_chi(self):
        self.assertEqual(self.op.chi(0), 0)
        self.assertEqual(self.op.chi(6), -6)


class TestFanoRecord(unittest.TestCase):

    def test_record(self):
        op = DOperator(P1_TERMS)
        record = FanoRecord(1, ["P1"], P1_PERIOD, op, False, "projective line")
        self.assertEqual(record.period, PeriodSequence(P1_PERIOD))
        self.assertEqual(record.coefficient(6), 20)
        self.assertIsNone(record.coefficient(7))
        self.assertEqual(FanoRecord.from_dict(record.to_dict()), record)
        self.assertEqual(record.to_dict()["pf_exponents"], [[1, 2], [1, 0], [0, 2]])

    def test_operator_absent(self):
        record = FanoRecord(32, ["CKP(31)", "Obro(4,31)"], [1, 0, 0, 18, 72, 360, 2430])
        self.assertIsNone(record.operator)
        self.assertIsNone(record.pf_proven)
        self.assertNotIn("pf_proven", record.to_dict())

    def test_invalid(self):
        self.assertRaises(ValueError, FanoRecord, 0, ["P1"], P1_PERIOD)
        self.assertRaises(ValueError, FanoRecord, 1, [], P1_PERIOD)
        self.assertRaises(ValueError, FanoRecord, 1, ["P1"], P1_PERIOD, DOperator(P1_TERMS))
        self.assertRaises(ValueError, FanoRecord, 1, ["P1"], P1_PERIOD, None, False)
        self.assertRaises(ValueError, FanoRecord, 1, ["P1"], P1_PERIOD, notes="two\nlines")
        self.assertRaises(ValueError, FanoRecord, 1, ["P1"], P1_PERIOD, notes="trailing space ")
        self.assertRaises(ValueError, FanoRecord, 1, ["P1"], P1_PERIOD, notes="\tindented")


if __name__ == '__main__':
    unittest.main()
