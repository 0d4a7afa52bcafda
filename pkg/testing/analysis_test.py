import unittest, warnings
from unittest import mock
from fractions import Fraction

from sympy import Poly, QQ

from quantum_periods_py.periods.core import DOperator, PeriodSequence
from quantum_periods_py.periods.recurrence import apply_operator, expand_period
from quantum_periods_py.periods.laurent import parse_laurent, constant_term_powers
from quantum_periods_py.fitting.fit import fit_operator_search
from quantum_periods_py.analysis.fields import T, RationalField, AlgebraicField
from quantum_periods_py.analysis.diff_form import DiffForm, SingularPoint, to_diff_form, singular_points
from quantum_periods_py.analysis import ramification
from quantum_periods_py.analysis.ramification import LAM, LocalExpansion, IndicialRoot, NotFuchsianError, \
    DefectBoundViolation, RamificationReport, is_fuchsian, indicial_polynomial, indicial_exponents, \
    invariant_dimension, ramification_data, ramification_defect

from utils import fixture_operator_records

# Ramification of the dimension-three operators takes a few seconds per operator
large_operator_tests = False

P1_OPERATOR = DOperator([(4, 1, 2), (-1, 1, 0), (4, 0, 2)])
P2_OPERATOR = DOperator.from_lists([27, -1, 81, 54], [[2, 3], [2, 0], [1, 3], [0, 3]])
P1xP1_OPERATOR = DOperator.from_lists([16, -1, 32, 16], [[2, 2], [2, 0], [1, 2], [0, 2]])
P3_OPERATOR = DOperator.from_lists([256, -1, 1536, 2816, 1536], [[3, 4], [3, 0], [2, 4], [1, 4], [0, 4]])
Q3_OPERATOR = DOperator.from_lists([108, -1, 486, 702, 324], [[3, 3], [3, 0], [2, 3], [1, 3], [0, 3]])
EULER_OPERATOR = DOperator([(1, 1, 0), (-3, 0, 0)])


def lam_poly(expr):
    return Poly(expr, LAM, domain=QQ)


class TestResidueFields(unittest.TestCase):

    def test_rational(self):
        field = RationalField(Fraction(1, 2))
        self.assertEqual(field.taylor_coefficients(Poly(4 * T ** 2, T, domain=QQ)), [1, 4, 4])
        self.assertEqual(field.rank([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)], [Fraction(0), Fraction(1)]]), 2)

    def test_algebraic(self):
        field = AlgebraicField(T ** 2 + 1)
        self.assertEqual(field.degree, 2)
        self.assertTrue(field.mul(Poly(T, T, domain=QQ), Poly(T, T, domain=QQ)) == Poly(-1, T, domain=QQ))
        inverse = field.inv(Poly(T + 1, T, domain=QQ))
        self.assertTrue(field.mul(inverse, Poly(T + 1, T, domain=QQ)) == field.one)
        self.assertRaises(ValueError, AlgebraicField, T ** 2 - 1)
        self.assertRaises(ValueError, AlgebraicField, T + 1)


class TestDiffForm(unittest.TestCase):

    def test_p1(self):
        df = to_diff_form(P1_OPERATOR)
        self.assertEqual(df.order, 1)
        self.assertEqual(df.coefficient_lists(), [[0, 0, 4], [0, -1, 0, 4]])

    def test_scaling(self):
        self.assertEqual(DiffForm([T ** 2 / 2, T / 3]).coefficient_lists(), [[0, 0, 3], [0, 2]])
        self.assertEqual(DiffForm([T, T, 0]).order, 1, "Trailing zero coefficients should be dropped")
        self.assertRaises(ValueError, DiffForm, [T])

    def test_same_action_as_operator(self):
        seq = PeriodSequence([1, 0, 3, 0, 6, 5, 7, 0, 1])
        df = to_diff_form(P2_OPERATOR)
        self.assertEqual(df.apply_to_series(seq), apply_operator(P2_OPERATOR, seq))

    def test_annihilates_period(self):
        seq = expand_period(P1_OPERATOR, 20)
        self.assertTrue(to_diff_form(P1_OPERATOR).apply_to_series(seq).is_zero())


class TestSingularPoints(unittest.TestCase):

    def test_p1(self):
        points = singular_points(to_diff_form(P1_OPERATOR))
        self.assertEqual([p.label() for p in points], ["-1/2", "0", "1/2", "infinity"])
        self.assertTrue(points[-1].is_infinity)
        self.assertEqual(points[1], SingularPoint.rational(0))

    def test_algebraic(self):
        points = singular_points(DiffForm([0, T ** 2 + 1]))
        self.assertEqual(len(points), 2)
        self.assertEqual(points[0].kind, SingularPoint.ALGEBRAIC)
        self.assertEqual(points[0].degree, 2)
        self.assertEqual(points[0].label(), "root of t^2 + 1")

    def test_p2(self):
        points = singular_points(to_diff_form(P2_OPERATOR))
        self.assertEqual([p.kind for p in points],
                         [SingularPoint.RATIONAL, SingularPoint.RATIONAL, SingularPoint.ALGEBRAIC, SingularPoint.INFINITY])
        self.assertEqual(points[1].value, Fraction(1, 3))
        self.assertEqual(points[0].multiplicity, 2)

    def test_invalid(self):
        self.assertRaises(ValueError, SingularPoint.algebraic, T ** 2 - 1)
        self.assertRaises(ValueError, SingularPoint, "complex")


class TestFuchsian(unittest.TestCase):

    def test_p1(self):
        certificate = is_fuchsian(to_diff_form(P1_OPERATOR))
        self.assertTrue(certificate.fuchsian)
        self.assertEqual(len(certificate.to_dict()["certificate"]), 4)

    def test_irregular_witness(self):
        certificate = is_fuchsian(DiffForm([T ** 2, 1]))
        self.assertFalse(certificate.fuchsian)
        self.assertEqual([p.label() for p in certificate.failing_points()], ["infinity"])

    def test_euler_operators(self):
        for order in range(1, 5):
            terms = [(1, order, 0)] + [(k + 1, m, 0) for k, m in enumerate(range(order))]
            self.assertTrue(is_fuchsian(to_diff_form(DOperator(terms))).fuchsian)

    def test_irregular_at_infinity(self):
        # d/dt - 1 and d^2/dt^2 + 1
        self.assertFalse(is_fuchsian(DiffForm([-1, 1])).fuchsian)
        self.assertFalse(is_fuchsian(DiffForm([1, 0, 1])).fuchsian)

    def test_irregular_at_zero(self):
        # t^2 d/dt + 1
        certificate = is_fuchsian(DiffForm([1, T ** 2]))
        self.assertEqual([p.label() for p in certificate.failing_points()], ["0"])

    def test_not_fuchsian_error(self):
        df = DiffForm([T ** 2, 1])
        with self.assertRaises(NotFuchsianError) as cm:
            indicial_polynomial(df, SingularPoint.infinity())
        self.assertTrue(cm.exception.point.is_infinity)


class TestIndicial(unittest.TestCase):

    def setUp(self):
        self.df = to_diff_form(P1_OPERATOR)

    def test_p1_polynomials(self):
        self.assertEqual(indicial_polynomial(self.df, SingularPoint.rational(0)), lam_poly(-LAM))
        self.assertEqual(indicial_polynomial(self.df, SingularPoint.rational(Fraction(1, 2))), lam_poly(2 * LAM + 1))
        self.assertEqual(indicial_polynomial(self.df, SingularPoint.infinity()), lam_poly(4 - 4 * LAM))

    def test_p1_exponents(self):
        self.assertEqual(indicial_exponents(self.df, SingularPoint.rational(0)), [IndicialRoot(Fraction(0), 1)])
        roots = indicial_exponents(self.df, SingularPoint.rational(Fraction(-1, 2)))
        self.assertEqual(roots, [IndicialRoot(Fraction(-1, 2), 1)])
        self.assertEqual(roots[0].kind, IndicialRoot.NONINTEGER)
        self.assertEqual(indicial_exponents(self.df, SingularPoint.infinity()), [IndicialRoot(Fraction(1), 1)])

    def test_euler(self):
        df = to_diff_form(EULER_OPERATOR)
        self.assertEqual(indicial_polynomial(df, SingularPoint.rational(0)), lam_poly(LAM - 3))
        self.assertEqual(indicial_polynomial(df, SingularPoint.infinity()), lam_poly(-3 - LAM))

    def test_p2_algebraic_point(self):
        df = to_diff_form(P2_OPERATOR)
        point = singular_points(df)[2]
        exponents = LocalExpansion(df, point).exponents()
        self.assertEqual(sum(root.multiplicity for root in exponents), 2)
        self.assertEqual(invariant_dimension(df, point), 1)

    def test_invariant_dimensions(self):
        self.assertEqual(invariant_dimension(self.df, SingularPoint.rational(0)), 1)
        self.assertEqual(invariant_dimension(self.df, SingularPoint.rational(Fraction(1, 2))), 0)
        self.assertEqual(invariant_dimension(self.df, SingularPoint.infinity()), 1)


class TestRamification(unittest.TestCase):

    def test_p1(self):
        report = ramification_data(P1_OPERATOR)
        self.assertEqual(report.rank, 1)
        self.assertEqual([p.contribution for p in report.points], [1, 0, 1, 0])
        self.assertEqual(report.rf, 2)
        self.assertEqual(report.defect, 0)
        self.assertTrue(report.extremal)
        self.assertEqual(report.completeness, RamificationReport.FULL)
        self.assertEqual(report.contribution_at("1/2"), 1)
        self.assertEqual(report.to_dict()["points"][0]["exponents"],
                         [{"kind": "noninteger", "value": "-1/2", "multiplicity": 1}])
        self.assertEqual(ramification_defect(P1_OPERATOR), 0)

    def test_p2(self):
        report = ramification_data(P2_OPERATOR)
        self.assertEqual(report.rank, 2)
        self.assertEqual([p.contribution for p in report.points], [1, 1, 2, 0])
        self.assertEqual(report.defect, 0)

    def test_p1xp1(self):
        report = ramification_data(P1xP1_OPERATOR)
        self.assertEqual([p.point.label() for p in report.points], ["-1/4", "0", "1/4", "infinity"])
        self.assertEqual([p.contribution for p in report.points], [1, 1, 1, 1])
        self.assertTrue(report.extremal)

    def test_del_pezzo_defects(self):
        dp8 = parse_laurent("x1 + x2 + x1 x2 + x1^-1 x2^-1")
        dp7 = parse_laurent("x1 + x2 + x1 x2 + x1^-1 x2^-1 + x2^-1")
        dp6 = parse_laurent("x1 + x2 + x1 x2 + x1^-1 + x2^-1 + x1^-1 x2^-1")
        reports = {}
        for name, f in [("dP(8)", dp8), ("dP(7)", dp7), ("dP(6)", dp6)]:
            fit = fit_operator_search(constant_term_powers(f, 50), 4, 8, 10)
            reports[name] = ramification_data(fit.operator)
            self.assertEqual(reports[name].completeness, RamificationReport.FULL)
        self.assertEqual(reports["dP(8)"].defect, 1)
        self.assertEqual(reports["dP(7)"].defect, 1)
        self.assertEqual(reports["dP(6)"].defect, 0)
        self.assertTrue(any(p.point.kind == SingularPoint.ALGEBRAIC and p.contribution > 0
                            for p in reports["dP(8)"].points), "dP(8) ramifies at an irrational point")

    def test_dimension_three(self):
        if not large_operator_tests:
            self.skipTest("large_operator_tests is off")
        report = ramification_data(P3_OPERATOR)
        self.assertEqual(report.contribution_at("0"), 2)
        self.assertEqual(report.contribution_at("infinity"), 0)
        self.assertTrue(report.extremal)
        report = ramification_data(Q3_OPERATOR)
        self.assertEqual(report.contribution_at("0"), 2)
        self.assertEqual(report.contribution_at("infinity"), 1)
        self.assertTrue(report.extremal)

    def test_rank_one_exponent_parity(self):
        rank_one = [record for _, record in fixture_operator_records() if record.operator.order == 1]
        self.assertEqual([record.names for record in rank_one], [("P1",)])
        for record in rank_one:
            report = ramification_data(record.operator)
            count = sum(root.multiplicity * p.point.degree for p in report.points for root in p.exponents
                        if root.kind != IndicialRoot.INTEGER)
            self.assertEqual(count % 2, 0, "Non-integer exponents of {} should come in pairs".format(record.names))
            self.assertEqual(count, 2)

    def test_partial(self):
        report = ramification_data(P2_OPERATOR, max_factor_degree=1)
        self.assertEqual(report.completeness, RamificationReport.PARTIAL)
        self.assertEqual(len(report.points), 3)
        self.assertTrue(report.to_dict()["completeness"].startswith("partial"))

    def test_partial_skips_expansion(self):
        with mock.patch.object(ramification, "LocalExpansion", wraps=LocalExpansion) as expansion:
            ramification_data(P2_OPERATOR, max_factor_degree=1)
        degrees = [call.args[1].degree for call in expansion.call_args_list]
        self.assertEqual(len(degrees), 3)
        self.assertTrue(all(d == 1 for d in degrees), "Points above the degree cutoff should not be expanded")

    def test_negative_defect(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report = ramification_data(EULER_OPERATOR)
        self.assertEqual(report.defect, -2)
        self.assertTrue(any(issubclass(w.category, RuntimeWarning) for w in caught))
        self.assertRaises(DefectBoundViolation, ramification_data, EULER_OPERATOR, attest_irreducible=True)

    def test_not_fuchsian(self):
        # t^3 D + 1 is irregular at 0
        with self.assertRaises(NotFuchsianError) as cm:
            ramification_data(DOperator([(1, 1, 3), (1, 0, 0)]))
        self.assertEqual(cm.exception.point.label(), "0")


if __name__ == '__main__':
    unittest.main()
