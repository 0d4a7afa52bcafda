from fractions import Fraction

from sympy import Poly, QQ
from sympy.functions.combinatorial.numbers import stirling

from quantum_periods_py.analysis.fields import T, RationalField, AlgebraicField, to_sympy_rational
from quantum_periods_py.periods.core import PeriodSequence
from quantum_periods_py.utils import as_fraction, common_denominator, integer_content, format_rational, falling_factorial


class DiffForm(object):
    """
    sum_i a_i(t) d^i/dt^i with integer polynomial coefficients a_0..a_r, a_r != 0,
    scaled so that the coefficients of all a_i together have content 1.

    Args:
        coeffs (list): a_0..a_r as sympy Polys, expressions in `T`, or integers
    """

    def __init__(self, coeffs):
        polys = [Poly(c, T, domain=QQ) for c in coeffs]
        while polys and polys[-1].is_zero:
            polys.pop()
        if len(polys) < 2:
            raise ValueError("A differential operator needs order at least 1")
        values = [as_fraction(c) for p in polys for c in p.coeffs() if not p.is_zero]
        scale = Fraction(common_denominator(values))
        scale /= integer_content(v * scale for v in values)
        self._coeffs = tuple(p.mul_ground(to_sympy_rational(scale)) for p in polys)

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def order(self):
        return len(self._coeffs) - 1

    @property
    def leading(self):
        return self._coeffs[-1]

    def coefficient_lists(self):
        """Each a_i as integers in ascending powers of t"""
        return [[int(as_fraction(c)) for c in reversed(p.all_coeffs())] if not p.is_zero else [] for p in self._coeffs]

    def apply_to_series(self, seq):
        """
        Coefficients of sum_i a_i d^i/dt^i applied to the truncated series
        sum c_d t^d, for every power t^e that only involves stored c_d.
        """
        if not isinstance(seq, PeriodSequence):
            seq = PeriodSequence(seq)
        tables = self.coefficient_lists()
        # a_{i,k} t^k d^i t^d lands on t^(d - i + k)
        lowest = min(min((k for k, a in enumerate(table) if a), default=i) - i for i, table in enumerate(tables))
        last = seq.length + min(lowest, 0)
        result = []
        for e in range(last + 1):
            total = Fraction(0)
            for i, table in enumerate(tables):
                for k, a in enumerate(table):
                    d = e - k + i
                    if a and 0 <= d <= seq.length:
                        total += a * falling_factorial(d, i) * seq[d]
            result.append(total)
        return PeriodSequence(result)

    def __eq__(self, other):
        return isinstance(other, DiffForm) and self.coefficient_lists() == other.coefficient_lists()

    def __hash__(self):
        return hash(tuple(tuple(c) for c in self.coefficient_lists()))

    def __repr__(self):
        return "DiffForm([{}])".format(", ".join(str(p.as_expr()) for p in self._coeffs))


def to_diff_form(op):
    """Rewrites sum l t^n D^m with D^m = sum_j S(m, j) t^j d^j/dt^j"""
    coeffs = [Poly(0, T, domain=QQ) for _ in range(op.order + 1)]
    for l, m, n in op.terms:
        for j in range(m + 1):
            s = int(stirling(m, j, kind=2))
            if s:
                coeffs[j] += Poly(to_sympy_rational(l * s) * T ** (n + j), T, domain=QQ)
    return DiffForm(coeffs)


class SingularPoint(object):
    """
    A point where the leading coefficient vanishes, or infinity.

    Args:
        kind (str): "rational", "algebraic" or "infinity"
        value (Fraction): the point, for rational points
        polynomial (Poly): the monic irreducible factor, for algebraic points
        multiplicity (int): multiplicity in the leading coefficient (0 at infinity)
    """

    RATIONAL = "rational"
    ALGEBRAIC = "algebraic"
    INFINITY = "infinity"

    def __init__(self, kind, value=None, polynomial=None, multiplicity=0):
        if kind == self.RATIONAL:
            assert value is not None
            value = as_fraction(value)
        elif kind == self.ALGEBRAIC:
            polynomial = Poly(polynomial, T, domain=QQ).monic()
            if polynomial.degree() < 2 or not polynomial.is_irreducible:
                raise ValueError("Algebraic points need an irreducible polynomial of degree >= 2, got {}".format(polynomial))
        elif kind != self.INFINITY:
            raise ValueError("Unknown singular point kind {!r}".format(kind))
        self.kind = kind
        self.value = value
        self.polynomial = polynomial
        self.multiplicity = multiplicity

    @staticmethod
    def rational(value, multiplicity=1):
        return SingularPoint(SingularPoint.RATIONAL, value=value, multiplicity=multiplicity)

    @staticmethod
    def algebraic(polynomial, multiplicity=1):
        return SingularPoint(SingularPoint.ALGEBRAIC, polynomial=polynomial, multiplicity=multiplicity)

    @staticmethod
    def infinity():
        return SingularPoint(SingularPoint.INFINITY)

    @property
    def is_infinity(self):
        return self.kind == self.INFINITY

    @property
    def degree(self):
        """Number of conjugate points represented"""
        return self.polynomial.degree() if self.kind == self.ALGEBRAIC else 1

    def residue_field(self):
        if self.kind == self.ALGEBRAIC:
            return AlgebraicField(self.polynomial)
        return RationalField(self.value if self.kind == self.RATIONAL else 0)

    def sort_key(self):
        if self.kind == self.RATIONAL:
            return (0, self.value, ())
        if self.kind == self.ALGEBRAIC:
            return (1, self.degree, tuple(as_fraction(c) for c in self.polynomial.all_coeffs()))
        return (2, 0, ())

    def label(self):
        if self.kind == self.RATIONAL:
            return format_rational(self.value)
        if self.kind == self.ALGEBRAIC:
            return "root of {}".format(str(self.polynomial.as_expr()).replace("**", "^"))
        return "infinity"

    def __eq__(self, other):
        return isinstance(other, SingularPoint) and \
            (self.sort_key(), self.multiplicity) == (other.sort_key(), other.multiplicity)

    def __hash__(self):
        return hash((self.sort_key(), self.multiplicity))

    def __repr__(self):
        return "SingularPoint({}, multiplicity={})".format(self.label(), self.multiplicity)


def singular_points(df):
    """
    Irreducible factors of a_r over QQ, in canonical order (rational points
    ascending, algebraic factors by degree then coefficients), followed by infinity.
    """
    _, factors = df.leading.factor_list()
    points = []
    for factor, multiplicity in factors:
        if factor.degree() == 1:
            a, b = factor.all_coeffs()
            points.append(SingularPoint.rational(-as_fraction(b) / as_fraction(a), multiplicity))
        else:
            points.append(SingularPoint.algebraic(factor, multiplicity))
    points.sort(key=SingularPoint.sort_key)
    points.append(SingularPoint.infinity())
    return points
