"""
Residue fields of singular points. A rational point s has residue field QQ;
an irreducible factor f of degree >= 2 has residue field QQ[t]/(f), whose
elements are polynomials in t reduced modulo f. Both expose the same small
set of operations so that the local analysis is written once.
"""
from fractions import Fraction
from math import factorial

from sympy import Poly, QQ, Rational, Symbol

from quantum_periods_py.utils import as_fraction

T = Symbol("t")


def to_sympy_rational(value):
    value = as_fraction(value)
    return Rational(value.numerator, value.denominator)


class ResidueField(object):

    degree = 1

    def rank(self, rows):
        """Rank of a list of rows of field elements, by Gaussian elimination"""
        matrix = [list(row) for row in rows if any(not self.is_zero(x) for x in row)]
        if not matrix:
            return 0
        ncols = len(matrix[0])
        rank = 0
        for col in range(ncols):
            pivot = next((i for i in range(rank, len(matrix)) if not self.is_zero(matrix[i][col])), None)
            if pivot is None:
                continue
            matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
            inverse = self.inv(matrix[rank][col])
            for i in range(rank + 1, len(matrix)):
                if self.is_zero(matrix[i][col]):
                    continue
                factor = self.mul(matrix[i][col], inverse)
                matrix[i] = [self.sub(x, self.mul(factor, y)) for x, y in zip(matrix[i], matrix[rank])]
            rank += 1
            if rank == len(matrix):
                break
        return rank

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def linear_combination(self, pairs):
        total = self.zero
        for scalar, element in pairs:
            total = self.add(total, self.mul(scalar, element))
        return total


class RationalField(ResidueField):
    """QQ, with Taylor expansion around the rational point `center`"""

    def __init__(self, center=0):
        self.center = as_fraction(center)
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def from_rational(self, value):
        return as_fraction(value)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def taylor_coefficients(self, poly):
        """Coefficients of poly(z + center) in ascending powers of z"""
        if poly.is_zero:
            return []
        shifted = poly.shift(to_sympy_rational(self.center))
        return [as_fraction(c) for c in reversed(shifted.all_coeffs())]

    def __repr__(self):
        return "RationalField(center={})".format(self.center)


class AlgebraicField(ResidueField):
    """
    QQ[t]/(modulus) for an irreducible modulus. The k-th Taylor coefficient of a
    polynomial a at a root of the modulus is represented by a^(k)/k! mod modulus.
    """

    def __init__(self, modulus):
        modulus = Poly(modulus, T, domain=QQ)
        if modulus.degree() < 2 or not modulus.is_irreducible:
            raise ValueError("Algebraic residue fields need an irreducible modulus of degree >= 2, got {}".format(modulus))
        self.modulus = modulus.monic()
        self.degree = modulus.degree()
        self.zero = Poly(0, T, domain=QQ)
        self.one = Poly(1, T, domain=QQ)

    def from_rational(self, value):
        return Poly(to_sympy_rational(value), T, domain=QQ)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        if not isinstance(a, Poly):
            return b.mul_ground(to_sympy_rational(a))
        return (a * b).rem(self.modulus)

    def neg(self, a):
        return -a

    def inv(self, a):
        return a.invert(self.modulus)

    def is_zero(self, a):
        return a.is_zero

    def taylor_coefficients(self, poly):
        if poly.is_zero:
            return []
        coefficients = []
        derivative = poly
        for k in range(poly.degree() + 1):
            coefficients.append(derivative.rem(self.modulus).quo_ground(factorial(k)))
            derivative = derivative.diff(T)
        return coefficients

    def __repr__(self):
        return "AlgebraicField({})".format(self.modulus.as_expr())
