import logging
import re
from collections import defaultdict
from fractions import Fraction
from math import lcm

import numpy as np
from scipy.spatial import ConvexHull
try:
    from scipy.spatial import QhullError
except ImportError:
    from scipy.spatial.qhull import QhullError

from quantum_periods_py.periods.core import PeriodSequence
from quantum_periods_py.utils import as_fraction, format_rational

logger = logging.getLogger(__name__)

INT64_MAX = np.iinfo(np.int64).max


class LaurentPolynomial(object):
    """
    A Laurent polynomial in x1..xk with rational coefficients, stored as a map
    from exponent vectors (tuples of length dims) to nonzero coefficients.
    Repeated exponents passed to the constructor are summed.
    """

    def __init__(self, terms, dims=None):
        items = terms.items() if isinstance(terms, dict) else terms
        accumulated = defaultdict(Fraction)
        for exponent, coefficient in items:
            exponent = tuple(int(a) for a in exponent)
            if dims is None:
                dims = len(exponent)
            if len(exponent) != dims:
                raise ValueError("Exponent {} does not have length {}".format(exponent, dims))
            accumulated[exponent] += as_fraction(coefficient)
        if dims is None or dims < 1:
            raise ValueError("A Laurent polynomial needs at least one variable")
        self._dims = dims
        self._terms = {e: c for e, c in accumulated.items() if c != 0}

    @property
    def dims(self):
        return self._dims

    @property
    def terms(self):
        return dict(self._terms)

    @property
    def support(self):
        return sorted(self._terms)

    def __len__(self):
        return len(self._terms)

    def constant_term(self):
        return self._terms.get((0,) * self._dims, Fraction(0))

    def inverted(self):
        """Substitutes x_i -> 1/x_i"""
        return LaurentPolynomial({tuple(-a for a in e): c for e, c in self._terms.items()}, self._dims)

    def __add__(self, other):
        if self._dims != other.dims:
            raise ValueError("Cannot add polynomials in {} and {} variables".format(self._dims, other.dims))
        return LaurentPolynomial(list(self._terms.items()) + list(other.terms.items()), self._dims)

    def __mul__(self, other):
        if self._dims != other.dims:
            raise ValueError("Cannot multiply polynomials in {} and {} variables".format(self._dims, other.dims))
        return LaurentPolynomial(_multiply(self._terms, other.terms, self._dims), self._dims)

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and self._dims == other.dims and self._terms == other.terms

    def __hash__(self):
        return hash((self._dims, frozenset(self._terms.items())))

    def __repr__(self):
        return "LaurentPolynomial({!r}, dims={})".format(str(self), self._dims)

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for exponent in sorted(self._terms, reverse=True):
            coefficient = self._terms[exponent]
            factors = ["x{}".format(i + 1) if a == 1 else "x{}^{}".format(i + 1, a)
                       for i, a in enumerate(exponent) if a != 0]
            if abs(coefficient) != 1 or not factors:
                factors.insert(0, format_rational(abs(coefficient)))
            pieces.append(("-" if coefficient < 0 else "+", "*".join(factors)))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += " {} {}".format(sign, body)
        return text


##################
# TEXT GRAMMAR   #
##################

_SIGN_SPLIT = re.compile(r"(?<!\^)\s*([+-])\s*")
_NUMBER = re.compile(r"^(\d+)(?:/(\d+))?$")
_VARIABLE = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")


def parse_laurent(text, dims=None):
    """
    Parses terms `c * x1^a1 ... xk^ak` joined by `+` / `-`. Factors are separated
    by `*` or whitespace, the coefficient is an optional non-negative rational,
    exponents may be negative. The number of variables is the largest index used
    unless dims is given.
    """
    pieces = _SIGN_SPLIT.split(text.strip())
    if not pieces or not text.strip():
        raise ValueError("Empty Laurent polynomial")
    signed_terms = []
    if pieces[0] == "":
        pieces = pieces[1:]
    else:
        pieces = ["+"] + pieces
    if len(pieces) % 2:
        raise ValueError("Malformed Laurent polynomial: {!r}".format(text))
    for sign, body in zip(pieces[0::2], pieces[1::2]):
        if not body:
            raise ValueError("Dangling sign in Laurent polynomial: {!r}".format(text))
        signed_terms.append((-1 if sign == "-" else 1, body))

    parsed = []
    max_index = 0
    for sign, body in signed_terms:
        coefficient = Fraction(sign)
        powers = defaultdict(int)
        for factor in re.split(r"[\s*]+", body.strip()):
            number = _NUMBER.match(factor)
            variable = _VARIABLE.match(factor)
            if number:
                coefficient *= Fraction(int(number.group(1)), int(number.group(2) or 1))
            elif variable:
                index = int(variable.group(1))
                if index < 1:
                    raise ValueError("Variables are numbered from x1, got {!r}".format(factor))
                powers[index] += int(variable.group(2) or 1)
                max_index = max(max_index, index)
            else:
                raise ValueError("Unrecognized factor {!r} in Laurent polynomial".format(factor))
        parsed.append((powers, coefficient))

    if dims is None:
        dims = max(max_index, 1)
    elif dims < max_index:
        raise ValueError("Polynomial uses x{} but only {} variables were declared".format(max_index, dims))
    return LaurentPolynomial([(tuple(powers.get(i + 1, 0) for i in range(dims)), c) for powers, c in parsed], dims)


def projective_space_mirror(n):
    """x1 + ... + xn + 1/(x1 ... xn)"""
    if n < 1:
        raise ValueError("Projective space dimension must be positive, got {}".format(n))
    terms = [(tuple(1 if j == i else 0 for j in range(n)), 1) for i in range(n)]
    terms.append(((-1,) * n, 1))
    return LaurentPolynomial(terms, n)


########################
# POWERS AND PRODUCTS  #
########################

def _check_bound(value, what):
    if value > INT64_MAX:
        raise OverflowError("{} exceeds the int64 range".format(what))


def _as_exponent_array(exponents, dims):
    return np.array(exponents, dtype=np.int64).reshape(-1, dims)


def _multiply(f_terms, g_terms, dims, keep_fn=None):
    if not f_terms or not g_terms:
        return {}
    f_exponents, f_coeffs = zip(*f_terms.items())
    g_exponents, g_coeffs = zip(*g_terms.items())
    A = _as_exponent_array(f_exponents, dims)
    B = _as_exponent_array(g_exponents, dims)
    _check_bound(int(np.abs(A).max()) + int(np.abs(B).max()), "Exponent sum")

    sums = (A[:, None, :] + B[None, :, :]).reshape(-1, dims)
    candidates = np.arange(len(sums)) if keep_fn is None else np.flatnonzero(keep_fn(sums))

    product = defaultdict(Fraction)
    n_g = len(g_coeffs)
    for k in candidates:
        i, j = divmod(int(k), n_g)
        product[tuple(sums[k].tolist())] += f_coeffs[i] * g_coeffs[j]
    return {e: c for e, c in product.items() if c != 0}


class NewtonPolytopePruner(object):
    """
    Discards monomials x^e of f^d that cannot contribute to the constant term of
    any f^{d+k} with k <= remaining. That needs -e in k * Newt(f), which implies
    -<w, e> <= max(0, remaining * h(w)) for every direction w, where h is the
    support function of Newt(f). Directions are the coordinate axes and, when the
    support is full-dimensional, integer approximations of the hull's facet normals.
    """

    def __init__(self, support, dims):
        directions = []
        for i in range(dims):
            axis = [0] * dims
            axis[i] = 1
            directions.append(tuple(axis))
            directions.append(tuple(-a for a in axis))
        directions.extend(self._facet_normals(support, dims))
        self.directions = _as_exponent_array(sorted(set(directions)), dims)

        points = _as_exponent_array(support, dims)
        _check_bound(int(np.abs(points).max()) * int(np.abs(self.directions).max()) * dims, "Support function")
        self.support_values = (points @ self.directions.T).max(axis=0)

    @staticmethod
    def _facet_normals(support, dims):
        if dims < 2 or len(support) <= dims:
            return []
        try:
            hull = ConvexHull(np.array(support, dtype=float))
        except (QhullError, ValueError):
            logger.debug("Support is not full-dimensional, pruning with coordinate directions only")
            return []
        normals = []
        for equation in hull.equations:
            approximations = [Fraction(float(x)).limit_denominator(64) for x in equation[:-1]]
            scale = lcm(*(a.denominator for a in approximations))
            normal = tuple(int(a * scale) for a in approximations)
            if any(normal):
                normals.append(normal)
        return normals

    def keep_mask(self, exponents, remaining):
        bound = np.maximum(0, remaining * self.support_values)
        _check_bound(int(np.abs(exponents).max()) * int(np.abs(self.directions).max()) * exponents.shape[1], "Pruning dot product")
        return np.all(-(exponents @ self.directions.T) <= bound, axis=1)


def constant_term_powers(f, count, prune=True):
    """[ct(f^0), ..., ct(f^count)] by iterated multiplication f^{d+1} = f^d * f"""
    if count < 0:
        raise ValueError("count must be non-negative, got {}".format(count))
    if len(f) == 0:
        raise ValueError("Cannot take powers of the zero polynomial")
    zero = (0,) * f.dims
    pruner = NewtonPolytopePruner(f.support, f.dims) if prune else None

    power = {zero: Fraction(1)}
    constant_terms = []
    for d in range(count + 1):
        constant_terms.append(power.get(zero, Fraction(0)))
        if d == count:
            break
        remaining = count - d - 1
        keep_fn = None if pruner is None else (lambda sums, remaining=remaining: pruner.keep_mask(sums, remaining))
        power = _multiply(power, f.terms, f.dims, keep_fn)
        logger.debug("Power %d of a %d-term polynomial has %d terms", d + 1, len(f), len(power))
    return PeriodSequence(constant_terms)


def disjoint_sum(f, g):
    """f(x) + g(y) in dims_f + dims_g variables"""
    pad_f = (0,) * g.dims
    pad_g = (0,) * f.dims
    terms = [(e + pad_f, c) for e, c in f.terms.items()]
    terms += [(pad_g + e, c) for e, c in g.terms.items()]
    return LaurentPolynomial(terms, f.dims + g.dims)
