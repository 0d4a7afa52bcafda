"""
Recurrences for period coefficients.

Applying t^n D^m to sum_d c_d t^d and collecting t^e gives the relation

    sum_k l_k (e - n_k)^{m_k} c_{e - n_k} = 0

for every e >= 0, with c_j = 0 for j < 0 and 0^0 = 1.
"""
import logging
import warnings
from collections import defaultdict
from fractions import Fraction
from math import comb

from quantum_periods_py.periods.core import PeriodSequence, DOperator, FanoRecord
from quantum_periods_py.utils import common_denominator, integer_content, format_rational

logger = logging.getLogger(__name__)


class ExpansionError(ValueError):

    def __init__(self, index, message):
        super(ExpansionError, self).__init__(message)
        self.index = index


class ObstructedExpansion(ExpansionError):
    pass


class UnderdeterminedExpansion(ExpansionError):
    pass


class AnnihilationReport(object):
    """
    Args:
        verified_range (int): largest e whose relation was checked (-1 if none)
        residuals (list): (e, nonzero value) for every violated relation
    """

    def __init__(self, verified_range, residuals):
        self.verified_range = verified_range
        self.residuals = list(residuals)

    @property
    def ok(self):
        return not self.residuals

    def __eq__(self, other):
        return isinstance(other, AnnihilationReport) and \
            (self.verified_range, self.residuals) == (other.verified_range, other.residuals)

    def __repr__(self):
        return "AnnihilationReport(verified_range={}, residuals={})".format(self.verified_range, self.residuals)


def recurrence_relation(op, e):
    """
    Returns the relation at index e as a list of (index, weight) pairs sorted by index.
    Indices below zero are dropped; terms that land on the same index are summed,
    zero sums included, so the pair for index e (weight chi(e)) is present whenever
    some term has n = 0.
    """
    if e < 0:
        raise ValueError("Relation index must be non-negative, got {}".format(e))
    weights = defaultdict(Fraction)
    for l, m, n in op.terms:
        index = e - n
        if index < 0:
            continue
        weights[index] += l * index ** m
    return sorted(weights.items())


def _relation_value(op, seq, e):
    return sum((weight * seq[index] for index, weight in recurrence_relation(op, e)), Fraction(0))


def apply_operator(op, seq):
    """Coefficients of L applied to the truncated series, for e = 0..M"""
    return PeriodSequence([_relation_value(op, seq, e) for e in range(len(seq))])


def annihilates(op, seq):
    """
    Checks every relation e = 0..M. Relations only reference indices <= e, so
    each one is decidable from the truncation and verified_range is M.
    """
    residuals = [(e, value) for e, value in enumerate(apply_operator(op, seq)) if value != 0]
    return AnnihilationReport(seq.length, residuals)


def non_integral_indices(seq):
    return seq.non_integral_indices()


def expand(op, seeds, count, check_integrality=False):
    """
    Extends seeds c_0..c_s to c_0..c_count by solving the relation at each e > s
    for c_e. Seeds are checked against the relations they already determine.

    Args:
        op (DOperator): the operator
        seeds (PeriodSequence): c_0..c_s
        count (int): last index to compute, count > s
        check_integrality (bool): warn about non-integral coefficients
    """
    if not isinstance(seeds, PeriodSequence):
        seeds = PeriodSequence(seeds)
    if count <= seeds.length:
        raise ValueError("Nothing to expand: count {} does not exceed the last seed index {}".format(count, seeds.length))

    coeffs = list(seeds.coeffs)
    for e in range(len(coeffs)):
        if _relation_value(op, PeriodSequence(coeffs), e) != 0:
            raise ObstructedExpansion(e, "Seeds violate the recurrence at e={}".format(e))

    for e in range(len(coeffs), count + 1):
        chi = Fraction(0)
        rest = Fraction(0)
        for index, weight in recurrence_relation(op, e):
            if index == e:
                chi = weight
            else:
                rest += weight * coeffs[index]
        if chi != 0:
            coeffs.append(-rest / chi)
        elif rest == 0:
            raise UnderdeterminedExpansion(e, "c_{} is not determined by the recurrence; supply it as a seed".format(e))
        else:
            raise ObstructedExpansion(e, "Recurrence at e={} has leading weight 0 but residual {}".format(e, format_rational(rest)))

    result = PeriodSequence(coeffs)
    if check_integrality:
        bad = result.non_integral_indices()
        if bad:
            warnings.warn("Non-integral coefficients at indices {}".format(bad), RuntimeWarning)
    logger.debug("Expanded %d seeds to %d terms", len(seeds), len(result))
    return result


def expand_period(op, count):
    """Expansion from the standard seeds c_0 = 1, c_1 = 0"""
    return expand(op, PeriodSequence([1, 0]), count)


def normalize(op):
    """
    Integer coefficients with no common factor, positive coefficient on the
    lexicographically maximal (m, n), terms in descending (m, n) order.
    """
    terms = op.canonical_terms()
    denominator = common_denominator(l for l, _, _ in terms)
    integral = [(l * denominator, m, n) for l, m, n in terms]
    content = integer_content(l for l, _, _ in integral)
    sign = 1 if integral[0][0] > 0 else -1
    return DOperator([(sign * l / content, m, n) for l, m, n in integral])


def product_period(a, b, count):
    """c_d = sum_{i+j=d} binom(d, i) a_i b_j for d = 0..count"""
    if count > min(a.length, b.length):
        raise ValueError("Cannot form {} product terms from sequences of lengths {} and {}".format(
            count, a.length, b.length))
    coeffs = []
    for d in range(count + 1):
        coeffs.append(sum((comb(d, i) * a[i] * b[d - i] for i in range(d + 1)), Fraction(0)))
    return PeriodSequence(coeffs)


def product_names(names_a, names_b):
    return ["{} x {}".format(x, y) for x in names_a for y in names_b]


def product_record(a, b, count, new_id, notes=None):
    """A record for the product of two Fano manifolds, without an operator"""
    return FanoRecord(new_id, product_names(a.names, b.names), product_period(a.period, b.period, count), notes=notes)
