from fractions import Fraction
from math import factorial

from quantum_periods_py.utils import as_fraction, integer_content, format_rational


class RationalDivisionError(ZeroDivisionError):
    pass


#####################
# RATIONAL HELPERS  #
#####################

def normalize_rational(numerator, denominator=1):
    """
    Returns numerator/denominator in lowest terms with a positive denominator.
    Fraction already canonicalizes; the only thing added here is a distinct error
    type for a zero denominator.
    """
    if denominator == 0:
        raise RationalDivisionError("Rational with zero denominator: {}/0".format(numerator))
    return Fraction(as_fraction(numerator), as_fraction(denominator))

def rational_div(a, b):
    b = as_fraction(b)
    if b == 0:
        raise RationalDivisionError("Division of {} by zero".format(format_rational(a)))
    return as_fraction(a) / b

def rational_gcd(*values):
    """gcd of integers; gcd(4, 1, 4) is 1"""
    return integer_content(values)


class PeriodSequence(object):
    """
    A truncated coefficient list c_0..c_M of a regularized quantum period.

    Coefficients are exact rationals. The period invariants (c_0 = 1, c_1 = 0,
    non-negative integers) are not enforced here, since scaled seeds and residual
    sequences share the type; `period_issues` reports them and the database layer
    enforces them for records.
    """

    def __init__(self, coeffs):
        coeffs = tuple(as_fraction(c) for c in coeffs)
        if len(coeffs) == 0:
            raise ValueError("A period sequence needs at least the coefficient c_0")
        self._coeffs = coeffs

    @staticmethod
    def from_list(values):
        return PeriodSequence(values)

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def length(self):
        """Index M of the last stored coefficient"""
        return len(self._coeffs) - 1

    def __len__(self):
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return PeriodSequence(self._coeffs[key])
        return self._coeffs[key]

    def __eq__(self, other):
        return isinstance(other, PeriodSequence) and self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return "PeriodSequence([{}])".format(",".join(format_rational(c) for c in self._coeffs))

    def to_list(self):
        """Integers where the coefficient is integral, Fractions otherwise"""
        return [int(c) if c.denominator == 1 else c for c in self._coeffs]

    def truncated(self, count):
        """c_0..c_count"""
        if count < 0 or count > self.length:
            raise ValueError("Cannot truncate a sequence of length {} to {}".format(self.length, count))
        return PeriodSequence(self._coeffs[:count + 1])

    def scaled(self, alpha):
        alpha = as_fraction(alpha)
        return PeriodSequence([alpha * c for c in self._coeffs])

    def is_zero(self):
        return all(c == 0 for c in self._coeffs)

    def non_integral_indices(self):
        return [d for d, c in enumerate(self._coeffs) if c.denominator != 1]

    def is_integral(self):
        return not self.non_integral_indices()

    def gromov_witten_invariants(self):
        """r_d = c_d / d!"""
        return [c / factorial(d) for d, c in enumerate(self._coeffs)]

    def period_issues(self):
        issues = []
        if self._coeffs[0] != 1:
            issues.append("c_0 is {}, expected 1".format(format_rational(self._coeffs[0])))
        if self.length >= 1 and self._coeffs[1] != 0:
            issues.append("c_1 is {}, expected 0".format(format_rational(self._coeffs[1])))
        for d, c in enumerate(self._coeffs):
            if c.denominator != 1 or c < 0:
                issues.append("c_{} = {} is not a non-negative integer".format(d, format_rational(c)))
        return issues


class DOperator(object):
    """
    A differential operator L = sum_k l_k t^{n_k} D^{m_k} with D = t d/dt.

    Terms are kept in the order given so that stored operators round-trip;
    equality and hashing use the canonical order (descending (m, n)).

    Args:
        terms (iterable): (l, m, n) triples with l a nonzero rational, m, n >= 0
    """

    def __init__(self, terms):
        parsed = []
        seen = set()
        for term in terms:
            if len(term) != 3:
                raise ValueError("Operator terms are (l, m, n) triples, got {!r}".format(term))
            l, m, n = as_fraction(term[0]), int(term[1]), int(term[2])
            if l == 0:
                raise ValueError("Operator term with exponents (m={}, n={}) has a zero coefficient".format(m, n))
            if m < 0 or n < 0:
                raise ValueError("Operator exponents must be non-negative, got (m={}, n={})".format(m, n))
            if (m, n) in seen:
                raise ValueError("Repeated exponent pair (m={}, n={}) in operator".format(m, n))
            seen.add((m, n))
            parsed.append((l, m, n))
        if not parsed:
            raise ValueError("Empty operator")
        if max(m for _, m, _ in parsed) < 1:
            raise ValueError("Operator must have order at least 1 in D")
        self._terms = tuple(parsed)

    @staticmethod
    def from_lists(coefficients, exponents):
        """From pf_coefficients [l_k] and pf_exponents [[m_k, n_k]]"""
        if len(coefficients) != len(exponents):
            raise ValueError("{} coefficients but {} exponent pairs".format(len(coefficients), len(exponents)))
        terms = []
        for l, pair in zip(coefficients, exponents):
            if len(pair) != 2:
                raise ValueError("Exponent entries are [m, n] pairs, got {!r}".format(pair))
            terms.append((l, pair[0], pair[1]))
        return DOperator(terms)

    @property
    def terms(self):
        return self._terms

    @property
    def coefficients(self):
        return [int(l) if l.denominator == 1 else l for l, _, _ in self._terms]

    @property
    def exponents(self):
        return [[m, n] for _, m, n in self._terms]

    @property
    def order(self):
        return max(m for _, m, _ in self._terms)

    @property
    def max_shift(self):
        return max(n for _, _, n in self._terms)

    @property
    def min_shift(self):
        return min(n for _, _, n in self._terms)

    def canonical_terms(self):
        return tuple(sorted(self._terms, key=lambda term: (term[1], term[2]), reverse=True))

    def is_integral(self):
        return all(l.denominator == 1 for l, _, _ in self._terms)

    def is_normalized(self):
        if not self.is_integral():
            return False
        if integer_content(l for l, _, _ in self._terms) != 1:
            return False
        canonical = self.canonical_terms()
        return canonical[0][0] > 0 and canonical == self._terms

    def chi(self, e):
        """Weight of c_e in the relation at index e: sum over terms with n = 0 of l e^m"""
        return sum((l * e ** m for l, m, n in self._terms if n == 0), Fraction(0))

    def scaled(self, alpha):
        alpha = as_fraction(alpha)
        if alpha == 0:
            raise ValueError("Cannot scale an operator by zero")
        return DOperator([(alpha * l, m, n) for l, m, n in self._terms])

    def to_dict(self):
        return {"pf_coefficients": self.coefficients, "pf_exponents": self.exponents}

    @staticmethod
    def from_dict(op_dict):
        return DOperator.from_lists(op_dict["pf_coefficients"], op_dict["pf_exponents"])

    def __eq__(self, other):
        return isinstance(other, DOperator) and self.canonical_terms() == other.canonical_terms()

    def __hash__(self):
        return hash(self.canonical_terms())

    def __repr__(self):
        return "DOperator({})".format(list(self._terms))

    def __str__(self):
        pieces = []
        for l, m, n in self.canonical_terms():
            factors = []
            if n:
                factors.append("t" if n == 1 else "t^{}".format(n))
            if m:
                factors.append("D" if m == 1 else "D^{}".format(m))
            magnitude = abs(l)
            if magnitude != 1 or not factors:
                factors.insert(0, format_rational(magnitude))
            sign = "-" if l < 0 else "+"
            pieces.append((sign, "*".join(factors)))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += " {} {}".format(sign, body)
        return text


class FanoRecord(object):
    """
    One database entry.

    Args:
        id (int): positive record id
        names (list of str): non-empty list of names
        period (PeriodSequence): the stored period sequence
        operator (DOperator): optional annihilating operator
        pf_proven (bool): present iff the operator is present
        notes (str): optional single-line notes
        duplicate (int): optional id of a record in the same database
    """

    def __init__(self, id, names, period, operator=None, pf_proven=None, notes=None, duplicate=None):
        if int(id) < 1:
            raise ValueError("Record id must be positive, got {}".format(id))
        names = tuple(names)
        if not names or not all(isinstance(name, str) and name for name in names):
            raise ValueError("Record {} needs a non-empty list of non-empty names".format(id))
        if not isinstance(period, PeriodSequence):
            period = PeriodSequence(period)
        if (operator is None) != (pf_proven is None):
            raise ValueError("Record {}: pf_proven must be present exactly when the operator is".format(id))
        if notes is not None and "\n" in notes:
            raise ValueError("Record {}: notes must be a single line".format(id))
        if notes is not None and notes != notes.strip():
            raise ValueError("Record {}: notes must not start or end with whitespace".format(id))
        if duplicate is not None and int(duplicate) < 1:
            raise ValueError("Record {}: duplicate must reference a positive id".format(id))
        self._id = int(id)
        self._names = names
        self._period = period
        self._operator = operator
        self._pf_proven = pf_proven
        self._notes = notes
        self._duplicate = None if duplicate is None else int(duplicate)

    @property
    def id(self):
        return self._id

    @property
    def names(self):
        return self._names

    @property
    def period(self):
        return self._period

    @property
    def operator(self):
        return self._operator

    @property
    def pf_proven(self):
        return self._pf_proven

    @property
    def notes(self):
        return self._notes

    @property
    def duplicate(self):
        return self._duplicate

    def coefficient(self, d):
        """c_d, or None when the stored truncation is too short"""
        if d > self._period.length:
            return None
        return self._period[d]

    def to_dict(self):
        record_dict = {"id": self.id, "names": list(self.names), "period": self.period.to_list()}
        if self.operator is not None:
            record_dict.update(self.operator.to_dict())
            record_dict["pf_proven"] = self.pf_proven
        if self.notes is not None:
            record_dict["notes"] = self.notes
        if self.duplicate is not None:
            record_dict["duplicate"] = self.duplicate
        return record_dict

    @staticmethod
    def from_dict(record_dict):
        record_dict = dict(record_dict)
        operator = None
        if "pf_coefficients" in record_dict or "pf_exponents" in record_dict:
            operator = DOperator.from_lists(record_dict.pop("pf_coefficients", []), record_dict.pop("pf_exponents", []))
        return FanoRecord(operator=operator, **record_dict)

    def __eq__(self, other):
        return isinstance(other, FanoRecord) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        operator_terms = None if self.operator is None else self.operator.terms
        return (self.id, self.names, self.period, operator_terms, self.pf_proven, self.notes, self.duplicate)

    def __repr__(self):
        return "FanoRecord(id={}, names={})".format(self.id, list(self.names))
