"""
Local analysis of a Fuchsian operator at its singular points and the
ramification rf = sum_s (rank - dim of solutions invariant under the local
monodromy at s). At a regular singular point the invariant solutions are
exactly the meromorphic ones, which the Frobenius recurrence counts.
"""
import logging
import warnings

from sympy import Poly, QQ, Symbol
from tqdm import tqdm

from quantum_periods_py.analysis.diff_form import to_diff_form, singular_points, SingularPoint
from quantum_periods_py.analysis.fields import T, to_sympy_rational
from quantum_periods_py.utils import as_fraction, falling_factorial, rising_factorial, format_rational

logger = logging.getLogger(__name__)

LAM = Symbol("lam")

DEFAULT_ANALYSIS_PARAMS = {
    "max_factor_degree": 8,
    "extra_truncation": 16,
}


class NotFuchsianError(ValueError):

    def __init__(self, point, message=None):
        super(NotFuchsianError, self).__init__(message or "Irregular singular point at {}".format(point.label()))
        self.point = point


class DefectBoundViolation(AssertionError):
    pass


class LocalExpansion(object):
    """
    Coefficients of a_0..a_r around one point. At a finite point they are the
    Taylor coefficients a_{i,k} in the residue field; at infinity they are the
    plain coefficients of t^k and the local parameter is 1/t.
    """

    def __init__(self, df, point):
        self.point = point
        self.field = point.residue_field()
        self.r = df.order
        self.tables = [self.field.taylor_coefficients(a) for a in df.coeffs]

    def coefficient(self, i, k):
        table = self.tables[i]
        return table[k] if 0 <= k < len(table) else self.field.zero

    def _valuation(self, i):
        return next((k for k, c in enumerate(self.tables[i]) if not self.field.is_zero(c)), None)

    def _degree(self, i):
        return len(self.tables[i]) - 1 if self.tables[i] else None

    def is_regular(self):
        r = self.r
        if self.point.is_infinity:
            top = self._degree(r) - r
            return all(self._degree(i) is None or self._degree(i) - i <= top for i in range(r))
        bottom = self._valuation(r) - r
        return all(self._valuation(i) is None or self._valuation(i) - i >= bottom for i in range(r))

    def check_regular(self):
        if not self.is_regular():
            raise NotFuchsianError(self.point)

    @property
    def min_shift(self):
        if self.point.is_infinity:
            return self.r - self._degree(self.r)
        return self._valuation(self.r) - self.r

    @property
    def max_shift(self):
        shifts = []
        for i in range(self.r + 1):
            if not self.tables[i]:
                continue
            shifts.append(i - self._valuation(i) if self.point.is_infinity else self._degree(i) - i)
        return max(shifts)

    def _index(self, i, q):
        return i - q if self.point.is_infinity else q + i

    def _weight(self, i, lam):
        if self.point.is_infinity:
            return (-1) ** i * rising_factorial(lam, i)
        return falling_factorial(lam, i)

    def shift_polynomial_at(self, j, lam):
        """P_j(lam): the weight of y_{M-j} in the coefficient equation at M, for integer lam = M - j"""
        q = self.min_shift + j
        return self.field.linear_combination((self._weight(i, lam), self.coefficient(i, self._index(i, q)))
                                             for i in range(self.r + 1))

    def indicial_coefficients(self):
        """alpha_0..alpha_r, so that chi = sum alpha_i [lam]_i (finite) or sum alpha_i (-1)^i (lam)^(i) (infinity)"""
        return [self.coefficient(i, self._index(i, self.min_shift)) for i in range(self.r + 1)]

    def _lambda_basis(self, i):
        if self.point.is_infinity:
            return (-1) ** i * rising_factorial(LAM, i)
        return falling_factorial(LAM, i)

    def indicial_polynomial(self):
        alphas = self.indicial_coefficients()
        if self.point.kind == SingularPoint.ALGEBRAIC:
            expr = sum(a.as_expr() * self._lambda_basis(i) for i, a in enumerate(alphas))
            return Poly(expr, LAM, T, domain=QQ)
        expr = sum(to_sympy_rational(a) * self._lambda_basis(i) for i, a in enumerate(alphas))
        return Poly(expr, LAM, domain=QQ)

    def _rational_part(self):
        """Polynomial over QQ whose roots are the rational roots of chi, with multiplicity"""
        chi = self.indicial_polynomial()
        if self.point.kind != SingularPoint.ALGEBRAIC:
            return chi
        components = {}
        for (lam_power, t_power), c in chi.terms():
            components.setdefault(t_power, 0)
            components[t_power] += c * LAM ** lam_power
        result = None
        for expr in components.values():
            component = Poly(expr, LAM, domain=QQ)
            result = component if result is None else result.gcd(component)
        return result

    def exponents(self):
        """Indicial roots grouped as IndicialRoot entries; multiplicities sum to r"""
        roots = []
        counted = 0
        _, factors = self._rational_part().factor_list()
        for factor, multiplicity in factors:
            if factor.degree() == 1:
                a, b = factor.all_coeffs()
                roots.append(IndicialRoot(-as_fraction(b) / as_fraction(a), multiplicity))
                counted += multiplicity
            elif self.point.kind != SingularPoint.ALGEBRAIC:
                roots.append(IndicialRoot(None, factor.degree() * multiplicity))
                counted += factor.degree() * multiplicity
        if counted < self.r:
            roots.append(IndicialRoot(None, self.r - counted))
        roots.sort(key=IndicialRoot.sort_key)
        assert sum(root.multiplicity for root in roots) == self.r, "Indicial polynomial must have degree {}".format(self.r)
        return roots

    def invariant_dimension(self, extra_truncation=DEFAULT_ANALYSIS_PARAMS["extra_truncation"]):
        """
        Counts Laurent series solutions sum_{M >= rho_min} y_M z^M. The recurrence
        P_0(M) y_M = -sum_{j >= 1} P_j(M - j) y_{M-j} determines y_M except at
        integer roots of P_0, where y_M becomes a free parameter and the right hand
        side must vanish. The dimension is #free - rank(conditions).
        """
        integer_roots = sorted(int(root.value) for root in self.exponents() if root.kind == IndicialRoot.INTEGER)
        if not integer_roots:
            return 0
        field = self.field
        low, high = integer_roots[0], integer_roots[-1]
        truncation = (high - low) + self.r + extra_truncation
        max_j = self.max_shift - self.min_shift
        logger.debug("Frobenius recurrence at %s from %d to %d", self.point.label(), low, low + truncation)

        forms = {}
        conditions = []
        free = 0
        for M in range(low, low + truncation + 1):
            rhs = {}
            for j in range(1, min(max_j, M - low) + 1):
                weight = self.shift_polynomial_at(j, M - j)
                if field.is_zero(weight):
                    continue
                for param, value in forms[M - j].items():
                    rhs[param] = field.add(rhs.get(param, field.zero), field.mul(weight, value))
            lead = self.shift_polynomial_at(0, M)
            if field.is_zero(lead):
                conditions.append(rhs)
                forms[M] = {free: field.one}
                free += 1
            else:
                factor = field.neg(field.inv(lead))
                forms[M] = {param: field.mul(factor, value) for param, value in rhs.items()}
        rows = [[row.get(param, field.zero) for param in range(free)] for row in conditions]
        return free - field.rank(rows)


class IndicialRoot(object):
    """A rational root of the indicial polynomial, or (value None) a group of irrational ones"""

    INTEGER = "integer"
    NONINTEGER = "noninteger"
    ALGEBRAIC = "algebraic"

    def __init__(self, value, multiplicity):
        self.value = value
        self.multiplicity = multiplicity
        if value is None:
            self.kind = self.ALGEBRAIC
        elif value.denominator == 1:
            self.kind = self.INTEGER
        else:
            self.kind = self.NONINTEGER

    def sort_key(self):
        return (self.value is None, self.value if self.value is not None else 0)

    def to_dict(self):
        return {"kind": self.kind, "value": None if self.value is None else format_rational(self.value),
                "multiplicity": self.multiplicity}

    def __eq__(self, other):
        return isinstance(other, IndicialRoot) and (self.value, self.multiplicity) == (other.value, other.multiplicity)

    def __hash__(self):
        return hash((self.value, self.multiplicity))

    def __repr__(self):
        value = "algebraic" if self.value is None else format_rational(self.value)
        return "IndicialRoot({}, multiplicity={})".format(value, self.multiplicity)


class FuchsCertificate(object):

    def __init__(self, results):
        self.results = list(results)

    @property
    def fuchsian(self):
        return all(passed for _, passed in self.results)

    def failing_points(self):
        return [point for point, passed in self.results if not passed]

    def to_dict(self):
        return {"fuchsian": self.fuchsian,
                "certificate": [{"point": point.label(), "passed": passed} for point, passed in self.results]}


def is_fuchsian(df):
    """Fuchs criterion at every root of a_r and at infinity"""
    return FuchsCertificate((point, LocalExpansion(df, point).is_regular()) for point in singular_points(df))


def _regular_expansion(df, point):
    local = LocalExpansion(df, point)
    local.check_regular()
    return local


def indicial_polynomial(df, point):
    """
    Indicial polynomial in `LAM`. At an algebraic point its coefficients are
    polynomials in `T` reduced modulo the point's factor.
    """
    return _regular_expansion(df, point).indicial_polynomial()


def indicial_exponents(df, point):
    return _regular_expansion(df, point).exponents()


def invariant_dimension(df, point, extra_truncation=DEFAULT_ANALYSIS_PARAMS["extra_truncation"]):
    return _regular_expansion(df, point).invariant_dimension(extra_truncation)


class PointRamification(object):
    """
    Args:
        point (SingularPoint)
        exponents (list): IndicialRoot entries
        invariant_dim (int): meromorphic solutions at one root of the point
        contribution (int): (rank - invariant_dim) times the number of conjugate roots
    """

    def __init__(self, point, exponents, invariant_dim, contribution):
        self.point = point
        self.exponents = exponents
        self.invariant_dim = invariant_dim
        self.contribution = contribution

    def to_dict(self):
        return {
            "point": self.point.label(),
            "kind": self.point.kind,
            "degree": self.point.degree,
            "multiplicity": self.point.multiplicity,
            "exponents": [root.to_dict() for root in self.exponents],
            "invariant_dim": self.invariant_dim,
            "contribution": self.contribution,
        }


class RamificationReport(object):

    FULL = "full"
    PARTIAL = "partial"

    def __init__(self, rank, points, partial_reason=None):
        assert all(p.contribution >= 0 for p in points), "Contributions are non-negative"
        self.rank = rank
        self.points = list(points)
        self.partial_reason = partial_reason

    @property
    def rf(self):
        return sum(p.contribution for p in self.points)

    @property
    def defect(self):
        return self.rf - 2 * self.rank

    @property
    def extremal(self):
        return self.defect == 0

    @property
    def completeness(self):
        return self.FULL if self.partial_reason is None else self.PARTIAL

    def contribution_at(self, label):
        return next(p.contribution for p in self.points if p.point.label() == label)

    def to_dict(self):
        return {
            "rank": self.rank,
            "points": [p.to_dict() for p in self.points],
            "rf": self.rf,
            "defect": self.defect,
            "extremal": self.extremal,
            "completeness": self.completeness if self.partial_reason is None
                            else "{} ({})".format(self.completeness, self.partial_reason),
        }

    def __repr__(self):
        return "RamificationReport(rank={}, rf={}, defect={}, completeness={})".format(
            self.rank, self.rf, self.defect, self.completeness)


def ramification_data(op, attest_irreducible=False, info=False, **params):
    """
    Args:
        op (DOperator): the operator
        attest_irreducible (bool): the caller vouches that the local system is
            irreducible and non-trivial, so a negative defect is an error
        info (bool): progress bar over singular points
        params: overrides for DEFAULT_ANALYSIS_PARAMS
    """
    params = dict(DEFAULT_ANALYSIS_PARAMS, **params)
    df = to_diff_form(op)
    skipped = []
    expansions = []
    # points above the degree cutoff are neither checked nor analysed
    for point in singular_points(df):
        if point.degree > params["max_factor_degree"]:
            logger.info("Skipping %s: factor degree %d exceeds %d", point.label(), point.degree, params["max_factor_degree"])
            skipped.append(point)
        else:
            expansions.append(LocalExpansion(df, point))
    irregular = next((local.point for local in expansions if not local.is_regular()), None)
    if irregular is not None:
        raise NotFuchsianError(irregular)

    rank = df.order
    analysed = []
    for local in tqdm(expansions, desc="Singular points", disable=not info):
        point = local.point
        invariant_dim = local.invariant_dimension(params["extra_truncation"])
        analysed.append(PointRamification(point, local.exponents(), invariant_dim, point.degree * (rank - invariant_dim)))

    reason = None
    if skipped:
        reason = "{} factor(s) of degree above {} not analysed".format(len(skipped), params["max_factor_degree"])
    report = RamificationReport(rank, analysed, reason)

    if report.defect < 0 and report.completeness == RamificationReport.FULL:
        message = "Ramification defect {} is negative; the local system is reducible or trivial".format(report.defect)
        if attest_irreducible:
            raise DefectBoundViolation(message)
        warnings.warn(message, RuntimeWarning)
    return report


def ramification_defect(op, **kwargs):
    return ramification_data(op, **kwargs).defect
