"""
Recovering an annihilating operator from a truncated period sequence.

The unknowns are the coefficients l_{m,n} of sum l_{m,n} t^n D^m for 0 <= m <= R,
0 <= n <= S, and every index e = 0..M contributes the homogeneous equation
sum l_{m,n} (e - n)^m c_{e-n} = 0. The operator is a nullspace vector.
"""
import logging
from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from quantum_periods_py.periods.core import DOperator, PeriodSequence
from quantum_periods_py.periods.recurrence import normalize, annihilates
from quantum_periods_py.fitting.modular import ModularNullspace, PrimeSource, nullspace_from_rref, DEFAULT_MODULAR_PARAMS
from quantum_periods_py.fitting.search import AnsatzSearch
from quantum_periods_py.utils import as_fraction

logger = logging.getLogger(__name__)

DEFAULT_FIT_PARAMS = {
    "min_excess": 10,
    "max_order": 4,
    "max_degree": 8,
}

NOT_FOUND_REASONS = (
    "nullspace_trivial",
    "nullspace_multidimensional",
    "insufficient_excess",
    "reconstruction_failed",
    "search_exhausted",
)


class OperatorNotFound(Exception):

    def __init__(self, reason, message=""):
        assert reason in NOT_FOUND_REASONS, "Unknown reason {}".format(reason)
        super(OperatorNotFound, self).__init__("{}{}".format(reason, ": " + message if message else ""))
        self.reason = reason


class FitResult(object):
    """
    Args:
        operator (DOperator): normalized operator annihilating the input
        excess_equations (int): equations beyond those needed to pin the nullspace
        ansatz (tuple): (R, S) actually used
        primes_used (list): primes accepted by the modular path
        primes_discarded (list): (prime, reason) pairs rejected by the modular path
    """

    def __init__(self, operator, excess_equations, ansatz, primes_used=(), primes_discarded=()):
        assert operator.is_normalized(), "Fitted operators are normalized"
        assert excess_equations >= 0
        self.operator = operator
        self.excess_equations = excess_equations
        self.ansatz = tuple(ansatz)
        self.primes_used = list(primes_used)
        self.primes_discarded = list(primes_discarded)

    def __eq__(self, other):
        return isinstance(other, FitResult) and \
            (self.operator.terms, self.excess_equations, self.ansatz) == (other.operator.terms, other.excess_equations, other.ansatz)

    def __repr__(self):
        return "FitResult(operator={}, excess_equations={}, ansatz={})".format(self.operator, self.excess_equations, self.ansatz)


def ansatz_columns(R, S):
    return [(m, n) for m in range(R + 1) for n in range(S + 1)]


def equation_rows(seq, R, S):
    """One row per e = 0..M, one column per (m, n) in ansatz_columns order"""
    columns = ansatz_columns(R, S)
    rows = []
    for e in range(len(seq)):
        rows.append([Fraction((e - n) ** m) * seq[e - n] if e >= n else Fraction(0) for m, n in columns])
    return rows


def _dense_solve(seq, R, S):
    columns = ansatz_columns(R, S)
    rows = equation_rows(seq, R, S)
    matrix = DomainMatrix([[QQ(x.numerator, x.denominator) for x in row] for row in rows], (len(rows), len(columns)), QQ)
    reduced, pivots = matrix.rref()
    pivots = list(pivots)
    if len(columns) - len(pivots) != 1:
        return len(pivots), None
    entries = reduced.to_Matrix()
    reduced_rows = [[as_fraction(entries[i, j]) for j in range(len(columns))] for i in range(len(pivots))]
    vector = nullspace_from_rref(reduced_rows, pivots, len(columns), lambda x: -x, Fraction(0), Fraction(1))[0]
    return len(pivots), vector


def _operator_from_vector(vector, R, S):
    terms = [(l, m, n) for l, (m, n) in zip(vector, ansatz_columns(R, S)) if l != 0]
    try:
        return normalize(DOperator(terms))
    except ValueError as e:
        raise OperatorNotFound("nullspace_trivial", "nullspace vector is not a differential operator ({})".format(e))


def _check_ansatz(R, S, min_excess):
    if R < 1 or S < 1:
        raise ValueError("Ansatz bounds must be at least 1, got R={}, S={}".format(R, S))
    if min_excess < 0:
        raise ValueError("min_excess must be non-negative, got {}".format(min_excess))


def _fit(seq, R, S, min_excess, solve_fn):
    """
    Shared driver. A k-dimensional nullspace (k > 1) that consists of the shifts
    t^j L0 (j < k) of a single operator is resolved by refitting at S - k + 1,
    which is exactly the degree bound where only L0 survives.
    """
    if not isinstance(seq, PeriodSequence):
        seq = PeriodSequence(seq)
    unknowns = (R + 1) * (S + 1)
    rank, vector = solve_fn(R, S)
    nullity = unknowns - rank
    if nullity == 0:
        raise OperatorNotFound("nullspace_trivial", "no operator with R={}, S={}".format(R, S))
    if nullity > 1:
        reduced_degree = S - nullity + 1
        if reduced_degree < 0:
            raise OperatorNotFound("nullspace_multidimensional", "nullspace has dimension {}".format(nullity))
        reduced_rank, reduced_vector = solve_fn(R, reduced_degree)
        if (R + 1) * (reduced_degree + 1) - reduced_rank != 1:
            raise OperatorNotFound("nullspace_multidimensional", "nullspace has dimension {}".format(nullity))
        logger.debug("Nullspace of dimension %d is spanned by t-shifts; refitted at S=%d", nullity, reduced_degree)
        S, rank, vector = reduced_degree, reduced_rank, reduced_vector

    excess = len(seq) - rank
    if excess < min_excess:
        raise OperatorNotFound("insufficient_excess", "{} excess equations, {} required".format(excess, min_excess))
    operator = _operator_from_vector(vector, R, S)
    report = annihilates(operator, seq)
    assert report.ok, "Fitted operator fails to annihilate its input: {}".format(report)
    return operator, excess, (R, S)


def fit_operator(seq, R, S, min_excess=DEFAULT_FIT_PARAMS["min_excess"]):
    """Exact rational nullspace of the (R, S) ansatz"""
    _check_ansatz(R, S, min_excess)
    operator, excess, ansatz = _fit(seq, R, S, min_excess, lambda r, s: _dense_solve(seq, r, s))
    return FitResult(operator, excess, ansatz)


def fit_operator_modular(seq, R, S, min_excess=DEFAULT_FIT_PARAMS["min_excess"], seed=None, primes=(), **params):
    """
    Same result as fit_operator, computed modulo random primes in [2^31, 2^32).

    Args:
        seed (int): seed for the prime generator
        primes (iterable): primes to try before the random ones
        params: overrides for DEFAULT_MODULAR_PARAMS
    """
    _check_ansatz(R, S, min_excess)
    params = dict(DEFAULT_MODULAR_PARAMS, **params)
    source = PrimeSource(seed, primes, params["prime_lower"], params["prime_upper"])
    solvers = []

    def solve(r, s):
        solver = ModularNullspace(equation_rows(seq, r, s), (r + 1) * (s + 1), source,
                                  params["max_primes"], params["rank_primes"])
        solvers.append(solver)
        try:
            return solver.solve()
        except ValueError as e:
            raise OperatorNotFound("reconstruction_failed", str(e))

    operator, excess, ansatz = _fit(seq, R, S, min_excess, solve)
    used = [p for solver in solvers for p in solver.accepted]
    discarded = [d for solver in solvers for d in solver.discarded]
    return FitResult(operator, excess, ansatz, used, discarded)


def fit_operator_search(seq, R_max=DEFAULT_FIT_PARAMS["max_order"], S_max=DEFAULT_FIT_PARAMS["max_degree"],
                        min_excess=DEFAULT_FIT_PARAMS["min_excess"], method="dense", seed=None, info=False):
    """First successful fit over ansatz sizes in increasing (R + S, R) order"""
    if method == "dense":
        attempt = lambda R, S: fit_operator(seq, R, S, min_excess)
    elif method == "modular":
        attempt = lambda R, S: fit_operator_modular(seq, R, S, min_excess, seed=seed)
    else:
        raise ValueError("Unknown fit method {!r}, expected 'dense' or 'modular'".format(method))
    search = AnsatzSearch(attempt, R_max, S_max, (OperatorNotFound,), info=info)
    result = search.run()
    if result is None:
        raise OperatorNotFound("search_exhausted", "no ansatz up to R={}, S={} succeeded".format(R_max, S_max))
    return result
