import logging
import random
from fractions import Fraction
from math import gcd, isqrt

from sympy import isprime
from sympy.ntheory.modular import crt

logger = logging.getLogger(__name__)

DEFAULT_MODULAR_PARAMS = {
    "prime_lower": 2 ** 31,
    "prime_upper": 2 ** 32,
    "max_primes": 64,
    "rank_primes": 2,
}


class BadPrime(Exception):

    def __init__(self, prime, reason):
        super(BadPrime, self).__init__("Prime {} discarded: {}".format(prime, reason))
        self.prime = prime
        self.reason = reason


def rational_reconstruction(a, m):
    """
    Returns the fraction p/q with p = a q (mod m), gcd(q, m) = 1, gcd(p, q) = 1,
    0 < q and |p|, q <= floor(sqrt(m/2)), or None when there is none.

    The candidate is read off the extended Euclidean remainder sequence of (m, a)
    at the first remainder not exceeding the bound.
    """
    if m < 2 or not 0 <= a < m:
        raise ValueError("Need 0 <= a < m and m >= 2, got a={}, m={}".format(a, m))
    bound = isqrt(m // 2)
    r0, r1 = m, a
    t0, t1 = 0, 1
    while r1 > bound:
        quotient = r0 // r1
        r0, r1 = r1, r0 - quotient * r1
        t0, t1 = t1, t0 - quotient * t1
    p, q = r1, t1
    if q < 0:
        p, q = -p, -q
    if q == 0 or q > bound or gcd(p, q) != 1 or gcd(q, m) != 1:
        return None
    return Fraction(p, q)


class PrimeSource(object):
    """
    Yields distinct primes: the forced ones first, then primes drawn uniformly
    from [lower, upper) with a seeded generator.
    """

    def __init__(self, seed=None, forced=(), lower=DEFAULT_MODULAR_PARAMS["prime_lower"],
                 upper=DEFAULT_MODULAR_PARAMS["prime_upper"]):
        self.rng = random.Random(seed)
        self.forced = list(forced)
        self.lower = lower
        self.upper = upper
        self.used = []

    def __iter__(self):
        return self

    def __next__(self):
        while self.forced:
            prime = self.forced.pop(0)
            if prime not in self.used:
                self.used.append(prime)
                return prime
        while True:
            candidate = self.rng.randrange(self.lower, self.upper)
            if candidate not in self.used and isprime(candidate):
                self.used.append(candidate)
                return candidate


def reduce_rows(rows, p):
    """Rational rows modulo p; raises BadPrime when p divides a denominator"""
    reduced = []
    for row in rows:
        reduced_row = []
        for x in row:
            if x.denominator % p == 0:
                raise BadPrime(p, "divides a denominator")
            reduced_row.append(x.numerator * pow(x.denominator, -1, p) % p)
        reduced.append(reduced_row)
    return reduced


def rref_mod(rows, ncols, p):
    """Reduced row echelon form over GF(p). Returns (pivot columns, nonzero rows)"""
    matrix = [list(row) for row in rows]
    pivots = []
    top = 0
    for col in range(ncols):
        if top == len(matrix):
            break
        pivot = next((i for i in range(top, len(matrix)) if matrix[i][col]), None)
        if pivot is None:
            continue
        matrix[top], matrix[pivot] = matrix[pivot], matrix[top]
        inverse = pow(matrix[top][col], -1, p)
        matrix[top] = [x * inverse % p for x in matrix[top]]
        for i in range(len(matrix)):
            factor = matrix[i][col]
            if i != top and factor:
                matrix[i] = [(x - factor * y) % p for x, y in zip(matrix[i], matrix[top])]
        pivots.append(col)
        top += 1
    return pivots, matrix[:top]


def nullspace_from_rref(reduced, pivots, ncols, negate, zero, one):
    """One basis vector per free column, with a one in that column"""
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = [zero] * ncols
        vector[free] = one
        for row, col in zip(reduced, pivots):
            vector[col] = negate(row[free])
        basis.append(vector)
    return basis


class ModularNullspace(object):
    """
    Rank and (when one-dimensional) nullspace vector of a rational matrix, found
    modulo a sequence of primes, merged by Chinese remaindering and recovered by
    rational reconstruction. A reconstructed vector is returned only after it is
    stable from k-1 to k primes and exactly annihilated by every row.

    Primes dividing a denominator, or giving a lower rank or a different pivot
    set than the best seen so far, are discarded.

    Args:
        rows (list): rows of Fractions
        ncols (int): number of columns
        primes (PrimeSource): where primes come from
        max_primes (int): budget of primes per solve
        rank_primes (int): primes agreeing on the rank before it is trusted
    """

    def __init__(self, rows, ncols, primes, max_primes=DEFAULT_MODULAR_PARAMS["max_primes"],
                 rank_primes=DEFAULT_MODULAR_PARAMS["rank_primes"]):
        self.rows = rows
        self.ncols = ncols
        self.primes = primes
        self.max_primes = max_primes
        self.rank_primes = rank_primes
        self.accepted = []
        self.discarded = []

    def solve(self):
        """
        Returns (rank, vector) where vector is None unless the nullspace is
        one-dimensional. Raises ValueError when the prime budget runs out.
        """
        best = None
        modulus, residues, previous = 1, None, None

        for _ in range(self.max_primes):
            p = next(self.primes)
            try:
                pivots, reduced = rref_mod(reduce_rows(self.rows, p), self.ncols, p)
            except BadPrime as e:
                logger.debug(str(e))
                self.discarded.append((p, e.reason))
                continue

            key = (len(pivots), [-c for c in pivots])
            if best is None or key > best:
                if best is not None:
                    logger.debug("Prime %d raised the rank to %d, dropping %d earlier primes", p, len(pivots), len(self.accepted))
                    self.discarded.extend((q, "rank drop") for q in self.accepted)
                best = key
                self.accepted = []
                modulus, residues, previous = 1, None, None
            elif key != best:
                self.discarded.append((p, "rank drop"))
                continue
            self.accepted.append(p)

            rank = len(pivots)
            nullity = self.ncols - rank
            if nullity != 1:
                if len(self.accepted) >= self.rank_primes:
                    return rank, None
                continue

            vector = nullspace_from_rref(reduced, pivots, self.ncols, lambda x: -x % p, 0, 1)[0]
            if residues is None:
                modulus, residues = p, vector
            else:
                merged = [crt([modulus, p], [r, v])[0] for r, v in zip(residues, vector)]
                modulus, residues = modulus * p, [int(x) for x in merged]
                if len(self.accepted) < self.rank_primes:
                    continue

            candidate = [rational_reconstruction(r, modulus) for r in residues]
            if any(x is None for x in candidate):
                continue
            if candidate == previous and self._annihilated_by_rows(candidate):
                logger.debug("Reconstruction stable after %d primes", len(self.accepted))
                return rank, candidate
            previous = candidate

        raise ValueError("Modular solve did not stabilize within {} primes".format(self.max_primes))

    def _annihilated_by_rows(self, vector):
        return all(sum(x * v for x, v in zip(row, vector)) == 0 for row in self.rows)
