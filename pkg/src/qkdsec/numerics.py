r"""Exact and log-domain numerics for security accounting.

Eavesdropping bounds in this package juxtapose quantities like 2^(-50)
and 2^(-1,000,000).  No linear floating-point representation survives
that range, so every probability and bound is carried as a base-2
exponent (:class:`Log2Value`) end to end; conversion to linear scale
happens only at display time, saturating at 1.0 with an explicit
"exceeds unity" flag.

Counting quantities (sums of binomial coefficients, sphere-packing
budgets) are computed in exact arbitrary-precision integers: no
rounding enters any binomial-sum comparison.
"""

from __future__ import annotations

import math

_LN2 = math.log(2.0)

NEG_INF = float("-inf")


def _log2_int(value: int) -> float:
    """log2 of a positive integer, valid beyond the float range."""
    if value <= 0:
        raise ValueError("log2 of non-positive integer")
    nbits = value.bit_length()
    if nbits <= 1000:
        return math.log2(value)
    shift = nbits - 53
    return math.log2(value >> shift) + shift


class Log2Value:
    """A nonnegative quantity stored as its base-2 logarithm.

    ``exponent`` is a finite float or ``-inf`` (which encodes zero);
    NaN is rejected.  Addition is the stable log-sum: the larger
    exponent is factored out, so the result never falls below
    ``max(a, b)`` and never overflows.  Multiplication adds exponents.

    Exponents above 0 are allowed: some analytic bounds legitimately
    exceed 1 and are reported unclamped.  Callers interpreting a value
    as a probability should check :attr:`exceeds_unity` or use
    :meth:`saturated`.
    """

    __slots__ = ("exponent",)

    def __init__(self, exponent: float):
        exponent = float(exponent)
        if math.isnan(exponent) or exponent == math.inf:
            raise ValueError("Log2Value exponent must be finite or -inf, got %r" % exponent)
        self.exponent = exponent

    @classmethod
    def zero(cls) -> "Log2Value":
        return cls(NEG_INF)

    @classmethod
    def one(cls) -> "Log2Value":
        return cls(0.0)

    @classmethod
    def from_linear(cls, value: float) -> "Log2Value":
        if value < 0:
            raise ValueError("Log2Value cannot represent a negative quantity")
        if value == 0:
            return cls.zero()
        return cls(math.log2(value))

    @property
    def is_zero(self) -> bool:
        return self.exponent == NEG_INF

    @property
    def exceeds_unity(self) -> bool:
        return self.exponent > 0.0

    def to_linear(self) -> float:
        """Linear value; underflows to 0.0 and overflows to inf silently."""
        if self.is_zero:
            return 0.0
        try:
            return 2.0 ** self.exponent
        except OverflowError:
            return math.inf

    def saturated(self) -> tuple[float, bool]:
        """Linear value clamped to [0, 1], plus an exceeds-unity flag."""
        if self.exceeds_unity:
            return 1.0, True
        return self.to_linear(), False

    def __add__(self, other: "Log2Value") -> "Log2Value":
        if not isinstance(other, Log2Value):
            return NotImplemented
        a, b = self.exponent, other.exponent
        if a < b:
            a, b = b, a
        if b == NEG_INF:
            # covers zero + zero and x + zero
            return Log2Value(a)
        # a >= b, both finite: log2(2^a + 2^b) = a + log2(1 + 2^(b-a))
        return Log2Value(a + math.log1p(2.0 ** (b - a)) / _LN2)

    def __mul__(self, other: "Log2Value") -> "Log2Value":
        if not isinstance(other, Log2Value):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Log2Value.zero()
        return Log2Value(self.exponent + other.exponent)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Log2Value) and self.exponent == other.exponent

    def __lt__(self, other: "Log2Value") -> bool:
        return self.exponent < other.exponent

    def __le__(self, other: "Log2Value") -> bool:
        return self.exponent <= other.exponent

    def __gt__(self, other: "Log2Value") -> bool:
        return self.exponent > other.exponent

    def __ge__(self, other: "Log2Value") -> bool:
        return self.exponent >= other.exponent

    def __hash__(self) -> int:
        return hash(self.exponent)

    def __repr__(self) -> str:
        return "Log2Value(%r)" % self.exponent


def one_minus(p: Log2Value) -> Log2Value:
    """1 - p for a probability p (exponent <= 0), in the log domain."""
    if p.exponent > 0:
        raise ValueError("one_minus needs a probability (exponent <= 0)")
    if p.exponent == 0.0:
        return Log2Value.zero()
    # 1 - 2^e = -expm1(e*ln2); expm1 keeps precision for e near 0,
    # and expm1(-inf) = -1 handles p = 0 exactly.
    return Log2Value(math.log2(-math.expm1(p.exponent * _LN2)))


def binary_entropy(q: float) -> float:
    """Binary Shannon entropy h2(q) = -q*log2(q) - (1-q)*log2(1-q).

    Uses the convention 0*log2(0) = 0, is symmetric under q -> 1-q and
    peaks at 1 for q = 1/2.  The (1-q)-term goes through ``log1p`` so
    that arguments as small as q ~ 1e-7 keep full double precision
    (naive evaluation of log2(1-q) cancels to noise there, and the
    bounds built on top multiply h2 by key lengths of 10^6).
    """
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError("binary entropy argument must lie in [0, 1], got %r" % q)
    if q > 0.5:
        q = 1.0 - q  # exact for q in [0.5, 1]
    if q == 0.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * (math.log1p(-q) / _LN2)


def binomial_sum(n: int, t: int) -> int:
    """Exact sum of C(n, a) for a = 0..t (arbitrary precision)."""
    _check_n_t(n, t)
    return sum(math.comb(n, a) for a in range(t + 1))


def log2_binomial_sum(n: int, t: int) -> Log2Value:
    """log2 of :func:`binomial_sum`; for t/n <= 1/2 it stays <= n*h2(t/n)."""
    return Log2Value(_log2_int(binomial_sum(n, t)))


def hamming_max_info_bits(k: int, t: int) -> int:
    """Largest m with 2^m * binomial_sum(k, t) <= 2^k, computed exactly.

    This is the sphere-packing limit on information digits of a length-k
    code correcting t errors.  For perfect codes the limit is attained,
    e.g. k=7, t=1 gives m=4.
    """
    _check_n_t(k, t)
    quotient = (1 << k) // binomial_sum(k, t)
    return quotient.bit_length() - 1


def round_half_up(x: float) -> int:
    """Nearest integer, halves rounding up; threshold rule for Q*length.

    Used wherever a real error rate times a block length must become an
    error count: a block designed for rate Q must handle round(Q*n)
    errors.  (Plain floor would let any n with Q*n < 1 pass the
    sphere-packing test with zero redundancy.)
    """
    return math.floor(x + 0.5)


def solve_parity_length(k: int, q: float, max_n: int = 1_000_000) -> int:
    """Smallest n >= k with binomial_sum(n, round(q*n)) <= 2^(n-k).

    Exact integer search for the sphere-packing-feasible length of a
    code carrying k information digits at error rate q.  The entropy
    closed form k/(1 - h2(q)) is used only to bracket the search: any
    n past the bracket satisfies the exact condition, which is strictly
    tighter below it (documented slack: the bracket is padded by 64 to
    absorb the half-bit threshold rounding).

    Raises ``ValueError`` with a diagnostic if the bracket exceeds
    ``max_n`` (error rate too close to the entropy limit).
    """
    if k < 1:
        raise ValueError("information length k must be >= 1, got %r" % k)
    if not 0.0 < q < 0.5:
        raise ValueError("error rate must lie in (0, 0.5), got %r" % q)
    h = binary_entropy(q)
    bracket = math.ceil(k / (1.0 - h)) + 64
    if bracket > max_n:
        raise ValueError(
            "no feasible length within search ceiling %d: k=%d at error rate "
            "%g needs about %d digits (entropy loss h2=%g)"
            % (max_n, k, q, bracket, h))
    for n in range(k, bracket + 1):
        t = round_half_up(q * n)
        if t > n:
            continue
        if binomial_sum(n, t) <= (1 << (n - k)):
            return n
    raise ValueError(
        "exact search failed inside bracket [%d, %d] for k=%d, q=%g; "
        "this contradicts the entropy bound and indicates a bug"
        % (k, bracket, k, q))


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score confidence interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _check_n_t(n: int, t: int) -> None:
    if n < 0 or t < 0:
        raise ValueError("negative arguments: n=%r t=%r" % (n, t))
    if t > n:
        raise ValueError("error count t=%r exceeds length n=%r" % (t, n))
