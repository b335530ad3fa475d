r"""Closed-form eavesdropper-success bounds.

The bounds here quantify what an adversary holding side information
about a distributed key can achieve:

* :func:`otp_secrecy_table` - exhaustive check of one-time-pad perfect
  secrecy: Pr(X|C) = Pr(X) exactly when the key is uniform.
* :func:`guessing_bound` - the adversary's probability of guessing the
  whole final key is at most 2^(-|K|) + eps, where eps bounds the trace
  distance between the distributed and the ideal key state.
* :func:`kpa_bound` - the same bound applied to the unknown remainder
  of the key after a known-plaintext attack reveals part of it.
* :func:`near_miss_bound` - rough estimate of the probability that the
  adversary's key guess is within bit-error rate Q_E of the true key;
  it may exceed 1 and is reported unclamped so the crossover is visible.
* :func:`pa_guess_bound` - the adversary's success probability after
  hashing the key through a delta-almost-two-universal family:
  (1 - delta)*p + delta, which never falls below p.

All bounds are carried as :class:`~qkdsec.numerics.Log2Value`; the OTP
table uses exact rational arithmetic whenever its inputs are rational,
since perfect secrecy is an exact identity and floating error would
blur the pass/fail line.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .numerics import (
    Log2Value,
    binary_entropy,
    log2_binomial_sum,
    one_minus,
    round_half_up,
)


@dataclass(frozen=True)
class SecurityParams:
    """Session security parameters.

    epsilon
        Trace-distance upper bound between the distributed and the ideal
        key state, as a Log2Value probability (exponent <= 0).
    key_bits
        Final key length |K| in bits.
    xi
        Error-correction efficiency factor in [1, 2]; only the leakage
        models consume it, but it travels with the security parameters.
    """

    epsilon: Log2Value
    key_bits: int
    xi: float = 1.0

    def __post_init__(self):
        if self.epsilon.exponent > 0:
            raise ValueError("epsilon must be a probability (exponent <= 0)")
        if self.key_bits < 1:
            raise ValueError("key_bits must be >= 1")
        if not 1.0 <= self.xi <= 2.0:
            raise ValueError("xi must lie in [1, 2], got %r" % self.xi)


class JointDistribution:
    """Discrete distribution over bitstrings (or arbitrary hashable symbols).

    Probabilities must be nonnegative and sum to 1 within 1e-12; exact
    rationals (``Fraction``) are kept exact throughout.
    """

    def __init__(self, support: Mapping):
        probs = dict(support)
        if not probs:
            raise ValueError("empty distribution")
        for outcome, p in probs.items():
            if p < 0:
                raise ValueError("negative probability for %r" % (outcome,))
        total = sum(probs.values())
        if abs(total - 1) > 1e-12:
            raise ValueError("probabilities sum to %r, expected 1" % total)
        self.support = probs

    def outcomes(self):
        return self.support.keys()

    def __getitem__(self, outcome):
        return self.support.get(outcome, 0)

    @classmethod
    def uniform_bits(cls, n_bits: int) -> "JointDistribution":
        p = Fraction(1, 2 ** n_bits)
        return cls({format(v, "0%db" % n_bits): p for v in range(2 ** n_bits)})


@dataclass
class OtpSecrecyReport:
    """Exhaustive ciphertext-conditional table for one OTP configuration."""

    ciphertext_dist: dict
    conditional: dict  # ciphertext -> {plaintext: Pr(X=x | C=c)}
    plaintext_marginal: dict
    max_deviation: object  # max |Pr(X=x|C=c) - Pr(X=x)|, exact if inputs exact

    @property
    def perfectly_secret(self) -> bool:
        return self.max_deviation == 0


def _xor_bits(a: str, b: str) -> str:
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def otp_secrecy_table(plaintext_dist: JointDistribution,
                      key_dist: JointDistribution) -> OtpSecrecyReport:
    """Enumerate C = X xor K and measure the worst secrecy deviation.

    Plaintext and key must be independent distributions over equal-length
    bitstrings.  The deviation max |Pr(X|C) - Pr(X)| is exactly zero if
    and only if the key distribution is uniform.
    """
    x_lens = {len(x) for x in plaintext_dist.outcomes()}
    k_lens = {len(k) for k in key_dist.outcomes()}
    if len(x_lens) != 1 or len(k_lens) != 1 or x_lens != k_lens:
        raise ValueError("plaintext and key must be bitstrings of one equal length")

    joint = {}  # (x, c) -> probability
    for x, px in plaintext_dist.support.items():
        for k, pk in key_dist.support.items():
            c = _xor_bits(x, k)
            joint[(x, c)] = joint.get((x, c), 0) + px * pk

    ciphertext_dist = {}
    for (x, c), p in joint.items():
        ciphertext_dist[c] = ciphertext_dist.get(c, 0) + p

    conditional = {}
    max_dev = 0
    for c, pc in ciphertext_dist.items():
        if pc == 0:
            continue
        table_c = {}
        for x in plaintext_dist.outcomes():
            pxc = joint.get((x, c), 0) / pc
            table_c[x] = pxc
            dev = abs(pxc - plaintext_dist[x])
            if dev > max_dev:
                max_dev = dev
        conditional[c] = table_c

    return OtpSecrecyReport(
        ciphertext_dist=ciphertext_dist,
        conditional=conditional,
        plaintext_marginal=dict(plaintext_dist.support),
        max_deviation=max_dev,
    )


def guessing_floor(params: SecurityParams) -> Log2Value:
    """Blind-guessing success probability 2^(-|K|)."""
    return Log2Value(-float(params.key_bits))


def guessing_bound(params: SecurityParams) -> Log2Value:
    """Upper bound 2^(-|K|) + eps on guessing the entire final key.

    Monotone increasing in eps and decreasing in |K|; the log-domain sum
    keeps both terms meaningful even when they differ by hundreds of
    thousands of orders of magnitude.
    """
    return guessing_floor(params) + params.epsilon


def kpa_bound(params: SecurityParams, unknown_bits: int) -> Log2Value:
    """Bound 2^(-u) + eps on guessing the u unknown key bits.

    Models a known-plaintext attack that reveals ``key_bits - u`` bits
    of the key; with ``unknown_bits == key_bits`` it coincides with
    :func:`guessing_bound`.
    """
    if not 1 <= unknown_bits <= params.key_bits:
        raise ValueError(
            "unknown_bits must lie in [1, %d], got %r" % (params.key_bits, unknown_bits))
    return Log2Value(-float(unknown_bits)) + params.epsilon


def near_miss_bound(params: SecurityParams, q_e: float) -> Log2Value:
    """Bound on obtaining a key within bit-error rate q_e of the truth.

    Returns 2^(-|K|(1 - h2(q_e))) + eps * 2^(|K| h2(q_e)).  At q_e = 0
    this collapses to :func:`guessing_bound`.  The value may exceed 1
    (the estimate is deliberately rough); it is returned unclamped so
    the crossover point is observable - check ``exceeds_unity`` before
    reading it as a probability.
    """
    if not 0.0 <= q_e <= 0.5:
        raise ValueError("q_e must lie in [0, 0.5], got %r" % q_e)
    k = float(params.key_bits)
    h = binary_entropy(q_e)
    direct_hit = Log2Value(-k * (1.0 - h))
    ball_term = params.epsilon * Log2Value(k * h)
    return direct_hit + ball_term


def readable_key_count(key_bits: int, q_e: float) -> Log2Value:
    """Exact log2 count of keys within round(|K|*q_e) bit errors.

    The big-integer companion of the 2^(|K| h2(q_e)) relaxation used by
    :func:`near_miss_bound`; exposed so the entropy form can be
    cross-checked against the exact ball size.
    """
    if not 0.0 <= q_e <= 0.5:
        raise ValueError("q_e must lie in [0, 0.5], got %r" % q_e)
    t = min(round_half_up(key_bits * q_e), key_bits)
    return log2_binomial_sum(key_bits, t)


def pa_guess_bound(p_correct: Log2Value, delta: Log2Value) -> Log2Value:
    """Success probability (1 - delta)*p + delta after universal hashing.

    ``p_correct`` is the adversary's probability of holding the exact
    pre-hash key; ``delta`` the family's pairwise collision bound.  The
    result is >= p_correct, with equality iff delta = 0 or p = 1:
    hashing cannot decrease the adversary's guessing probability.
    """
    for name, v in (("p_correct", p_correct), ("delta", delta)):
        if v.exponent > 0:
            raise ValueError("%s must be a probability (exponent <= 0)" % name)
    return one_minus(delta) * p_correct + delta
