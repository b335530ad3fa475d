r"""Classical post-processing: GF(2) codes, leakage models, Toeplitz hashing.

Reconciliation is modeled with explicit parity-check codes: the default
family is repetition codes plus the single-error-correcting Hamming
codes (7,4) and (15,11), whose perfect sphere-packing arithmetic makes
the leakage accounting exactly testable.  User codes load from a plain
text format (first line ``n k``, then n-k rows of n characters from
``{0,1}``).

Two analytic models for the pre-shared key consumed to hide a
reconciliation syndrome are provided:

* :func:`leak_conventional` - xi * k * h2(Q), the customary accounting
  with an efficiency factor xi in [1, 2];
* :func:`leak_yuen` - k * h2(Q) / (1 - h2(Q)), the stricter accounting
  obtained when parity digits are appended to the key (so the key
  candidate space is not collapsed by decoding) and those digits are
  hidden at the same rate.

Both are first-class: every downstream consumer takes the model as a
parameter, so the contrast between them is a one-flag switch.

Privacy amplification uses the Toeplitz family: output bit j is the
GF(2) inner product of the input with seed window j.  For any fixed
pair of distinct inputs the collision probability over a uniform seed
is exactly 2^(-out_len), making the family delta-almost-two-universal
with delta = 2^(-out_len); :func:`family_collision_rate` measures this
exhaustively at small sizes.

On the two key layouts: treating a k-bit key directly as a noisy
codeword of a (k, m) code collapses the post-correction candidate space
from 2^k to 2^m (see :func:`shrinkage_report`).  Appending n-k parity
digits from a systematic encoder instead preserves all 2^k candidates
(:func:`extension_report`).  How appended parity digits would
themselves be authenticated is outside this model and noted here as a
gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .numerics import binary_entropy, hamming_max_info_bits, round_half_up, wilson_interval

# Coset-leader tables are only precomputed in this regime; larger codes
# fall back to single-error decoding.
_TABLE_MAX_N = 24
_TABLE_MAX_REDUNDANCY = 16

_YUEN_DENOMINATOR_CUTOFF = 1e-6


def _bits_array(bits, length: Optional[int] = None) -> np.ndarray:
    a = np.asarray(bits, dtype=np.uint8)
    if a.ndim != 1:
        raise ValueError("expected a 1-D bit sequence")
    if np.any(a > 1):
        raise ValueError("bits must be 0 or 1")
    if length is not None and a.size != length:
        raise ValueError("expected %d bits, got %d" % (length, a.size))
    return a


def _bits_to_int(bits: np.ndarray) -> int:
    """Read a bit vector as a binary number, leftmost bit most significant."""
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def _int_to_bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def _gf2_row_rank(m: np.ndarray) -> int:
    a = m.copy() % 2
    rank = 0
    rows, cols = a.shape
    for col in range(cols):
        pivot = None
        for r in range(rank, rows):
            if a[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, col]:
                a[r] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass
class LinearCodeSpec:
    """A binary linear code given by its (n-k) x n parity-check matrix."""

    n: int
    k: int
    parity_check: np.ndarray
    name: str = ""
    _coset_table: Optional[dict] = field(default=None, repr=False, compare=False)
    _column_syndromes: Optional[list] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        h = np.asarray(self.parity_check, dtype=np.uint8) % 2
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n, got k=%d n=%d" % (self.k, self.n))
        if h.shape != (self.n - self.k, self.n):
            raise ValueError("parity check must be (n-k) x n = %r, got %r"
                             % ((self.n - self.k, self.n), h.shape))
        if _gf2_row_rank(h) != self.n - self.k:
            raise ValueError("parity-check matrix must have full row rank %d" % (self.n - self.k))
        self.parity_check = h

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    def is_systematic(self) -> bool:
        """True when the last n-k columns form the identity."""
        return bool(np.array_equal(self.parity_check[:, self.k:],
                                   np.eye(self.redundancy, dtype=np.uint8)))

    def codewords(self) -> np.ndarray:
        """All 2^k codewords (systematic codes only, k <= 20)."""
        if not self.is_systematic():
            raise ValueError("codeword enumeration requires a systematic parity check")
        if self.k > 20:
            raise ValueError("codeword enumeration capped at k <= 20")
        a = self.parity_check[:, :self.k]
        words = np.zeros((2 ** self.k, self.n), dtype=np.uint8)
        for v in range(2 ** self.k):
            info = _int_to_bits(v, self.k)
            words[v, :self.k] = info
            words[v, self.k:] = (a @ info) % 2
        return words

    def minimum_distance(self) -> int:
        words = self.codewords()
        weights = words.sum(axis=1)
        return int(np.min(weights[weights > 0]))

    def correction_radius(self) -> int:
        """Guaranteed number of correctable errors, (d_min - 1) // 2."""
        return (self.minimum_distance() - 1) // 2


def syndrome(code: LinearCodeSpec, word) -> np.ndarray:
    """Parity-check image H * word over GF(2); linear in the word."""
    w = _bits_array(word, code.n)
    return (code.parity_check @ w) % 2


def encode(code: LinearCodeSpec, info_bits) -> np.ndarray:
    """Systematic codeword: the k info bits followed by their parity digits."""
    if not code.is_systematic():
        raise ValueError("encoding requires a systematic parity check ([A | I] form)")
    info = _bits_array(info_bits, code.k)
    parity = (code.parity_check[:, :code.k] @ info) % 2
    return np.concatenate([info, parity]).astype(np.uint8)


def _column_syndrome_ints(code: LinearCodeSpec) -> list:
    if code._column_syndromes is None:
        code._column_syndromes = [
            _bits_to_int(code.parity_check[:, i]) for i in range(code.n)]
    return code._column_syndromes


def _build_coset_table(code: LinearCodeSpec) -> dict:
    """Minimum-weight coset leaders, ties broken by smallest value.

    Error patterns are enumerated by weight and, within a weight, in
    increasing value of the pattern read as a binary number; the first
    pattern reaching a syndrome becomes its leader, which makes decoding
    deterministic and reproducible.
    """
    n = code.n
    cols = _column_syndrome_ints(code)
    wanted = 1 << code.redundancy
    table = {0: 0}
    for weight in range(1, n + 1):
        if len(table) == wanted:
            break
        mask = (1 << weight) - 1
        limit = 1 << n
        while mask < limit:
            s = 0
            m = mask
            while m:
                low = m & -m
                s ^= cols[n - 1 - low.bit_length() + 1]
                m ^= low
            if s not in table:
                table[s] = mask
                if len(table) == wanted:
                    break
            # Gosper's hack: next mask of equal weight in increasing order
            c = mask & -mask
            r = mask + c
            mask = (((r ^ mask) >> 2) // c) | r
    return table


def _coset_table(code: LinearCodeSpec) -> Optional[dict]:
    if code.n > _TABLE_MAX_N or code.redundancy > _TABLE_MAX_REDUNDANCY:
        return None
    if code._coset_table is None:
        code._coset_table = _build_coset_table(code)
    return code._coset_table


def decode_by_syndrome(code: LinearCodeSpec, syndrome_diff,
                       max_weight: Optional[int] = None) -> Optional[np.ndarray]:
    """Minimum-weight error pattern consistent with a syndrome, or None.

    Uses a precomputed coset-leader table when the code is small enough
    (n <= 24, n-k <= 16); otherwise only zero- and single-bit patterns
    are recognized (sufficient for single-error codes of any length).
    Returns None when no consistent pattern within ``max_weight``
    exists - the caller treats that as a reconciliation failure.

    Errors beyond the correction radius decode to some other leader
    (a miscorrection); that outcome is returned, not hidden, and is
    caught downstream by key verification.
    """
    s = _bits_array(syndrome_diff, code.redundancy)
    if max_weight is None:
        max_weight = code.n
    s_int = _bits_to_int(s)
    table = _coset_table(code)
    if table is not None:
        leader = table.get(s_int)
        if leader is None:
            return None
        pattern = _int_to_bits(leader, code.n)
    elif s_int == 0:
        pattern = np.zeros(code.n, dtype=np.uint8)
    else:
        cols = _column_syndrome_ints(code)
        try:
            position = cols.index(s_int)
        except ValueError:
            return None
        pattern = np.zeros(code.n, dtype=np.uint8)
        pattern[position] = 1
    if int(pattern.sum()) > max_weight:
        return None
    return pattern


# ----------------------------------------------------------------------
# Shipped code family
# ----------------------------------------------------------------------

def hamming_code(r: int) -> LinearCodeSpec:
    """Systematic Hamming code of length 2^r - 1 correcting one error.

    Parity-check columns are the binary expansions of 1..n, reordered so
    the unit columns (powers of two) sit last: H = [A | I_r].
    """
    if r < 2:
        raise ValueError("Hamming parameter r must be >= 2")
    n = 2 ** r - 1
    info_cols = [v for v in range(1, n + 1) if v & (v - 1)]
    parity_cols = [1 << j for j in range(r)]
    h = np.zeros((r, n), dtype=np.uint8)
    for i, v in enumerate(info_cols + parity_cols):
        for row in range(r):
            h[row, i] = (v >> row) & 1
    return LinearCodeSpec(n=n, k=n - r, parity_check=h, name="hamming%d" % n)


def repetition_code(n: int) -> LinearCodeSpec:
    """(n, 1) repetition code; corrects (n-1)//2 errors."""
    if n < 2:
        raise ValueError("repetition length must be >= 2")
    h = np.hstack([np.ones((n - 1, 1), dtype=np.uint8),
                   np.eye(n - 1, dtype=np.uint8)])
    return LinearCodeSpec(n=n, k=1, parity_check=h, name="rep%d" % n)


def named_codes() -> dict:
    return {
        "hamming7": hamming_code(3),
        "hamming15": hamming_code(4),
        "rep3": repetition_code(3),
        "rep5": repetition_code(5),
    }


def parse_parity_check_text(text: str, name: str = "") -> LinearCodeSpec:
    """Parse the plain-text code format: ``n k`` then n-k rows over {0,1}."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty code description")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError("first line must be 'n k', got %r" % lines[0])
    n, k = int(header[0]), int(header[1])
    rows = lines[1:]
    if len(rows) != n - k:
        raise ValueError("expected %d parity rows, got %d" % (n - k, len(rows)))
    h = np.zeros((n - k, n), dtype=np.uint8)
    for i, row in enumerate(rows):
        if len(row) != n or set(row) - {"0", "1"}:
            raise ValueError("row %d must be %d characters from {0,1}" % (i + 1, n))
        h[i] = [int(c) for c in row]
    return LinearCodeSpec(n=n, k=k, parity_check=h, name=name)


def load_parity_check(path) -> LinearCodeSpec:
    with open(path, "r", encoding="ascii") as fh:
        return parse_parity_check_text(fh.read(), name=str(path))


def resolve_code(spec: str) -> LinearCodeSpec:
    """Look up a shipped code by name or load a parity-check file."""
    codes = named_codes()
    if spec in codes:
        return codes[spec]
    return load_parity_check(spec)


# ----------------------------------------------------------------------
# Leakage models
# ----------------------------------------------------------------------

def _check_leak_args(k: int, q: float) -> None:
    if k < 1:
        raise ValueError("key length must be >= 1")
    if not 0.0 <= q < 0.5:
        raise ValueError("error rate must lie in [0, 0.5), got %r" % q)


def leak_conventional(k: int, q: float, xi: float) -> float:
    """Customary syndrome-hiding key consumption xi * k * h2(q) in bits."""
    _check_leak_args(k, q)
    if not 1.0 <= xi <= 2.0:
        raise ValueError("xi must lie in [1, 2], got %r" % xi)
    return xi * k * binary_entropy(q)


def leak_yuen(k: int, q: float) -> float:
    """Strict key consumption k * h2(q) / (1 - h2(q)) in bits.

    Always >= leak_conventional(k, q, 1), with equality iff q = 0.
    Diverges as h2(q) -> 1; rejected once the denominator drops below
    1e-6 (q within ~1e-7 of 1/2).
    """
    _check_leak_args(k, q)
    denom = 1.0 - binary_entropy(q)
    if denom < _YUEN_DENOMINATOR_CUTOFF:
        raise ValueError(
            "leakage model diverges: 1 - h2(%g) = %.3g is below the %g cutoff"
            % (q, denom, _YUEN_DENOMINATOR_CUTOFF))
    return k * binary_entropy(q) / denom


def syndrome_bits_exact(k: int, q: float) -> int:
    """Exact sphere-packing syndrome length k - m for round(q*k) errors.

    The integer companion of the entropy form k*h2(q): for perfect codes
    (e.g. k=7 at q=1/7) the exact requirement is smaller, and reporting
    both exhibits how much the entropy form overcounts.
    """
    _check_leak_args(k, q)
    t = min(round_half_up(q * k), k)
    return k - hamming_max_info_bits(k, t)


# ----------------------------------------------------------------------
# Toeplitz hashing
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ToeplitzSeed:
    """Seed bits selecting one member of the Toeplitz hash family.

    ``seed_bits`` has length in_len + out_len - 1; output bit j of the
    hash is XOR over i of input[i] AND seed_bits[j + i].
    """

    in_len: int
    out_len: int
    seed_bits: tuple

    def __post_init__(self):
        if not 1 <= self.out_len <= self.in_len:
            raise ValueError("need 1 <= out_len <= in_len")
        bits = tuple(int(b) for b in self.seed_bits)
        if len(bits) != self.in_len + self.out_len - 1:
            raise ValueError("seed must have in_len + out_len - 1 = %d bits, got %d"
                             % (self.in_len + self.out_len - 1, len(bits)))
        if any(b not in (0, 1) for b in bits):
            raise ValueError("seed bits must be 0 or 1")
        object.__setattr__(self, "seed_bits", bits)

    @classmethod
    def random(cls, rng: np.random.Generator, in_len: int, out_len: int) -> "ToeplitzSeed":
        bits = rng.integers(0, 2, size=in_len + out_len - 1)
        return cls(in_len, out_len, tuple(int(b) for b in bits))


def toeplitz_hash(seed: ToeplitzSeed, input_bits) -> np.ndarray:
    """Hash in_len bits down to out_len bits; linear in the input."""
    x = _bits_array(input_bits, seed.in_len)
    x_int = _pack_lsb(x)
    s_int = _pack_lsb(np.asarray(seed.seed_bits, dtype=np.uint8))
    out_int = _toeplitz_hash_int(s_int, x_int, seed.in_len, seed.out_len)
    return np.array([(out_int >> j) & 1 for j in range(seed.out_len)], dtype=np.uint8)


def _pack_lsb(bits: np.ndarray) -> int:
    """Pack a bit sequence into an int with element i at bit position i."""
    v = 0
    for i, b in enumerate(bits):
        v |= int(b) << i
    return v


def _toeplitz_hash_int(seed_int: int, x_int: int, in_len: int, out_len: int) -> int:
    mask = (1 << in_len) - 1
    out = 0
    for j in range(out_len):
        if (((seed_int >> j) & x_int) & mask).bit_count() & 1:
            out |= 1 << j
    return out


def family_collision_rate(in_len: int, out_len: int, x, y) -> Fraction:
    """Exact collision fraction of two inputs over all Toeplitz seeds.

    Enumerates every one of the 2^(in_len + out_len - 1) seeds and
    returns the exact fraction with f(x) = f(y); for this family the
    answer is 2^(-out_len) for every distinct pair, which is also the
    family's delta.  Restricted to in_len <= 10, out_len <= 6; use
    :func:`sampled_collision_rate` beyond that.
    """
    if not (1 <= out_len <= in_len and in_len <= 10 and out_len <= 6):
        raise ValueError("exhaustive enumeration is limited to in_len <= 10, out_len <= 6")
    xa = _bits_array(x, in_len)
    ya = _bits_array(y, in_len)
    x_int, y_int = _pack_lsb(xa), _pack_lsb(ya)
    if x_int == y_int:
        raise ValueError("inputs must differ")
    n_seeds = 1 << (in_len + out_len - 1)
    hits = 0
    for s in range(n_seeds):
        if _toeplitz_hash_int(s, x_int, in_len, out_len) == \
                _toeplitz_hash_int(s, y_int, in_len, out_len):
            hits += 1
    return Fraction(hits, n_seeds)


def sampled_collision_rate(in_len: int, out_len: int, x, y, trials: int,
                           rng_seed: int = 0) -> dict:
    """Monte-Carlo collision estimate with a Wilson 95% interval."""
    xa = _bits_array(x, in_len)
    ya = _bits_array(y, in_len)
    x_int, y_int = _pack_lsb(xa), _pack_lsb(ya)
    if x_int == y_int:
        raise ValueError("inputs must differ")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    n_seed_bits = in_len + out_len - 1
    hits = 0
    for _ in range(trials):
        s = _pack_lsb(rng.integers(0, 2, size=n_seed_bits).astype(np.uint8))
        if _toeplitz_hash_int(s, x_int, in_len, out_len) == \
                _toeplitz_hash_int(s, y_int, in_len, out_len):
            hits += 1
    low, high = wilson_interval(hits, trials)
    return {"estimate": hits / trials, "wilson_low": low, "wilson_high": high,
            "trials": trials}


# ----------------------------------------------------------------------
# Key-layout accounting
# ----------------------------------------------------------------------

def shrinkage_report(code: LinearCodeSpec) -> dict:
    """Candidate-space accounting when the key itself is the codeword.

    Treats an n-bit key as a noisy word of the code: after correction
    every key lands on a codeword, so the candidate space collapses from
    2^n to 2^k.  Counted exhaustively (n <= 20), including a check that
    decoding each of the 2^n words really lands in the codeword set.
    """
    if code.n > 20:
        raise ValueError("exhaustive shrinkage count capped at n <= 20")
    codeword_ints = set()
    for w in code.codewords():
        codeword_ints.add(_bits_to_int(w))
    decoded_in_set = True
    for v in range(1 << code.n):
        word = _int_to_bits(v, code.n)
        pattern = decode_by_syndrome(code, syndrome(code, word))
        if pattern is None:
            decoded_in_set = False
            break
        corrected = word ^ pattern
        if _bits_to_int(corrected) not in codeword_ints:
            decoded_in_set = False
            break
    return {
        "layout": "key_as_codeword",
        "key_bits": code.n,
        "candidates_before": 1 << code.n,
        "candidates_after": len(codeword_ints),
        "collapse_factor": (1 << code.n) // len(codeword_ints),
        "decoding_lands_on_codewords": decoded_in_set,
    }


def extension_report(code: LinearCodeSpec) -> dict:
    """Candidate-space accounting for the appended-parity layout.

    The k-bit key keeps its full 2^k candidate space: the systematic
    encoder appends n-k parity digits, and distinct keys stay distinct
    (checked exhaustively for k <= 10 by encoding every key).
    """
    if code.k > 10:
        raise ValueError("exhaustive extension check capped at k <= 10")
    seen = set()
    for v in range(1 << code.k):
        word = encode(code, _int_to_bits(v, code.k))
        assert _bits_to_int(word[:code.k]) == v  # systematic: info part untouched
        seen.add(_bits_to_int(word))
    return {
        "layout": "key_plus_parity",
        "key_bits": code.k,
        "candidates_before": 1 << code.k,
        "candidates_after": len(seen),
        "collapse_factor": (1 << code.k) // len(seen),
        "transmitted_parity_bits": code.redundancy,
    }
