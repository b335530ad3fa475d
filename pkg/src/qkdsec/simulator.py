r"""Deterministic seeded BB84 session engine with classical post-processing.

One session runs the standard steps: (1) the sender draws random bits
and encoding bases and transmits the matching states, (2) the receiver
measures in random bases, (3) both sift away positions with mismatched
bases, (4) a disclosed sample estimates the quantum bit error rate and
the session aborts above a threshold, (5) the sender's per-block
syndromes are exchanged (counted as hidden, consuming pre-shared key),
(6) the receiver decodes toward the sender's key, and (7) a Toeplitz
hash compresses the verified key.  A key-verification step (short
Toeplitz hash comparison with failure probability 2^(-verify_hash_bits))
sits between correction and compression; it is an addition beyond the
classical seven steps, needed so that a completed session provably
holds equal keys.

Qubits are tracked at the level BB84 needs - basis, bit, and the
measurement rule "same basis reproduces the bit, different basis gives
a fair coin" - so intercept-resend attacks are exact combinatorics.
Genuine density-matrix math lives in :mod:`qkdsec.qstate`.

Randomness: one 64-bit seed feeds a ``numpy`` ``SeedSequence`` that is
split into five named substreams, in order: sender, receiver,
eavesdropper, channel, and public coins (sampling positions,
verification seed, hash seed).  Identical configs therefore produce
bit-identical transcripts, and the roles' draws never interleave.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import rates as _rates
from .numerics import Log2Value, wilson_interval
from .postproc import (
    LinearCodeSpec,
    ToeplitzSeed,
    decode_by_syndrome,
    hamming_code,
    syndrome,
    toeplitz_hash,
)

TRANSCRIPT_SCHEMA_VERSION = 1

STATUS_COMPLETED = "completed"
STATUS_ABORTED_QBER = "aborted_qber"
STATUS_VERIFICATION_FAILED = "verification_failed"

LEAK_MODELS = ("conventional", "yuen")


@dataclass
class ProtocolConfig:
    """Parameters of one simulated session.

    channel_flip_prob is the physical bit-flip probability applied to
    the state arriving at the receiver (after any interception);
    eve_intercept_fraction is the per-pulse probability that the
    eavesdropper measures in a random basis and resends her outcome.
    sample_fraction of the sifted bits is disclosed for error
    estimation and excluded from the key; abort_qber is the estimate
    above which the session aborts.  pa_out_len may be a fixed output
    length or "auto" (finite-key length from :mod:`qkdsec.rates` at the
    estimated error rate, with the configured leakage model).
    """

    n_pulses: int
    channel_flip_prob: float = 0.0
    eve_intercept_fraction: float = 0.0
    sample_fraction: float = 0.25
    abort_qber: float = 0.11
    code: LinearCodeSpec = field(default_factory=lambda: hamming_code(3))
    leak_model: str = "conventional"
    xi: float = 1.1
    pa_out_len: "int | str" = "auto"
    verify_hash_bits: int = 32
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be >= 1")
        if not 0.0 <= self.channel_flip_prob <= 0.5:
            raise ValueError("channel_flip_prob must lie in [0, 0.5]")
        if not 0.0 <= self.eve_intercept_fraction <= 1.0:
            raise ValueError("eve_intercept_fraction must lie in [0, 1]")
        if not 0.0 < self.sample_fraction < 1.0:
            raise ValueError("sample_fraction must lie in (0, 1)")
        if self.abort_qber < 0.0:
            raise ValueError("abort_qber must be >= 0")
        if self.leak_model not in LEAK_MODELS:
            raise ValueError("leak_model must be one of %r" % (LEAK_MODELS,))
        if not 1.0 <= self.xi <= 2.0:
            raise ValueError("xi must lie in [1, 2]")
        if self.pa_out_len != "auto":
            if not isinstance(self.pa_out_len, int) or self.pa_out_len < 1:
                raise ValueError("pa_out_len must be 'auto' or a positive integer")
        if self.verify_hash_bits < 1:
            raise ValueError("verify_hash_bits must be >= 1")


@dataclass
class SessionTranscript:
    """Full record of one session; see ``to_json`` for the file schema."""

    schema_version: int
    status: str
    alice_bits: str
    alice_bases: str
    eve_intercept_mask: str
    eve_bases: str
    eve_outcomes: str
    bob_bases: str
    bob_bits: str
    sift_mask: str
    sifted_len: int
    disclosed_positions: list  # indices into the sifted sequence
    disclosed_alice: str
    disclosed_bob: str
    estimated_q: float
    kept_pulse_indices: list  # pulse index of every reconciled key bit
    discarded_tail_bits: int
    syndromes_exchanged: int
    leak_bits_consumed: int
    decode_failures: int
    corrected_key_alice: str
    corrected_key_bob: str
    verify_seed: Optional[ToeplitzSeed]
    pa_seed: Optional[ToeplitzSeed]
    final_key_alice: str
    final_key_bob: str

    def to_json(self) -> str:
        doc = dataclasses.asdict(self)
        for key in ("verify_seed", "pa_seed"):
            seed = getattr(self, key)
            if seed is not None:
                doc[key] = {"in_len": seed.in_len, "out_len": seed.out_len,
                            "seed_bits": "".join(str(b) for b in seed.seed_bits)}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SessionTranscript":
        doc = json.loads(text)
        for key in ("verify_seed", "pa_seed"):
            if doc.get(key) is not None:
                s = doc[key]
                doc[key] = ToeplitzSeed(s["in_len"], s["out_len"],
                                        tuple(int(c) for c in s["seed_bits"]))
        return cls(**doc)


def _bits_str(a: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in a)


def _str_bits(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")


def sift(alice_bases, bob_bases) -> np.ndarray:
    """Boolean mask selecting exactly the positions with equal bases."""
    a = np.asarray(alice_bases, dtype=np.uint8)
    b = np.asarray(bob_bases, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValueError("basis strings differ in length")
    return a == b


def estimate_qber(alice_sample, bob_sample) -> float:
    """Fraction of disagreeing positions in the disclosed sample."""
    a = np.asarray(alice_sample, dtype=np.uint8)
    b = np.asarray(bob_sample, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValueError("samples differ in length")
    if a.size == 0:
        raise ValueError("empty sample")
    return float(np.count_nonzero(a != b)) / a.size


def _auto_pa_len(config: ProtocolConfig, reconciled_len: int, q: float) -> int:
    params = _rates.RateModelParams(
        sifted_len=reconciled_len,
        eps_pe=Log2Value(-52), eps_ec=Log2Value(-52), eps_pa=Log2Value(-52),
        leak_model=config.leak_model, xi=config.xi)
    return _rates.secure_key_length(params, q)


def run_session(config: ProtocolConfig) -> SessionTranscript:
    """Execute one full session; deterministic given ``config.rng_seed``."""
    streams = np.random.SeedSequence(config.rng_seed).spawn(5)
    rng_alice = np.random.default_rng(streams[0])
    rng_bob = np.random.default_rng(streams[1])
    rng_eve = np.random.default_rng(streams[2])
    rng_channel = np.random.default_rng(streams[3])
    rng_public = np.random.default_rng(streams[4])

    n = config.n_pulses
    alice_bits = rng_alice.integers(0, 2, size=n, dtype=np.uint8)
    alice_bases = rng_alice.integers(0, 2, size=n, dtype=np.uint8)
    bob_bases = rng_bob.integers(0, 2, size=n, dtype=np.uint8)
    bob_coins = rng_bob.integers(0, 2, size=n, dtype=np.uint8)

    intercept = rng_eve.random(n) < config.eve_intercept_fraction
    eve_bases = rng_eve.integers(0, 2, size=n, dtype=np.uint8)
    eve_coins = rng_eve.integers(0, 2, size=n, dtype=np.uint8)
    # Measuring in the sender's basis reproduces the bit; otherwise fair coin.
    eve_outcomes = np.where(eve_bases == alice_bases, alice_bits, eve_coins)

    flips = (rng_channel.random(n) < config.channel_flip_prob).astype(np.uint8)
    incoming_bases = np.where(intercept, eve_bases, alice_bases)
    incoming_bits = np.where(intercept, eve_outcomes, alice_bits) ^ flips
    bob_bits = np.where(bob_bases == incoming_bases, incoming_bits, bob_coins).astype(np.uint8)

    mask = sift(alice_bases, bob_bases)
    sift_indices = np.nonzero(mask)[0]
    sifted_alice = alice_bits[sift_indices]
    sifted_bob = bob_bits[sift_indices]
    sifted_len = int(sift_indices.size)

    base = dict(
        schema_version=TRANSCRIPT_SCHEMA_VERSION,
        alice_bits=_bits_str(alice_bits),
        alice_bases=_bits_str(alice_bases),
        eve_intercept_mask=_bits_str(intercept),
        eve_bases=_bits_str(eve_bases),
        eve_outcomes=_bits_str(eve_outcomes),
        bob_bases=_bits_str(bob_bases),
        bob_bits=_bits_str(bob_bits),
        sift_mask=_bits_str(mask),
        sifted_len=sifted_len,
        disclosed_positions=[], disclosed_alice="", disclosed_bob="",
        estimated_q=0.0,
        kept_pulse_indices=[], discarded_tail_bits=0,
        syndromes_exchanged=0, leak_bits_consumed=0, decode_failures=0,
        corrected_key_alice="", corrected_key_bob="",
        verify_seed=None, pa_seed=None,
        final_key_alice="", final_key_bob="",
    )

    if sifted_len == 0:
        return SessionTranscript(status=STATUS_COMPLETED, **base)

    n_sample = max(1, int(round(config.sample_fraction * sifted_len)))
    n_sample = min(n_sample, sifted_len)
    disclosed = np.sort(rng_public.choice(sifted_len, size=n_sample, replace=False))
    q_hat = estimate_qber(sifted_alice[disclosed], sifted_bob[disclosed])
    base.update(
        disclosed_positions=[int(i) for i in disclosed],
        disclosed_alice=_bits_str(sifted_alice[disclosed]),
        disclosed_bob=_bits_str(sifted_bob[disclosed]),
        estimated_q=q_hat,
    )
    if q_hat > config.abort_qber:
        return SessionTranscript(status=STATUS_ABORTED_QBER, **base)

    keep = np.setdiff1d(np.arange(sifted_len), disclosed)
    code = config.code
    n_blocks = keep.size // code.n
    kept = keep[:n_blocks * code.n]
    base.update(
        kept_pulse_indices=[int(sift_indices[i]) for i in kept],
        discarded_tail_bits=int(keep.size - kept.size),
        syndromes_exchanged=n_blocks * code.redundancy,
        leak_bits_consumed=n_blocks * code.redundancy,
    )

    key_alice = sifted_alice[kept].copy()
    key_bob = sifted_bob[kept].copy()
    decode_failures = 0
    for b in range(n_blocks):
        sl = slice(b * code.n, (b + 1) * code.n)
        diff = syndrome(code, key_alice[sl]) ^ syndrome(code, key_bob[sl])
        pattern = decode_by_syndrome(code, diff)
        if pattern is None:
            decode_failures += 1
            continue
        key_bob[sl] ^= pattern
    base.update(
        decode_failures=decode_failures,
        corrected_key_alice=_bits_str(key_alice),
        corrected_key_bob=_bits_str(key_bob),
    )

    if key_alice.size == 0:
        return SessionTranscript(status=STATUS_COMPLETED, **base)

    verify_out = min(config.verify_hash_bits, int(key_alice.size))
    verify_seed = ToeplitzSeed.random(rng_public, int(key_alice.size), verify_out)
    base.update(verify_seed=verify_seed)
    tag_a = toeplitz_hash(verify_seed, key_alice)
    tag_b = toeplitz_hash(verify_seed, key_bob)
    if not np.array_equal(tag_a, tag_b):
        return SessionTranscript(status=STATUS_VERIFICATION_FAILED, **base)

    if config.pa_out_len == "auto":
        out_len = _auto_pa_len(config, int(key_alice.size), q_hat)
    else:
        out_len = int(config.pa_out_len)
    out_len = min(out_len, int(key_alice.size))
    if out_len >= 1:
        pa_seed = ToeplitzSeed.random(rng_public, int(key_alice.size), out_len)
        base.update(
            pa_seed=pa_seed,
            final_key_alice=_bits_str(toeplitz_hash(pa_seed, key_alice)),
            final_key_bob=_bits_str(toeplitz_hash(pa_seed, key_bob)),
        )
    return SessionTranscript(status=STATUS_COMPLETED, **base)


def _trial_seed(base_seed: int, trial: int) -> int:
    words = np.random.SeedSequence([base_seed, trial]).generate_state(2, dtype=np.uint32)
    return int(words[0]) | (int(words[1]) << 32)


def eve_best_guess(transcript: SessionTranscript) -> np.ndarray:
    """Eavesdropper's maximum-likelihood guess of the reconciled key.

    Her record: interception mask, her bases and outcomes, plus the
    public basis announcements and kept-position bookkeeping.  A bit is
    known exactly when she intercepted it and her basis matched the
    announced one; every other bit is uniform, so completing with zeros
    is one of the equally likely maximum-likelihood choices.  The
    encrypted syndrome stays hidden and contributes nothing.
    """
    intercept = _str_bits(transcript.eve_intercept_mask)
    eve_bases = _str_bits(transcript.eve_bases)
    eve_outcomes = _str_bits(transcript.eve_outcomes)
    alice_bases = _str_bits(transcript.alice_bases)
    guess = np.zeros(len(transcript.kept_pulse_indices), dtype=np.uint8)
    for j, pulse in enumerate(transcript.kept_pulse_indices):
        if intercept[pulse] and eve_bases[pulse] == alice_bases[pulse]:
            guess[j] = eve_outcomes[pulse]
    return guess


def empirical_eve_guess_rate(config: ProtocolConfig, trials: int,
                             eve_strategy: str = "intercept_resend_then_best_guess") -> dict:
    """Monte-Carlo success rate of the eavesdropper against the final key.

    Runs ``trials`` independent sessions (per-trial seeds derived from
    ``config.rng_seed``).  In each completed session the eavesdropper
    forms her maximum-likelihood guess of the reconciled key from her
    intercept record and pushes it through the announced hash; the
    returned rate is the fraction of completed sessions whose final key
    she hit, with a Wilson 95% interval.  Sessions that abort, fail
    verification, or produce an empty final key are counted separately
    and excluded from the rate.

    Requires final keys of at most 16 bits so the per-trial guess is an
    exact maximum-likelihood computation.
    """
    if eve_strategy != "intercept_resend_then_best_guess":
        raise ValueError("unknown eavesdropper strategy %r" % eve_strategy)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    completed = 0
    aborted = 0
    failed = 0
    empty = 0
    hits = 0
    pre_pa_hits = 0
    key_lens = set()
    for t in range(trials):
        cfg = dataclasses.replace(config, rng_seed=_trial_seed(config.rng_seed, t))
        tr = run_session(cfg)
        if tr.status == STATUS_ABORTED_QBER:
            aborted += 1
            continue
        if tr.status == STATUS_VERIFICATION_FAILED:
            failed += 1
            continue
        if not tr.final_key_alice:
            empty += 1
            continue
        if len(tr.final_key_alice) > 16:
            raise ValueError(
                "final key of %d bits exceeds the exact-inference limit of 16"
                % len(tr.final_key_alice))
        completed += 1
        key_lens.add(len(tr.final_key_alice))
        guess = eve_best_guess(tr)
        if _bits_str(guess) == tr.corrected_key_alice:
            pre_pa_hits += 1
        if _bits_str(toeplitz_hash(tr.pa_seed, guess)) == tr.final_key_alice:
            hits += 1
    if completed == 0:
        raise ValueError("no completed sessions among %d trials" % trials)
    low, high = wilson_interval(hits, completed)
    return {
        "trials": trials,
        "completed": completed,
        "aborted": aborted,
        "verification_failed": failed,
        "empty_key": empty,
        "success_rate": hits / completed,
        "wilson_low": low,
        "wilson_high": high,
        "pre_pa_rate": pre_pa_hits / completed,
        "final_key_bits": sorted(key_lens),
    }
