r"""Small-dimension classical-quantum states and distinguishability.

A distributed key pair with adversary side information is modeled as a
classical-quantum (cq) ensemble: a joint distribution over key pairs
(k_A, k_B) with one adversary density matrix per pair.  Such states are
block diagonal in the key registers, so they are stored that way - one
(probability, density matrix) block per key pair - instead of as dense
2^(2|K|) * d matrices.  A dense materialization path exists for tiny
key lengths as a cross-check oracle.

The module provides trace distance, the agreement measurement operator
built from a POVM (one element per key value, supported on the agreeing
key-pair blocks), the induced guessing probability, and a brute-force
guessing optimum for commuting (simultaneously diagonal) ensembles.

Note on the agreement operator: with general POVM elements it is not a
projection, only an operator between 0 and the identity - which is all
the distinguishability inequality tr[G(rho - tau)] <= TD(rho, tau)
requires.
"""

from __future__ import annotations

from typing import Dict, Mapping, Tuple

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
PROB_SUM_TOL = 1e-12


def _as_complex_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix, got shape %r" % (a.shape,))
    return a


def _check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if np.max(np.abs(a - a.conj().T)) > tol:
        raise ValueError("matrix is not Hermitian within %g" % tol)


class DensityMatrix:
    """A dim x dim Hermitian, trace-1, positive-semidefinite matrix.

    Validation tolerances: Hermitian within 1e-10 entrywise, trace 1
    within 1e-10, eigenvalues >= -1e-9 (randomized test states produced
    by A A^dagger / tr normalization stay well inside this).
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        a = _as_complex_matrix(matrix)
        _check_hermitian(a)
        tr = np.trace(a).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError("trace is %r, expected 1" % tr)
        if np.min(np.linalg.eigvalsh(a)) < -PSD_TOL:
            raise ValueError("matrix is not positive semidefinite within %g" % PSD_TOL)
        self.matrix = a

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    @classmethod
    def diagonal(cls, probs) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probs, dtype=complex)))

    @classmethod
    def pure(cls, amplitudes) -> "DensityMatrix":
        v = np.asarray(amplitudes, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return np.max(np.abs(off)) <= tol


class CqState:
    """Block-diagonal classical-quantum state over key pairs.

    ``entries`` maps (k_A, k_B) bitstring pairs to (probability,
    adversary state).  Probabilities sum to 1 within 1e-12 and every
    adversary state shares one dimension.
    """

    def __init__(self, key_bits_a: int, key_bits_b: int,
                 entries: Mapping[Tuple[str, str], Tuple[float, DensityMatrix]]):
        if key_bits_a < 1 or key_bits_b < 1:
            raise ValueError("key lengths must be >= 1")
        entries = dict(entries)
        if not entries:
            raise ValueError("cq state needs at least one block")
        dims = set()
        total = 0.0
        for (ka, kb), (p, rho) in entries.items():
            if len(ka) != key_bits_a or len(kb) != key_bits_b:
                raise ValueError("label (%r, %r) does not match key lengths" % (ka, kb))
            if set(ka) - {"0", "1"} or set(kb) - {"0", "1"}:
                raise ValueError("labels must be bitstrings")
            if p < 0:
                raise ValueError("negative probability for block (%r, %r)" % (ka, kb))
            dims.add(rho.dim)
            total += p
        if len(dims) != 1:
            raise ValueError("adversary states have mixed dimensions: %r" % sorted(dims))
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError("block probabilities sum to %r, expected 1" % total)
        self.key_bits_a = key_bits_a
        self.key_bits_b = key_bits_b
        self.entries: Dict[Tuple[str, str], Tuple[float, DensityMatrix]] = entries
        self.eve_dim = dims.pop()

    def agreed_labels(self):
        return sorted(ka for (ka, kb) in self.entries if ka == kb)


def key_labels(key_bits: int):
    return [format(v, "0%db" % key_bits) for v in range(2 ** key_bits)]


class Povm:
    """Measurement with one labeled element per key guess.

    Elements must be positive semidefinite within 1e-9 and sum to the
    identity within 1e-9 entrywise.
    """

    def __init__(self, elements: Mapping[str, np.ndarray]):
        elements = {label: _as_complex_matrix(m) for label, m in elements.items()}
        if not elements:
            raise ValueError("POVM needs at least one element")
        dims = {m.shape[0] for m in elements.values()}
        if len(dims) != 1:
            raise ValueError("POVM elements have mixed dimensions")
        dim = dims.pop()
        total = np.zeros((dim, dim), dtype=complex)
        for label, m in elements.items():
            _check_hermitian(m, PSD_TOL)
            if np.min(np.linalg.eigvalsh(m)) < -PSD_TOL:
                raise ValueError("POVM element %r is not PSD within %g" % (label, PSD_TOL))
            total += m
        if np.max(np.abs(total - np.eye(dim))) > PSD_TOL:
            raise ValueError("POVM elements do not sum to the identity within %g" % PSD_TOL)
        self.elements = elements
        self.dim = dim


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of (rho - sigma) for two trace-1 Hermitian matrices.

    Symmetric, satisfies the triangle inequality, and equals the maximal
    distinguishing advantage of any measurement.
    """
    a = rho.matrix if isinstance(rho, DensityMatrix) else _as_complex_matrix(rho)
    b = sigma.matrix if isinstance(sigma, DensityMatrix) else _as_complex_matrix(sigma)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch: %r vs %r" % (a.shape, b.shape))
    _check_hermitian(a)
    _check_hermitian(b)
    for name, m in (("rho", a), ("sigma", b)):
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise ValueError("%s must have trace 1" % name)
    return 0.5 * _trace_norm(a - b)


def _trace_norm(h: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(h))))


def build_real_state(joint: Mapping[Tuple[str, str], float],
                     eve_states: Mapping[Tuple[str, str], DensityMatrix]) -> CqState:
    """Assemble the distributed cq state from a key-pair distribution.

    Every support point of ``joint`` must come with an adversary state.
    """
    entries = {}
    lens_a = set()
    lens_b = set()
    for pair, p in joint.items():
        if pair not in eve_states:
            raise ValueError("missing adversary state for key pair %r" % (pair,))
        lens_a.add(len(pair[0]))
        lens_b.add(len(pair[1]))
        entries[pair] = (p, eve_states[pair])
    if len(lens_a) != 1 or len(lens_b) != 1:
        raise ValueError("inconsistent key label lengths")
    return CqState(lens_a.pop(), lens_b.pop(), entries)


def build_ideal_state(key_bits: int, tau_e: DensityMatrix) -> CqState:
    """Uniform agreed-key state with the adversary decoupled.

    Each of the 2^key_bits agreeing pairs (k, k) carries probability
    2^(-key_bits) and the same adversary state ``tau_e``.
    """
    p = 2.0 ** (-key_bits)
    entries = {(k, k): (p, tau_e) for k in key_labels(key_bits)}
    return CqState(key_bits, key_bits, entries)


def cq_trace_distance(real: CqState, ideal: CqState) -> float:
    """Trace distance between two cq states, block by block.

    Because both states are block diagonal in the key registers, the
    trace norm decomposes as a sum over key pairs of the trace norm of
    p1*rho1 - p2*rho2 (a missing block contributes its partner's full
    weight).  Agrees with :func:`trace_distance` on the dense
    materializations; see :func:`to_dense`.
    """
    if (real.key_bits_a, real.key_bits_b) != (ideal.key_bits_a, ideal.key_bits_b):
        raise ValueError("key-register shapes differ")
    if real.eve_dim != ideal.eve_dim:
        raise ValueError("adversary dimensions differ")
    d = real.eve_dim
    zero = np.zeros((d, d), dtype=complex)
    total = 0.0
    for pair in set(real.entries) | set(ideal.entries):
        p1, r1 = real.entries.get(pair, (0.0, None))
        p2, r2 = ideal.entries.get(pair, (0.0, None))
        block = (p1 * r1.matrix if r1 is not None else zero) \
            - (p2 * r2.matrix if r2 is not None else zero)
        total += _trace_norm(block)
    return 0.5 * total


def guessing_probability(state: CqState, povm: Povm) -> float:
    """Probability that measuring the adversary state yields the agreed key.

    Sums p(k, k) * tr[M_k rho_E(k, k)] over agreeing blocks; this equals
    the overlap of the state with the agreement operator built from the
    POVM.  It never exceeds the optimum over all measurements.
    """
    if povm.dim != state.eve_dim:
        raise ValueError("POVM dimension %d does not match adversary dimension %d"
                         % (povm.dim, state.eve_dim))
    total = 0.0
    for (ka, kb), (p, rho) in state.entries.items():
        if ka != kb or p == 0.0:
            continue
        if ka not in povm.elements:
            raise ValueError("POVM has no element for key value %r" % ka)
        total += p * float(np.trace(povm.elements[ka] @ rho.matrix).real)
    return total


def optimal_guess_classical(state: CqState) -> float:
    """Exact guessing optimum when all adversary states commute.

    Requires every block state to be diagonal; then the best measurement
    reads the diagonal slot e and outputs the key maximizing
    p(k, k) * rho(k, k)[e, e], giving sum_e max_k of that weight.
    """
    for pair, (p, rho) in state.entries.items():
        if not rho.is_diagonal():
            raise ValueError("adversary state for %r is not diagonal; the exact "
                             "optimum is only computed for commuting ensembles" % (pair,))
    total = 0.0
    for e in range(state.eve_dim):
        best = 0.0
        for (ka, kb), (p, rho) in state.entries.items():
            if ka != kb:
                continue
            w = p * rho.matrix[e, e].real
            if w > best:
                best = w
        total += best
    return total


def argmax_measurement(state: CqState) -> Povm:
    """The diagonal POVM attaining :func:`optimal_guess_classical`.

    Each diagonal slot is assigned to the key with the largest agreed
    weight there (ties to the lexicographically smallest label, slots
    with no agreed weight to the all-zero label).
    """
    labels = key_labels(state.key_bits_a)
    d = state.eve_dim
    assign = []
    for e in range(d):
        best_label = labels[0]
        best_w = -1.0
        for ka in labels:
            p, rho = state.entries.get((ka, ka), (0.0, None))
            w = p * rho.matrix[e, e].real if rho is not None else 0.0
            if w > best_w:
                best_w = w
                best_label = ka
        assign.append(best_label)
    elements = {}
    for ka in labels:
        m = np.zeros((d, d), dtype=complex)
        for e, winner in enumerate(assign):
            if winner == ka:
                m[e, e] = 1.0
        elements[ka] = m
    return Povm(elements)


def kpa_reduce(state: CqState, known_prefix_bits: int) -> CqState:
    """Discard a known key prefix, leaving the state on the unknown part.

    Models an adversary who has learned the first ``known_prefix_bits``
    bits of both keys (e.g. through known plaintext): the prefix
    registers are traced out, so blocks whose suffixes coincide merge
    with probability-weighted adversary states.
    """
    if state.key_bits_a != state.key_bits_b:
        raise ValueError("prefix reduction expects equal key lengths")
    if not 0 <= known_prefix_bits < state.key_bits_a:
        raise ValueError("known_prefix_bits must lie in [0, %d)" % state.key_bits_a)
    if known_prefix_bits == 0:
        return state
    cut = known_prefix_bits
    merged: Dict[Tuple[str, str], Tuple[float, np.ndarray]] = {}
    for (ka, kb), (p, rho) in state.entries.items():
        if p == 0.0:
            continue
        pair = (ka[cut:], kb[cut:])
        acc_p, acc_m = merged.get(pair, (0.0, np.zeros((state.eve_dim,) * 2, dtype=complex)))
        merged[pair] = (acc_p + p, acc_m + p * rho.matrix)
    entries = {pair: (p, DensityMatrix(m / p)) for pair, (p, m) in merged.items()}
    return CqState(state.key_bits_a - cut, state.key_bits_b - cut, entries)


def to_dense(state: CqState) -> np.ndarray:
    """Materialize the full block-diagonal matrix (cross-check oracle).

    Basis order: |k_A> |k_B> |e> with bitstrings read as binary numbers.
    Intended for key lengths <= 2; the dimension grows as
    2^(k_A + k_B) * eve_dim.
    """
    na, nb, d = 2 ** state.key_bits_a, 2 ** state.key_bits_b, state.eve_dim
    full = np.zeros((na * nb * d, na * nb * d), dtype=complex)
    for (ka, kb), (p, rho) in state.entries.items():
        base = (int(ka, 2) * nb + int(kb, 2)) * d
        full[base:base + d, base:base + d] = p * rho.matrix
    return full


# ----------------------------------------------------------------------
# Seeded random instances for property testing
# ----------------------------------------------------------------------

def random_density_matrix(rng: np.random.Generator, dim: int) -> DensityMatrix:
    """A A^dagger / tr(A A^dagger) for a complex Gaussian A; full rank a.s."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = a @ a.conj().T
    return DensityMatrix(h / np.trace(h).real)


def random_cq_state(rng: np.random.Generator, key_bits: int, eve_dim: int,
                    diagonal_only: bool = False) -> CqState:
    """Random cq state over all key pairs with exponential weights."""
    labels = key_labels(key_bits)
    pairs = [(a, b) for a in labels for b in labels]
    weights = rng.exponential(size=len(pairs))
    weights /= weights.sum()
    entries = {}
    for pair, w in zip(pairs, weights):
        if diagonal_only:
            probs = rng.exponential(size=eve_dim)
            rho = DensityMatrix.diagonal(probs / probs.sum())
        else:
            rho = random_density_matrix(rng, eve_dim)
        entries[pair] = (float(w), rho)
    return CqState(key_bits, key_bits, entries)


def random_povm(rng: np.random.Generator, key_bits: int, dim: int) -> Povm:
    """Random POVM over the full key alphabet: S^(-1/2) E_k S^(-1/2)."""
    labels = key_labels(key_bits)
    raw = []
    for _ in labels:
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        raw.append(a @ a.conj().T)
    s = np.sum(raw, axis=0)
    vals, vecs = np.linalg.eigh(s)
    inv_sqrt = (vecs * (1.0 / np.sqrt(vals))) @ vecs.conj().T
    return Povm({label: inv_sqrt @ e @ inv_sqrt for label, e in zip(labels, raw)})
