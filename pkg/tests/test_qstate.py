import numpy as np
import pytest

from qkdsec.qstate import (
    CqState,
    DensityMatrix,
    Povm,
    argmax_measurement,
    build_ideal_state,
    build_real_state,
    cq_trace_distance,
    guessing_probability,
    kpa_reduce,
    key_labels,
    optimal_guess_classical,
    random_cq_state,
    random_density_matrix,
    random_povm,
    to_dense,
    trace_distance,
)


def distinguishable_bit_state():
    """Uniform 1-bit agreed keys with perfectly distinguishable side states."""
    rho0 = DensityMatrix(np.diag([1.0, 0.0]))
    rho1 = DensityMatrix(np.diag([0.0, 1.0]))
    return build_real_state(
        {("0", "0"): 0.5, ("1", "1"): 0.5},
        {("0", "0"): rho0, ("1", "1"): rho1},
    )


def projective_bit_povm():
    return Povm({"0": np.diag([1.0, 0.0]).astype(complex),
                 "1": np.diag([0.0, 1.0]).astype(complex)})


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]]))

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.diag([0.7, 0.7]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="semidefinite"):
            DensityMatrix(np.diag([1.5, -0.5]))

    def test_constructors(self):
        assert DensityMatrix.maximally_mixed(4).dim == 4
        assert DensityMatrix.pure([1, 1]).matrix[0, 1] == pytest.approx(0.5)
        assert DensityMatrix.diagonal([0.3, 0.7]).is_diagonal()


class TestTraceDistance:
    def test_identical_states(self):
        rho = DensityMatrix.maximally_mixed(3)
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        a = DensityMatrix.pure([1, 0])
        b = DensityMatrix.pure([0, 1])
        assert trace_distance(a, b) == pytest.approx(1.0)

    def test_diagonal_case(self):
        a = DensityMatrix.diagonal([0.7, 0.3])
        b = DensityMatrix.diagonal([0.5, 0.5])
        assert trace_distance(a, b) == pytest.approx(0.2)

    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(5)
        a, b, c = (random_density_matrix(rng, 3) for _ in range(3))
        assert trace_distance(a, b) == pytest.approx(trace_distance(b, a))
        assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            trace_distance(DensityMatrix.maximally_mixed(2),
                           DensityMatrix.maximally_mixed(3))


class TestStateConstruction:
    def test_single_block(self):
        rho = DensityMatrix.maximally_mixed(2)
        state = build_real_state({("0", "1"): 1.0}, {("0", "1"): rho})
        assert state.entries[("0", "1")][0] == 1.0
        assert state.eve_dim == 2

    def test_missing_adversary_state(self):
        with pytest.raises(ValueError, match="missing"):
            build_real_state({("0", "0"): 1.0}, {})

    def test_ideal_state_blocks(self):
        tau = DensityMatrix.maximally_mixed(2)
        ideal = build_ideal_state(2, tau)
        assert len(ideal.entries) == 4
        for (ka, kb), (p, rho) in ideal.entries.items():
            assert ka == kb and p == 0.25 and rho is tau

    def test_probabilities_must_sum_to_one(self):
        rho = DensityMatrix.maximally_mixed(2)
        with pytest.raises(ValueError, match="sum"):
            CqState(1, 1, {("0", "0"): (0.6, rho), ("1", "1"): (0.5, rho)})


class TestCqTraceDistance:
    def test_reflexive(self):
        ideal = build_ideal_state(2, DensityMatrix.maximally_mixed(2))
        assert cq_trace_distance(ideal, ideal) == 0.0

    def test_distinguishable_witness(self):
        real = distinguishable_bit_state()
        ideal = build_ideal_state(1, DensityMatrix.maximally_mixed(2))
        assert cq_trace_distance(real, ideal) == pytest.approx(0.5, abs=1e-12)

    def test_decoupled_adversary_is_ideal(self):
        tau = DensityMatrix.diagonal([0.25, 0.75])
        real = build_real_state(
            {("0", "0"): 0.5, ("1", "1"): 0.5},
            {("0", "0"): tau, ("1", "1"): tau})
        ideal = build_ideal_state(1, tau)
        assert cq_trace_distance(real, ideal) == pytest.approx(0.0, abs=1e-12)

    def test_matches_dense_oracle(self):
        # block decomposition vs the materialized block-diagonal matrices
        rng = np.random.default_rng(123)
        for key_bits in (1, 2):
            for dim in (2, 3):
                real = random_cq_state(rng, key_bits, dim)
                ideal = build_ideal_state(key_bits, random_density_matrix(rng, dim))
                blockwise = cq_trace_distance(real, ideal)
                diff = to_dense(real) - to_dense(ideal)
                dense = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
                assert blockwise == pytest.approx(dense, abs=1e-10)

    def test_shape_mismatch(self):
        a = build_ideal_state(1, DensityMatrix.maximally_mixed(2))
        b = build_ideal_state(2, DensityMatrix.maximally_mixed(2))
        with pytest.raises(ValueError):
            cq_trace_distance(a, b)


class TestGuessingProbability:
    def test_trivial_single_outcome(self):
        rho = DensityMatrix.maximally_mixed(2)
        state = CqState(1, 1, {("0", "0"): (1.0, rho)})
        povm = Povm({"0": np.eye(2, dtype=complex)})
        assert guessing_probability(state, povm) == pytest.approx(1.0)

    def test_saturates_distance_bound(self):
        real = distinguishable_bit_state()
        ideal = build_ideal_state(1, DensityMatrix.maximally_mixed(2))
        g = guessing_probability(real, projective_bit_povm())
        td = cq_trace_distance(real, ideal)
        assert g == pytest.approx(1.0, abs=1e-12)
        assert td == pytest.approx(0.5, abs=1e-12)
        assert g <= 2.0 ** -1 + td + 1e-12  # tight: 1 <= 1/2 + 1/2

    def test_random_guessing_povm(self):
        real = distinguishable_bit_state()
        half = (np.eye(2) / 2).astype(complex)
        blind = Povm({"0": half, "1": half})
        # linearity of the trace: half the agreement probability
        assert guessing_probability(real, blind) == pytest.approx(0.5)

    def test_label_coverage_enforced(self):
        real = distinguishable_bit_state()
        with pytest.raises(ValueError, match="no element"):
            guessing_probability(real, Povm({"0": np.eye(2, dtype=complex)}))


class TestOptimalGuessClassical:
    def test_distinguishable_is_certain(self):
        assert optimal_guess_classical(distinguishable_bit_state()) == pytest.approx(1.0)

    def test_identical_states_teach_nothing(self):
        tau = DensityMatrix.diagonal([0.5, 0.5])
        real = build_real_state(
            {("0", "0"): 0.7, ("1", "1"): 0.3},
            {("0", "0"): tau, ("1", "1"): tau})
        assert optimal_guess_classical(real) == pytest.approx(0.7)

    def test_one_of_two_bits_leaked(self):
        # adversary reads the first key bit exactly: success 1/2
        entries = {}
        for k in key_labels(2):
            e = int(k[0])
            entries[(k, k)] = (0.25, DensityMatrix.diagonal(
                [1.0 if i == e else 0.0 for i in range(2)]))
        state = CqState(2, 2, entries)
        assert optimal_guess_classical(state) == pytest.approx(0.5)

    def test_rejects_non_commuting(self):
        rho = DensityMatrix.pure([1, 1])
        state = CqState(1, 1, {("0", "0"): (1.0, rho)})
        with pytest.raises(ValueError, match="diagonal"):
            optimal_guess_classical(state)

    def test_upper_bounds_every_diagonal_povm(self):
        # supremum property, with equality at the argmax measurement
        rng = np.random.default_rng(77)
        for _ in range(25):
            key_bits = int(rng.integers(1, 3))
            dim = int(rng.integers(1, 5))
            state = random_cq_state(rng, key_bits, dim, diagonal_only=True)
            best = optimal_guess_classical(state)
            probs = rng.dirichlet(np.ones(2 ** key_bits), size=dim)
            povm = Povm({lab: np.diag(probs[:, i]).astype(complex)
                         for i, lab in enumerate(key_labels(key_bits))})
            assert guessing_probability(state, povm) <= best + 1e-12
            attained = guessing_probability(state, argmax_measurement(state))
            assert attained == pytest.approx(best, abs=1e-12)


class TestKpaReduce:
    def test_zero_prefix_is_identity(self):
        state = distinguishable_bit_state()
        assert kpa_reduce(state, 0) is state

    def test_independent_prefix_drops_cleanly(self):
        tau = DensityMatrix.maximally_mixed(2)
        reduced = kpa_reduce(build_ideal_state(2, tau), 1)
        assert reduced.key_bits_a == 1
        assert set(reduced.entries) == {("0", "0"), ("1", "1")}
        for _, (p, rho) in reduced.entries.items():
            assert p == pytest.approx(0.5)
            assert trace_distance(rho, tau) == pytest.approx(0.0, abs=1e-12)

    def test_leaked_prefix_decouples_after_discard(self):
        # adversary state encodes exactly the first bit; once that bit is
        # known and discarded, she is left with nothing: optimum falls to 1/2
        entries = {}
        for k in key_labels(2):
            e = int(k[0])
            entries[(k, k)] = (0.25, DensityMatrix.diagonal(
                [1.0 if i == e else 0.0 for i in range(2)]))
        state = CqState(2, 2, entries)
        assert optimal_guess_classical(state) == pytest.approx(0.5)
        reduced = kpa_reduce(state, 1)
        assert reduced.key_bits_a == 1
        half = DensityMatrix.maximally_mixed(2)
        for _, (p, rho) in reduced.entries.items():
            assert trace_distance(rho, half) == pytest.approx(0.0, abs=1e-12)
        assert optimal_guess_classical(reduced) == pytest.approx(0.5)

    def test_prefix_range(self):
        state = distinguishable_bit_state()
        with pytest.raises(ValueError):
            kpa_reduce(state, 1)  # would leave zero bits
        with pytest.raises(ValueError):
            kpa_reduce(state, -1)


class TestRandomInstances:
    def test_random_povm_is_valid(self):
        rng = np.random.default_rng(3)
        povm = random_povm(rng, 2, 3)
        assert len(povm.elements) == 4 and povm.dim == 3

    def test_random_state_is_valid(self):
        rng = np.random.default_rng(4)
        state = random_cq_state(rng, 3, 4)
        assert len(state.entries) == 64 and state.eve_dim == 4
