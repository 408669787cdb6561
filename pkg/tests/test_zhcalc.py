import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mczcut import zhcalc
from mczcut.zhcalc import (Diagram, Node, check_choi_block_expansion,
                           check_contraction_identities, check_diag_lemma,
                           check_fusion_rule, check_mcz_representation,
                           choi_block_matrix, contract, contract_matrix,
                           fusion_rhs_diagram, mcz_diagram, minus_vector,
                           phase_state, tensor_of)

SQRT2 = math.sqrt(2)


class TestTensors:
    def test_hbox_two_legs(self):
        assert np.array_equal(tensor_of(Node("H", 0, 2)).reshape(-1),
                              np.array([1, 1, 1, -1], dtype=complex))

    def test_hbox_one_in_one_out_is_sqrt2_hadamard(self):
        t = tensor_of(Node("H", 1, 1))
        hadamard = np.array([[1, 1], [1, -1]]) / SQRT2
        assert np.allclose(t, SQRT2 * hadamard)

    def test_zspider_identity(self):
        assert np.array_equal(tensor_of(Node("Z", 1, 1)), np.eye(2, dtype=complex))

    def test_zspider_phase(self):
        t = tensor_of(Node("Z", 0, 1, 0.7))
        assert np.allclose(t, [1, np.exp(0.7j)])

    def test_xspider_pi_is_pauli_x(self):
        t = tensor_of(Node("X", 1, 1, math.pi))
        assert np.allclose(t, np.array([[0, 1], [1, 0]]), atol=1e-15)

    def test_phase_state_component_form(self):
        for theta in (0.0, 0.3, math.pi / 2, math.pi, -math.pi / 2):
            expected = SQRT2 * np.exp(1j * theta / 2) * np.array(
                [math.cos(theta / 2), -1j * math.sin(theta / 2)])
            assert np.allclose(phase_state(theta), expected, atol=1e-14)

    def test_size_limit(self):
        with pytest.raises(ValueError, match="dense limit"):
            tensor_of(Node("H", 0, 13))

    def test_hbox_carries_no_phase(self):
        with pytest.raises(ValueError, match="no phase"):
            Node("H", 1, 1, 0.5)

    @given(st.sampled_from(["Z", "X", "H"]), st.integers(1, 5),
           st.floats(0, 2 * math.pi, allow_nan=False), st.randoms())
    @settings(max_examples=40, deadline=None)
    def test_leg_permutation_symmetry(self, kind, legs, phase, random):
        node = Node(kind, 0, legs, 0.0 if kind == "H" else phase)
        t = tensor_of(node)
        perm = list(range(legs))
        random.shuffle(perm)
        assert np.allclose(t, np.transpose(t, perm))


class TestContract:
    def test_through_wire_is_identity(self):
        d = Diagram([], [(("in", 0), ("out", 0))], n_in=1, n_out=1)
        assert np.array_equal(contract_matrix(d), np.eye(2, dtype=complex))

    def test_mcz_diagram(self):
        for n in (2, 3, 4):
            target = np.diag(np.concatenate([np.ones(2**n - 1), [-1.0]]))
            assert np.array_equal(contract_matrix(mcz_diagram(n)), target.astype(complex))

    def test_dangling_port_rejected(self):
        d = Diagram([Node("H", 0, 2)], [(("node", 0, 0), ("out", 0))], n_in=0, n_out=1)
        with pytest.raises(ValueError, match="exactly one wire"):
            contract(d)

    def test_size_limit(self):
        with pytest.raises(ValueError, match="open wires"):
            contract(mcz_diagram(7))

    def test_order_independence(self, rng):
        d = fusion_rhs_diagram(3, 2)
        reference = contract(d)
        for _ in range(10):
            order = rng.permutation(len(d.nodes))
            assert np.max(np.abs(contract(d, list(order)) - reference)) < 1e-12

    def test_hermitian_conjugate_rule(self):
        # chain: Z(theta1) -> H -> X(theta2), mirrored with negated phases
        def chain(t1, t2):
            nodes = [Node("Z", 1, 1, t1), Node("H", 1, 1), Node("X", 1, 1, t2)]
            wires = [(("in", 0), ("node", 0, 0)), (("node", 0, 1), ("node", 1, 0)),
                     (("node", 1, 1), ("node", 2, 0)), (("node", 2, 1), ("out", 0))]
            return Diagram(nodes, wires, n_in=1, n_out=1)

        for t1, t2 in [(0.3, 1.1), (2.0, -0.7), (math.pi / 2, math.pi)]:
            m = contract_matrix(chain(t1, t2))
            mirrored = contract_matrix(chain(t1, t2).mirrored())
            assert np.max(np.abs(mirrored - m.conj().T)) < 1e-12


class TestFusionRule:
    @pytest.mark.parametrize("m,n", [(1, 1), (3, 2), (0, 1), (2, 0), (5, 5)])
    def test_specific_splits(self, m, n):
        assert check_fusion_rule(m, n) < 1e-12

    def test_all_splits_up_to_ten_legs(self):
        worst = max(check_fusion_rule(m, total - m)
                    for total in range(1, 11) for m in range(total + 1))
        assert worst < 1e-12

    def test_size_limit(self):
        with pytest.raises(ValueError, match="<= 10"):
            check_fusion_rule(6, 5)


class TestContractionIdentities:
    def test_theta_pi_gives_z(self):
        # sqrt(2) diag(1, -1) for a single qubit
        hb = tensor_of(Node("H", 0, 2)).reshape(2, 2)
        contracted = hb @ phase_state(math.pi)
        assert np.allclose(contracted, SQRT2 * np.array([1, -1]), atol=1e-14)
        assert check_contraction_identities(1, math.pi) < 1e-12

    def test_minus_vector_gives_projector(self):
        hb = tensor_of(Node("H", 0, 3)).reshape(4, 2)
        contracted = hb @ minus_vector()
        assert np.allclose(contracted, [0, 0, 0, 2])

    def test_theta_zero_gives_identity(self):
        hb = tensor_of(Node("H", 0, 2)).reshape(2, 2)
        assert np.allclose(hb @ phase_state(0.0), SQRT2 * np.array([1, 1]))

    def test_grid(self):
        for n in (1, 2, 3, 5):
            for j in range(8):
                assert check_contraction_identities(n, 2 * math.pi * j / 8) < 1e-12


class TestDiagLemma:
    def test_cz_diagonal(self):
        v = np.array([1, 1, 1, -1], dtype=complex)
        assert check_diag_lemma(v) < 1e-12

    def test_all_ones_is_identity(self):
        assert check_diag_lemma(np.ones(8)) < 1e-12

    def test_random_complex(self, rng):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert check_diag_lemma(v) < 1e-12

    def test_size_limit(self):
        with pytest.raises(ValueError, match="limited"):
            check_diag_lemma(np.ones(2**7))


class TestChoiBlock:
    def test_matrix_entries(self):
        q = choi_block_matrix()
        assert q[0, 3] == -1
        expected = np.array([[1, 1, 1, -1], [1, 1, 1, -1], [1, 1, 1, -1], [-1, -1, -1, 1]])
        assert np.array_equal(q, expected.astype(complex))

    def test_expansion_residual(self):
        assert check_choi_block_expansion() < 1e-14


class TestMczRepresentation:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_exact(self, n):
        assert check_mcz_representation(n) == 0.0
