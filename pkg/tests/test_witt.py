import math

import numpy as np
import pytest

from qwitt import witt as W
from qwitt.errors import DegenerateParameterError
from qwitt.qcalc import UnitPhase, q_number

Q6, Q8, Q12 = (UnitPhase.lattice(N) for N in (6, 8, 12))


def entry(op, N, m_to, m_from):
    return op.matrix[m_to % N, m_from % N]


def brute_L(N, n, k, alpha):
    """Independent construction straight from the entry formula."""
    phi = 2 * math.pi / N
    M = np.zeros((N, N))
    for col in range(N):
        m = (col + N // 2) % N - N // 2
        M[(col + n) % N, col] = math.sin(k * (m + n / 2 + alpha) * phi) / math.sin(k * phi)
    return M


class TestConstructors:
    def test_T(self):
        assert W.make_T(0, Q8).distance(W.identity(Q8)) == 0
        assert W.make_T(8, Q8).distance(W.identity(Q8)) == 0
        P = W.make_T(1, UnitPhase.lattice(4)).matrix
        np.testing.assert_array_equal(P, np.roll(np.eye(4), 1, axis=0))
        assert (W.make_T(3, Q8).adjoint() @ W.make_T(3, Q8)).distance(W.identity(Q8)) < 1e-15

    def test_L_undeformed_entries(self):
        np.testing.assert_allclose(np.diag(W.make_L_undeformed(0, 0, Q8).matrix), W.canonical_modes(8))
        assert entry(W.make_L_undeformed(2, 0, Q8), 8, 3, 1) == 2.0
        assert entry(W.make_L_undeformed(1, 0.5, Q8), 8, 1, 0) == 1.0

    def test_L_deformed_entries(self):
        np.testing.assert_allclose(np.diag(W.make_L_deformed(0, 1, 0, Q8).matrix),
                                   q_number(W.canonical_modes(8), Q8), atol=1e-15)
        assert abs(entry(W.make_L_deformed(2, 2, 0, Q8), 8, 3, 1)) < 1e-15
        for n, k, a in [(1, 2, 0.3), (-3, 3, 0.7), (2, 1, 0.0)]:
            np.testing.assert_allclose(W.make_L_deformed(n, k, a, Q12).matrix, brute_L(12, n, k, a), atol=1e-14)

    def test_L_deformed_limit_entry(self):
        errs, phis = [], []
        for N in (256, 512, 1024, 2048):
            ph = UnitPhase.lattice(N)
            errs.append(abs(entry(W.make_L_deformed(1, 5, 0.3, ph), N, 4, 3) - 3.8))
            phis.append(ph.phi0)
        assert errs[-1] < 3e-3
        assert np.polyfit(np.log(phis), np.log(errs), 1)[0] == pytest.approx(2.0, abs=0.05)

    @pytest.mark.parametrize("k", [0, 4, 12])
    def test_L_degenerate(self, k):
        with pytest.raises(DegenerateParameterError, match="mod N=8"):
            W.make_L_deformed(1, k, 0, Q8)

    def test_K(self):
        assert W.make_K(0, Q8).distance(W.identity(Q8)) == 0
        assert (W.make_K(2, Q8) @ W.make_K(3, Q8)).distance(W.make_K(5, Q8)) < 1e-14
        assert W.make_K(3, Q8).adjoint().distance(W.make_K(-3, Q8)) < 1e-15

    def test_K_shifts_position_samples(self):
        x = np.arange(8.0)
        np.testing.assert_allclose(W.make_K(2, Q8).apply_samples(x).real, np.roll(x, -2), atol=1e-12)

    def test_position_matrix_of_T_is_multiplication(self):
        P = W.make_T(1, Q8).position_matrix()
        np.testing.assert_allclose(P, np.diag(np.exp(2j * np.pi * np.arange(8) / 8)), atol=1e-14)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            W.make_T(1, Q8) @ W.make_T(1, Q12)


class TestCommutators:
    def test_trivial(self):
        A = W.make_L_deformed(1, 2, 0.3, Q8)
        assert W.commutator(A, A).max_abs() == 0
        assert W.q_commutator(A, A, 0.7, 0.7, Q8).max_abs() < 1e-15
        B = W.make_T(2, Q8)
        assert W.q_commutator(A, B, 0, 0, Q8).distance(W.commutator(A, B)) == 0

    def test_undeformed_witt_relations(self):
        assert W.commutator(W.make_T(1, Q8), W.make_T(3, Q8)).max_abs() == 0
        N = 16
        ph = UnitPhase.lattice(N)
        lhs = W.commutator(W.make_L_undeformed(1, 0, ph), W.make_T(2, ph))
        cols = W.wrap_free_columns(N, [0, 1, 2, 3])
        assert lhs.distance(2 * W.make_T(3, ph), cols) < 1e-13

    def test_equal_j_coefficient_carries_half_factor(self):
        # [L_{0,1}, L_{1,1}] on N=8 is [1/2]_q [2]_q L_{1,2}; the bare [2]_q = sqrt(2) does not fit
        lhs = W.commutator(W.make_L_deformed(0, 1, 0, Q8), W.make_L_deformed(1, 1, 0, Q8))
        L12 = W.make_L_deformed(1, 2, 0, Q8)
        (c, k), = W.witt_structure_constants(0, 1, 1, 1, Q8)
        assert k == 2
        assert c == pytest.approx(0.7653668647301797, abs=1e-14)
        assert lhs.distance(c * L12) < 1e-14
        assert lhs.distance(math.sqrt(2) * L12) > 0.1

    def test_mixed_relation_entries_brute_force(self):
        N, m, n, j1, j2, a = 12, 2, -1, 1, 3, 0.7
        lhs = brute_L(N, m, j1, a) @ brute_L(N, n, j2, a) - brute_L(N, n, j2, a) @ brute_L(N, m, j1, a)
        ph = UnitPhase.lattice(N)
        qn = lambda x: q_number(x, ph)  # noqa: E731
        c1 = qn(j1 * n / 2 - j2 * m / 2) * qn(j1 + j2) / (qn(j1) * qn(j2))
        c2 = qn(j1 * n / 2 + j2 * m / 2) * qn(j2 - j1) / (qn(j1) * qn(j2))
        rhs = c1 * brute_L(N, m + n, j1 + j2, a) + c2 * brute_L(N, m + n, j2 - j1, a)
        assert np.max(np.abs(lhs - rhs)) < 1e-13

    def test_mixed_relation_report(self):
        r = W.check_deformed_relations(2, -1, 1, 3, 0.7, Q12)
        assert r.passed and r.relation == "witt_deformed_mixed"
        assert r.residual < 1e-13

    def test_equal_m_n_zero(self):
        r = W.check_deformed_relations(2, 2, 3, 3, 0.7, Q12)
        assert r.passed
        assert W.commutator(W.make_L_deformed(2, 3, 0.7, Q12), W.make_L_deformed(2, 3, 0.7, Q12)).max_abs() == 0

    def test_inapplicable_when_rhs_degenerate(self):
        r = W.check_deformed_relations(1, 2, 1, 3, 0.0, Q8)  # [4]_q = 0 on N=8
        assert not r.applicable and r.passed and r.residual is None

    def test_fault_injection_detected(self):
        r = W.check_deformed_relations(1, 2, 1, 2, 0.0, Q8, perturbation=1e-6)
        assert not r.passed

    def test_antisymmetry(self):
        assert W.check_antisymmetry(1, -2, 1, 3, 0.7, Q12).residual < 1e-14


class TestShiftAlgebra:
    def test_coupling_examples(self):
        assert W.check_coupling(1, 1, 2, 0, Q8).residual <= 1e-12
        assert W.check_coupling(-2, 3, 4, 0.3, Q12).residual <= 1e-12
        assert W.check_coupling(1, 0, 2, 0, Q8).residual == 0

    def test_K_examples(self):
        r = W.check_K_relations(0, 2, 1, 0, Q8, k_prime=0)
        assert all(v == 0 for v in r.parts.values())
        assert Q8.power(1 * 2) == pytest.approx(1j)
        assert W.check_K_relations(1, 2, 1, 0, Q8).residual <= 1e-14
        assert W.check_K_relations(3, -1, 2, 0.5, Q12).residual <= 1e-12

    def test_K_L_part_skipped_when_degenerate(self):
        r = W.check_K_relations(1, 2, 4, 0, Q8)
        assert "K_L" not in r.parts and r.passed

    def test_T_tilde(self):
        assert W.make_T_tilde(3, 0, Q8).distance(W.make_T(3, Q8)) == 0
        r = W.check_T_tilde_relations(1, 2, 1, 1, 0, Q8)
        assert r.parts["exchange"] <= 1e-13
        Tm, Tn = W.make_T_tilde(1, 1, Q8), W.make_T_tilde(2, 1, Q8)
        assert (Tm @ Tn).distance(np.exp(1j * math.pi / 4) * (Tn @ Tm)) < 1e-13
        assert W.check_T_tilde_relations(1, -1, 2, 2, 0.4, Q12).parts["coupling"] <= 1e-12

    def test_T_tilde_coupling_needs_shifted_alpha(self):
        Tm = W.make_T_tilde(1, 2, Q12)
        left = Q12.power(2) * (Tm @ W.make_L_deformed(-1, 2, 0.4, Q12))
        assert left.distance(W.make_L_deformed(-1, 2, 0.4, Q12) @ Tm) > 1e-3


class TestHopf:
    def test_coproduct_K0_identity(self):
        np.testing.assert_array_equal(W.coproduct_K(0, Q8), np.eye(64))

    def test_example(self):
        r = W.check_hopf_homomorphism(1, 0, 1, 1, 0, Q6)
        assert r.parts["homomorphism"] <= 1e-11 and r.passed

    def test_antipode_K(self):
        assert (W.antipode_K(2, Q8) @ W.make_K(2, Q8)).distance(W.identity(Q8)) == 0

    def test_mixed(self):
        assert W.check_hopf_homomorphism(2, -1, 1, 2, 0.7, Q8).passed


class TestGeneralized:
    def test_specialization(self):
        assert W.check_A_specialization(1, 2, 0.3, Q8).residual <= 1e-12

    def test_closure_example(self):
        r = W.check_qbracket_closure(1, 2, 0.5, 1, Q8)
        assert r.residual <= 1e-11
        assert r.parts["swapped_exponents"] > 1e-3

    def test_closure_trivial_n_equals_m(self):
        assert abs(W.qbracket_closure_coefficient(2, 2, 1, Q8)) == 0
        assert W.check_qbracket_closure(2, 2, 0.5, 1, Q8).residual < 1e-13

    def test_closure_needs_integer_b(self):
        with pytest.raises(ValueError):
            W.check_qbracket_closure(1, 2, 0.5, 0.5, Q8)

    @pytest.mark.parametrize("n,k,a,ph", [(0, 1, 0, Q8), (2, 2, 0.7, Q12), (3, 1, 0.2, Q6)])
    def test_implicit_additive(self, n, k, a, ph):
        assert W.check_implicit_additive(n, k, a, ph).residual <= 1e-13

    def test_symmetry(self):
        r = W.check_symmetry(2, 3, 0.7, Q12)
        assert r.parts["imag"] == 0 and r.parts["adjoint"] < 1e-15


class TestLimit:
    def test_slope(self):
        phis, errs = W.limit_entry_errors(1, 2, 0.3, [16, 32, 64, 128, 256], [-2, -1, 0, 1, 2])
        assert abs(np.polyfit(np.log(phis), np.log(errs), 1)[0] - 2.0) <= 0.1
        assert np.all(np.diff(errs) < 0)

    def test_rejects_wrapping_modes(self):
        with pytest.raises(ValueError):
            W.limit_entry_errors(1, 2, 0.0, [8], [3])


def test_report_serialization():
    d = W.check_coupling(1, 1, 2, 0, Q8).to_dict()
    assert d["relation"] == "quadratic_coupling"
    assert list(d["params"]) == sorted(d["params"])
    assert d["passed"] is True
