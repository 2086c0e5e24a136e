"""Matrix representations of the (deformed) inhomogeneous Witt algebra.

Every generator acts on the cyclic Fourier-mode space of the N-point circle:
basis vector ``i`` is the mode ``z**m`` with ``m = i mod N``.  Because
``q**N == 1`` all q-numbers are N-periodic, so the deformed relations are
exact finite-matrix identities with no truncation.  The undeformed generators
depend on the non-periodic ``m + n/2 + alpha`` and use canonical mode
representatives in ``[-N//2, N - N//2)``; identities between them only hold on
wrap-free columns (see :func:`wrap_free_columns`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DegenerateParameterError
from .qcalc import UnitPhase, a_number, q_number, require_nonzero

DEFAULT_TOL = 1e-11


def canonical_modes(N: int) -> np.ndarray:
    """Canonical representative of each basis index (same order as ``numpy.fft``)."""
    idx = np.arange(N)
    return (idx + N // 2) % N - N // 2


class ModeOperator:
    """Immutable N x N complex matrix on the cyclic mode space of ``phase``."""

    __slots__ = ("_m", "phase")

    def __init__(self, matrix, phase: UnitPhase):
        m = np.array(matrix, dtype=complex)
        if phase.N is None:
            raise ValueError("mode operators need a phase tied to a lattice size N")
        if m.shape != (phase.N, phase.N):
            raise ValueError(f"matrix shape {m.shape} does not match N={phase.N}")
        m.setflags(write=False)
        self._m = m
        self.phase = phase

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def N(self) -> int:
        return self.phase.N

    def _check(self, other: "ModeOperator"):
        if not isinstance(other, ModeOperator):
            return NotImplemented
        if other.N != self.N:
            raise ValueError(f"size mismatch: {self.N} vs {other.N}")
        return None

    def __matmul__(self, other):
        if isinstance(other, ModeOperator):
            self._check(other)
            return ModeOperator(self._m @ other._m, self.phase)
        return self._m @ np.asarray(other)

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ModeOperator(self._m + other._m, self.phase)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return ModeOperator(self._m - other._m, self.phase)

    def __mul__(self, c):
        if isinstance(c, ModeOperator):
            return NotImplemented
        return ModeOperator(self._m * c, self.phase)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return ModeOperator(self._m / c, self.phase)

    def __neg__(self):
        return ModeOperator(-self._m, self.phase)

    def adjoint(self) -> "ModeOperator":
        return ModeOperator(self._m.conj().T, self.phase)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._m))) if self._m.size else 0.0

    def distance(self, other: "ModeOperator", columns=None) -> float:
        """Max-norm of the entrywise difference, optionally restricted to columns."""
        self._check(other)
        d = self._m - other._m
        if columns is not None:
            d = d[:, columns]
        return float(np.max(np.abs(d))) if d.size else 0.0

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self._m - self._m.conj().T)))

    def position_matrix(self) -> np.ndarray:
        """The same operator acting on position samples ``psi(l)``."""
        N = self.N
        F = np.fft.fft(np.eye(N), axis=0) / N  # samples -> mode coefficients
        Finv = np.linalg.inv(F)
        return Finv @ self._m @ F

    def apply_modes(self, coeffs) -> np.ndarray:
        return self._m @ np.asarray(coeffs, dtype=complex)

    def apply_samples(self, samples) -> np.ndarray:
        """Act on position samples through the discrete Fourier transform."""
        N = self.N
        c = np.fft.fft(np.asarray(samples, dtype=complex)) / N
        return N * np.fft.ifft(self._m @ c)

    def __repr__(self):
        return f"ModeOperator(N={self.N}, max|entry|={self.max_abs():.3g})"


def identity(phase: UnitPhase) -> ModeOperator:
    return ModeOperator(np.eye(phase.N), phase)


def _raising(phase: UnitPhase, n: int, weights) -> ModeOperator:
    """Matrix sending mode ``m`` to ``m + n`` (mod N) with weight ``weights[m]``."""
    N = phase.N
    M = np.zeros((N, N), dtype=complex)
    cols = np.arange(N)
    M[(cols + int(n)) % N, cols] = weights
    return ModeOperator(M, phase)


def make_T(n: int, phase: UnitPhase) -> ModeOperator:
    """Multiplication by ``z**n``: a cyclic permutation of modes."""
    return _raising(phase, n, np.ones(phase.N))


def make_L_undeformed(n: int, alpha: float, phase: UnitPhase) -> ModeOperator:
    """``z**n (z d/dz + n/2 + alpha)`` with canonical mode representatives."""
    m = canonical_modes(phase.N)
    return _raising(phase, n, m + n / 2 + alpha)


def make_L_deformed(n: int, k: int, alpha: float, phase: UnitPhase) -> ModeOperator:
    """``z**n [k(N_z + n/2 + alpha)]_q / [k]_q``.

    Raises :class:`DegenerateParameterError` when ``[k]_q = 0``.
    """
    qk = require_nonzero(k, phase, "k")
    m = canonical_modes(phase.N)
    return _raising(phase, n, q_number(k * (m + n / 2 + alpha), phase) / qk)


def make_K(k, phase: UnitPhase) -> ModeOperator:
    """Shift ``f(z) -> f(q**k z)``: diagonal phases ``q**(k m)``."""
    m = canonical_modes(phase.N)
    return ModeOperator(np.diag(phase.power(k * m)), phase)


def make_T_tilde(n: int, delta: int, phase: UnitPhase) -> ModeOperator:
    """Deformed position generator ``T_n K_delta``."""
    return make_T(n, phase) @ make_K(delta, phase)


def commutator(A: ModeOperator, B: ModeOperator) -> ModeOperator:
    return A @ B - B @ A


def q_commutator(A: ModeOperator, B: ModeOperator, r: float, s: float, phase: UnitPhase | None = None) -> ModeOperator:
    """``q**r AB - q**s BA``."""
    phase = phase or A.phase
    return phase.power(r) * (A @ B) - phase.power(s) * (B @ A)


@dataclass(frozen=True)
class AParams:
    """Nine real parameters of the three-term generalized generator."""

    lambdas: tuple[float, float, float]
    alphas: tuple[float, float, float]
    betas: tuple[float, float, float]

    @classmethod
    def specialization(cls, n: int, k: int, alpha: float) -> "AParams":
        """Parameters for which the generalized generator equals the deformed Witt generator."""
        return cls(
            lambdas=(k * (n / 2 + alpha), k * alpha, -k * n / 2),
            alphas=(k, k, k),
            betas=(0, -k, -k),
        )

    @classmethod
    def closure_family(cls, n: int, a: float, b: float) -> "AParams":
        """The two-fixed-parameter family that closes under a q-commutator (alpha = 0)."""
        return cls(
            lambdas=(n * (a + 1) * b, n * a * b, 0.0),
            alphas=(b, 2 * b, 1.0),
            betas=(-b, -2 * b, 0.0),
        )


def make_A_general(n: int, params: AParams, alpha: float, phase: UnitPhase) -> ModeOperator:
    """``z**n`` times the sum of three separately deformed, separately shifted terms.

    The first term deforms ``N_z``, the second the scalar ``n/2`` and the third
    the scalar ``alpha``; the third drops out for ``alpha == 0``.
    """
    m = canonical_modes(phase.N)
    (l1, l2, l3), (a1, a2, a3), (b1, b2, b3) = params.lambdas, params.alphas, params.betas
    w = phase.power(l1) * q_number(a1 * m, phase) / require_nonzero(a1, phase, "alpha_1") * phase.power(b1 * m)
    w = w + phase.power(l2) * q_number(a2 * n / 2, phase) / require_nonzero(a2, phase, "alpha_2") * phase.power(b2 * m)
    if alpha != 0:
        w = w + phase.power(l3) * q_number(a3 * alpha, phase) / require_nonzero(a3, phase, "alpha_3") * phase.power(b3 * m)
    return _raising(phase, n, w)


def make_M_implicit_additive(n: int, k: int, alpha: float, phase: UnitPhase) -> ModeOperator:
    """Deformed generator written with a-numbers at the imaginary step ``a = i*phi0``."""
    a = 1j * phase.phi0
    ak = a_number(k, a)
    if abs(ak) < 1e-12:
        raise DegenerateParameterError(f"[k]_a = 0 for k={k}, a=i*phi0")
    m = canonical_modes(phase.N)
    return _raising(phase, n, a_number(k * (m + n / 2 + alpha) + 0j, a) / ak)


def wrap_free_columns(N: int, offsets: Iterable[int]) -> np.ndarray:
    """Boolean mask of source modes ``m`` with ``m + o`` canonical for every offset ``o``."""
    m = canonical_modes(N)
    lo, hi = -(N // 2), N - N // 2
    mask = np.ones(N, dtype=bool)
    for o in offsets:
        mask &= (m + o >= lo) & (m + o < hi)
    return mask


def tensor(A: ModeOperator, B: ModeOperator) -> np.ndarray:
    return np.kron(A.matrix, B.matrix)


# ----------------------------------------------------------------------------
# relation checks


@dataclass
class CheckReport:
    """Outcome of one relation check for one parameter tuple."""

    relation: str
    params: dict[str, Any]
    residual: float | None
    tol: float
    applicable: bool = True
    note: str = ""
    parts: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (not self.applicable) or (self.residual is not None and self.residual <= self.tol)

    @property
    def key(self) -> str:
        items = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.relation}[{items}]"

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "params": dict(sorted(self.params.items())),
            "residual": self.residual,
            "tol": self.tol,
            "applicable": self.applicable,
            "passed": self.passed,
            "note": self.note,
            "parts": dict(sorted(self.parts.items())),
        }


def _inapplicable(relation, params, tol, exc) -> CheckReport:
    return CheckReport(relation, params, None, tol, applicable=False, note=str(exc))


def _phase_params(phase: UnitPhase) -> dict:
    return {"N": phase.N}


def witt_structure_constants(m, n, j1, j2, phase: UnitPhase):
    """Coefficients and internal parameters of the deformed commutator.

    Returns a list of ``(coefficient, k)`` pairs; the commutator of the mode
    ``m`` generator at ``j1`` with the mode ``n`` generator at ``j2`` equals
    the sum of ``coefficient * L_{m+n, k}``.
    """
    qn = lambda x: q_number(x, phase)  # noqa: E731
    d = qn(j1) * qn(j2)
    if j1 != j2:
        return [
            (qn(j1 * n / 2 - j2 * m / 2) * qn(j1 + j2) / d, j1 + j2),
            (qn(j1 * n / 2 + j2 * m / 2) * qn(j2 - j1) / d, j2 - j1),
        ]
    return [(qn(j1 * (n - m) / 2) * qn(2 * j1) / d, 2 * j1)]


def deformed_commutator_rhs(m, n, j1, j2, alpha, phase: UnitPhase, perturbation: float = 0.0) -> ModeOperator:
    terms = witt_structure_constants(m, n, j1, j2, phase)
    out = ModeOperator(np.zeros((phase.N, phase.N)), phase)
    for i, (c, k) in enumerate(terms):
        if i == 0:
            c = c + perturbation
        out = out + c * make_L_deformed(m + n, k, alpha, phase)
    return out


def check_deformed_relations(m, n, j1, j2, alpha, phase: UnitPhase, tol=DEFAULT_TOL, perturbation=0.0) -> CheckReport:
    """Residual of the deformed Witt commutator against its q-number structure constants.

    ``perturbation`` is added to the first structure constant (fault injection).
    """
    relation = "witt_deformed_mixed" if j1 != j2 else "witt_deformed_equal"
    params = {**_phase_params(phase), "m": m, "n": n, "j1": j1, "j2": j2, "alpha": alpha}
    try:
        lhs = commutator(make_L_deformed(m, j1, alpha, phase), make_L_deformed(n, j2, alpha, phase))
        rhs = deformed_commutator_rhs(m, n, j1, j2, alpha, phase, perturbation)
    except DegenerateParameterError as exc:
        return _inapplicable(relation, params, tol, exc)
    return CheckReport(relation, params, lhs.distance(rhs), tol)


def check_antisymmetry(m, n, j1, j2, alpha, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """Right-hand side negates when the two generators are swapped."""
    params = {**_phase_params(phase), "m": m, "n": n, "j1": j1, "j2": j2, "alpha": alpha}
    try:
        a = deformed_commutator_rhs(m, n, j1, j2, alpha, phase)
        b = deformed_commutator_rhs(n, m, j2, j1, alpha, phase)
    except DegenerateParameterError as exc:
        return _inapplicable("witt_antisymmetry", params, tol, exc)
    return CheckReport("witt_antisymmetry", params, a.distance(-b), tol)


def check_undeformed_relations(m, n, alpha, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """Inhomogeneous Witt relations of the undeformed generators on wrap-free columns."""
    N = phase.N
    params = {**_phase_params(phase), "m": m, "n": n, "alpha": alpha}
    Lm, Ln = make_L_undeformed(m, alpha, phase), make_L_undeformed(n, alpha, phase)
    Tm, Tn = make_T(m, phase), make_T(n, phase)
    cols = wrap_free_columns(N, [0, m, n, m + n])
    parts = {
        "T_T": commutator(Tm, Tn).max_abs(),
        "L_T": commutator(Ln, Tm).distance(m * make_T(m + n, phase), cols),
        "L_L": commutator(Lm, Ln).distance((n - m) * make_L_undeformed(m + n, alpha, phase), cols),
    }
    return CheckReport("witt_undeformed", params, max(parts.values()), tol, parts=parts,
                       note=f"{int(cols.sum())} wrap-free columns")


def check_coupling(m, n, k, alpha, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """Quadratic coupling ``L_{m,k} T_n = T_{-n} L_{m+2n,k}``."""
    params = {**_phase_params(phase), "m": m, "n": n, "k": k, "alpha": alpha}
    try:
        lhs = make_L_deformed(m, k, alpha, phase) @ make_T(n, phase)
        rhs = make_T(-n, phase) @ make_L_deformed(m + 2 * n, k, alpha, phase)
    except DegenerateParameterError as exc:
        return _inapplicable("quadratic_coupling", params, tol, exc)
    return CheckReport("quadratic_coupling", params, lhs.distance(rhs), tol)


def check_K_relations(k, n, l, alpha, phase: UnitPhase, tol=DEFAULT_TOL, k_prime=None) -> CheckReport:
    """Exchange phases of the shifts with ``T_n`` and ``L_{n,l}``, and abelianness of the shifts."""
    k_prime = k + 1 if k_prime is None else k_prime
    params = {**_phase_params(phase), "k": k, "n": n, "l": l, "alpha": alpha, "k_prime": k_prime}
    K = make_K(k, phase)
    ph = phase.power(k * n)
    T = make_T(n, phase)
    parts = {
        "K_T": (K @ T).distance(ph * (T @ K)),
        "K_Kprime": commutator(K, make_K(k_prime, phase)).max_abs(),
        "K_product": (K @ make_K(k_prime, phase)).distance(make_K(k + k_prime, phase)),
        "K_adjoint": K.adjoint().distance(make_K(-k, phase)),
    }
    try:
        L = make_L_deformed(n, l, alpha, phase)
        parts["K_L"] = (K @ L).distance(ph * (L @ K))
    except DegenerateParameterError as exc:
        return CheckReport("shift_relations", params, max(parts.values()), tol, parts=parts,
                           note=f"L part skipped: {exc}")
    return CheckReport("shift_relations", params, max(parts.values()), tol, parts=parts)


def coproduct_L(m, j, alpha, phase: UnitPhase) -> np.ndarray:
    L, K = make_L_deformed(m, j, alpha, phase), make_K(m, phase)
    return tensor(L, K) + tensor(K, L)


def coproduct_K(l, phase: UnitPhase) -> np.ndarray:
    K = make_K(l, phase)
    return tensor(K, K)


def antipode_L(m, j, alpha, phase: UnitPhase) -> ModeOperator:
    Kinv = make_K(-m, phase)
    return -(Kinv @ make_L_deformed(m, j, alpha, phase) @ Kinv)


def antipode_K(l, phase: UnitPhase) -> ModeOperator:
    return make_K(-l, phase)


def check_hopf_homomorphism(m, n, j1, j2, alpha, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """Coproduct, counit and antipode axioms on the N**2-dimensional tensor space.

    Parts:
      * ``homomorphism``: commutator of coproducts equals the coproduct of the
        commutator's right-hand side;
      * ``shift_coproduct``: the coproduct respects the shift exchange phase;
      * ``antipode_left`` / ``antipode_right``: multiplication after antipode
        on one tensor leg gives the counit (zero for L, identity for K).
    """
    params = {**_phase_params(phase), "m": m, "n": n, "j1": j1, "j2": j2, "alpha": alpha}
    N = phase.N
    try:
        terms = witt_structure_constants(m, n, j1, j2, phase)
        da, db = coproduct_L(m, j1, alpha, phase), coproduct_L(n, j2, alpha, phase)
        rhs = sum(c * coproduct_L(m + n, k, alpha, phase) for c, k in terms)
        La = make_L_deformed(m, j1, alpha, phase)
    except DegenerateParameterError as exc:
        return _inapplicable("hopf", params, tol, exc)
    Km = make_K(m, phase)
    one = identity(phase)
    dk = coproduct_K(n, phase)
    parts = {
        "homomorphism": float(np.max(np.abs(da @ db - db @ da - rhs))),
        "shift_coproduct": float(np.max(np.abs(dk @ da - phase.power(n * m) * (da @ dk)))),
        # counit of L is 0, so both antipode contractions must vanish
        "antipode_left": (antipode_L(m, j1, alpha, phase) @ Km + antipode_K(m, phase) @ La).max_abs(),
        "antipode_right": (La @ antipode_K(m, phase) + Km @ antipode_L(m, j1, alpha, phase)).max_abs(),
        "antipode_K": (antipode_K(n, phase) @ make_K(n, phase)).distance(one),
    }
    parts["coproduct_K_identity"] = float(np.max(np.abs(coproduct_K(0, phase) - np.eye(N * N))))
    return CheckReport("hopf", params, max(parts.values()), tol, parts=parts)


def check_T_tilde_relations(m, n, delta, j, alpha, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """Exchange relation of the deformed position generators and their coupling.

    The coupling relates generators at shifted topological parameter:
    ``q**(-delta n) Tt_m L^{alpha+m}_{n,j} = L^{alpha}_{n,j} Tt_m``.
    """
    params = {**_phase_params(phase), "m": m, "n": n, "delta": delta, "j": j, "alpha": alpha}
    Tm, Tn = make_T_tilde(m, delta, phase), make_T_tilde(n, delta, phase)
    parts = {"exchange": (Tm @ Tn).distance(phase.power(delta * (n - m)) * (Tn @ Tm))}
    try:
        left = phase.power(-delta * n) * (Tm @ make_L_deformed(n, j, alpha + m, phase))
        right = make_L_deformed(n, j, alpha, phase) @ Tm
    except DegenerateParameterError as exc:
        return CheckReport("deformed_position", params, parts["exchange"], tol, parts=parts,
                           note=f"coupling skipped: {exc}")
    parts["coupling"] = left.distance(right)
    return CheckReport("deformed_position", params, max(parts.values()), tol, parts=parts)


def qbracket_closure_coefficient(n, m, b, phase: UnitPhase) -> complex:
    """Structure constant of the q-bracket family, ``(q**(-2bn) - q**(-2bm)) / ((q - 1/q)[b]_q)``."""
    qb = require_nonzero(b, phase, "b")
    q = phase.q
    return (phase.power(-2 * b * n) - phase.power(-2 * b * m)) / ((q - 1 / q) * qb)


def check_qbracket_closure(n, m, a_param, b_param, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """Closure of the two-parameter generalized generators under a q-commutator.

    The bracket is ``q**(-2bn) A_n A_m - q**(-2bm) A_m A_n``.  The part
    ``swapped_exponents`` reports the residual with the exponents attached the other way
    round and without the ``1/(q - 1/q)`` normalization, which does not close.
    """
    params = {**_phase_params(phase), "n": n, "m": m, "a": a_param, "b": b_param}
    b = b_param
    if not float(b).is_integer():
        raise ValueError("b must be an integer for the shifts to act on the cyclic mode space")
    try:
        An = make_A_general(n, AParams.closure_family(n, a_param, b), 0.0, phase)
        Am = make_A_general(m, AParams.closure_family(m, a_param, b), 0.0, phase)
        Anm = make_A_general(n + m, AParams.closure_family(n + m, a_param, b), 0.0, phase)
        coeff = qbracket_closure_coefficient(n, m, b, phase)
    except DegenerateParameterError as exc:
        return _inapplicable("qbracket_closure", params, tol, exc)
    lhs = q_commutator(An, Am, -2 * n * b, -2 * m * b, phase)
    swapped_lhs = q_commutator(An, Am, -2 * m * b, -2 * n * b, phase)
    swapped_coeff = coeff * (phase.q - 1 / phase.q)
    parts = {
        "closure": lhs.distance(coeff * Anm),
        "swapped_exponents": swapped_lhs.distance(swapped_coeff * Anm),
    }
    return CheckReport("qbracket_closure", params, parts["closure"], tol, parts=parts)


def check_A_specialization(n, k, alpha, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """The generalized generator reproduces the deformed Witt generator entrywise."""
    params = {**_phase_params(phase), "n": n, "k": k, "alpha": alpha}
    try:
        A = make_A_general(n, AParams.specialization(n, k, alpha), alpha, phase)
        L = make_L_deformed(n, k, alpha, phase)
    except DegenerateParameterError as exc:
        return _inapplicable("generalized_specialization", params, tol, exc)
    return CheckReport("generalized_specialization", params, A.distance(L), tol)


def check_implicit_additive(n, k, alpha, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """a-number generator at ``a = i*phi0`` equals the q-number generator.

    This is an identity because ``sinh(i x) = i sin(x)``.
    """
    params = {**_phase_params(phase), "n": n, "k": k, "alpha": alpha}
    try:
        M = make_M_implicit_additive(n, k, alpha, phase)
        L = make_L_deformed(n, k, alpha, phase)
    except DegenerateParameterError as exc:
        return _inapplicable("implicit_additive", params, tol, exc)
    return CheckReport("implicit_additive", params, M.distance(L), tol)


def check_symmetry(n, k, alpha, phase: UnitPhase, tol=DEFAULT_TOL) -> CheckReport:
    """Real entries and ``adjoint(L_{n,k}) = L_{-n,k}``."""
    params = {**_phase_params(phase), "n": n, "k": k, "alpha": alpha}
    try:
        L, Lm = make_L_deformed(n, k, alpha, phase), make_L_deformed(-n, k, alpha, phase)
    except DegenerateParameterError as exc:
        return _inapplicable("generator_symmetry", params, tol, exc)
    parts = {"imag": float(np.max(np.abs(L.matrix.imag))), "adjoint": L.adjoint().distance(Lm)}
    return CheckReport("generator_symmetry", params, max(parts.values()), tol, parts=parts)


def limit_entry_errors(n, k, alpha, Ns: Sequence[int], modes: Sequence[int]):
    """Max entrywise gap between deformed and undeformed generators on fixed modes.

    Returns ``(phi0 values, errors)``; modes whose image leaves the canonical
    window for some ``N`` are rejected up front.
    """
    phis, errs = [], []
    for N in Ns:
        phase = UnitPhase.lattice(N)
        cm = canonical_modes(N)
        lo, hi = -(N // 2), N - N // 2
        idx = []
        for m in modes:
            if not (lo <= m < hi and lo <= m + n < hi):
                raise ValueError(f"mode {m} is not wrap-free for N={N}, n={n}")
            idx.append(int(np.flatnonzero(cm == m)[0]))
        D = make_L_deformed(n, k, alpha, phase).matrix - make_L_undeformed(n, alpha, phase).matrix
        errs.append(float(np.max(np.abs(D[:, idx]))))
        phis.append(phase.phi0)
    return np.array(phis), np.array(errs)
