"""Pure stabilizer states in affine form, LP oracles over their convex hull,
and closed-form witnesses.

Every pure n-qubit stabilizer state can be written, up to a global phase, as

    |psi> = 2^{-m/2} sum_{u in F_2^m} i^{l.u} (-1)^{sum_{i<j} Q_ij u_i u_j} |t + u G>

with ``G`` an m x n generator matrix of a linear code, ``t`` a coset
representative, ``l`` in Z_4^m and ``Q`` a strictly upper-triangular bit
matrix.  Taking ``G`` in reduced row-echelon form and ``t`` zero on the pivot
columns makes the parametrization unique, so the enumeration below is
duplicate-free by construction.  A hash of the phase-fixed amplitude vector is
kept as a second line of defence.

The LP oracles work in Pauli-expectation coordinates.  Each stabilizer state has
``<P>`` in ``{0, +1, -1}`` for every Pauli string ``P``, so the constraint
matrix is integer valued.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from . import config
from .qcore import (
    StateLike,
    _label_xz_bits,
    _mat,
    _nqubits,
    _popcount,
    _walsh_hadamard,
    pauli_moments,
)

__all__ = [
    "StabilizerState",
    "StabilizerDictionary",
    "LpCertificate",
    "MembershipResult",
    "LpSolverError",
    "stabilizer_count",
    "enumerate_stabilizer_states",
    "materialize",
    "phase_fixed_key",
    "is_stabilizer_vector",
    "stabilizer_dictionary",
    "membership_lp",
    "robustness_lp",
    "pair_obstruction",
    "ghzx_witness",
    "ghzx_witness_value",
    "validate_witness_feasibility",
    "row_dominance",
    "row_dominance_failure",
    "octahedron_membership",
    "single_qubit_rom",
    "we_witness_matrix",
    "we_witness_value",
]


class LpSolverError(RuntimeError):
    """The LP backend did not reach an optimal solution.

    Distinct from an "outside" verdict: it says nothing about membership.
    """


# --------------------------------------------------------------------------
# affine-form records


@dataclass(frozen=True)
class StabilizerState:
    """Canonical affine-support record of a pure stabilizer state.

    Attributes
    ----------
    n : int
        Number of qubits.
    m : int
        Dimension of the support (``2^m`` nonzero amplitudes).
    basis : tuple of int
        ``m`` bitmasks (qubit 0 = most significant bit) spanning the support
        directions, in reduced row-echelon form.
    offset : int
        Coset representative, zero on pivot columns.
    linear_phase : tuple of int
        Z_4 exponents, one per basis direction.
    quadratic_phase : tuple of int
        Bits ``Q_ij`` for ``i < j`` in lexicographic order.
    """

    n: int
    m: int
    basis: tuple
    offset: int
    linear_phase: tuple
    quadratic_phase: tuple

    def __post_init__(self):
        if len(self.basis) != self.m or len(self.linear_phase) != self.m:
            raise ValueError("basis/linear_phase length must equal m")
        if len(self.quadratic_phase) != self.m * (self.m - 1) // 2:
            raise ValueError("quadratic_phase must have m(m-1)/2 bits")
        if _rank(self.basis) != self.m:
            raise ValueError("basis rows are not linearly independent")

    def support(self) -> list[int]:
        out = []
        for u in range(2**self.m):
            x = self.offset
            for j in range(self.m):
                if (u >> j) & 1:
                    x ^= self.basis[j]
            out.append(x)
        return out

    def bitstrings(self) -> dict:
        """Record with bitstring fields, as emitted by the ``enumerate`` command."""
        fmt = lambda x: format(x, f"0{self.n}b")
        return {
            "n": self.n,
            "m": self.m,
            "basis": [fmt(b) for b in self.basis],
            "offset": fmt(self.offset),
            "linear_phase": "".join(str(d) for d in self.linear_phase),
            "quadratic": "".join(str(d) for d in self.quadratic_phase),
        }


def _rank(rows: Sequence[int]) -> int:
    rows = list(rows)
    r = 0
    for bit in reversed(range(max((x.bit_length() for x in rows), default=0))):
        piv = next((i for i in range(r, len(rows)) if (rows[i] >> bit) & 1), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and (rows[i] >> bit) & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


def _rref_subspaces(n: int, m: int):
    """Yield ``(rows, pivot_mask)`` for every m-dim subspace of F_2^n in RREF.

    Columns are the bit positions n-1 (qubit 0) down to 0.  Pivots are chosen
    left to right; each row has zeros in the other pivot columns and in all
    columns to the left of its own pivot.
    """
    cols = list(range(n - 1, -1, -1))  # leftmost column first
    for piv in itertools.combinations(range(n), m):
        pivbits = [cols[p] for p in piv]
        free = []  # for each row, the non-pivot columns to the right of its pivot
        for i, p in enumerate(piv):
            free.append([cols[c] for c in range(p + 1, n) if c not in piv])
        total = sum(len(f) for f in free)
        for fill in range(2**total):
            rows = []
            k = 0
            for i in range(m):
                row = 1 << pivbits[i]
                for b in free[i]:
                    if (fill >> k) & 1:
                        row |= 1 << b
                    k += 1
                rows.append(row)
            mask = 0
            for b in pivbits:
                mask |= 1 << b
            yield tuple(rows), mask


def stabilizer_count(n: int) -> int:
    """``2^n prod_{j=1}^n (2^j + 1)``."""
    return 2**n * math.prod(2**j + 1 for j in range(1, n + 1))


def enumerate_stabilizer_states(n: int) -> list[StabilizerState]:
    """All pure n-qubit stabilizer states (``1 <= n <= 4``), up to global phase."""
    if not 1 <= n <= 4:
        raise ValueError("enumeration is supported for 1 <= n <= 4")
    out = []
    for m in range(n + 1):
        npairs = m * (m - 1) // 2
        for rows, pivmask in _rref_subspaces(n, m):
            nonpiv = [b for b in range(n) if not (pivmask >> b) & 1]
            for tbits in range(2 ** len(nonpiv)):
                t = 0
                for k, b in enumerate(nonpiv):
                    if (tbits >> k) & 1:
                        t |= 1 << b
                for lin in itertools.product(range(4), repeat=m):
                    for quad in itertools.product(range(2), repeat=npairs):
                        out.append(StabilizerState(n, m, rows, t, lin, quad))
    return out


_I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _amplitudes(stab: StabilizerState) -> np.ndarray:
    m = stab.m
    vec = np.zeros(2**stab.n, dtype=complex)
    pairs = list(itertools.combinations(range(m), 2))
    amp = 2.0 ** (-m / 2)
    for u in range(2**m):
        ub = [(u >> j) & 1 for j in range(m)]
        x = stab.offset
        for j in range(m):
            if ub[j]:
                x ^= stab.basis[j]
        e4 = sum(l * b for l, b in zip(stab.linear_phase, ub)) % 4
        e2 = sum(q * ub[i] * ub[j] for q, (i, j) in zip(stab.quadratic_phase, pairs)) % 2
        vec[x] = amp * _I_POWERS[e4] * (1 - 2 * e2)
    return vec


def materialize(stab: StabilizerState) -> np.ndarray:
    """Amplitude vector of ``stab`` (unit norm, ``2^m`` equal-modulus entries)."""
    return _amplitudes(stab)


def phase_fixed_key(vec: np.ndarray) -> bytes:
    """Hashable key of a state vector that ignores the global phase."""
    k = np.flatnonzero(np.abs(vec) > 1e-9)[0]
    v = vec * (abs(vec[k]) / vec[k])
    # adding 0.0 folds -0.0 into 0.0 so equal vectors hash equally
    return (np.round(v, 9) + 0.0).tobytes()


def is_stabilizer_vector(vec) -> bool:
    """Membership of a pure state (any global phase) in the enumerated set."""
    vec = np.asarray(vec, dtype=complex)
    n = _nqubits(vec.size)
    return phase_fixed_key(vec / np.linalg.norm(vec)) in _dictionary_keys(n)


@functools.lru_cache(maxsize=None)
def _dictionary_keys(n: int) -> frozenset:
    return frozenset(phase_fixed_key(v) for v in stabilizer_dictionary(n).amplitudes)


# --------------------------------------------------------------------------
# dictionary with Pauli table


def _pauli_columns(amps: np.ndarray) -> np.ndarray:
    """Pauli expectations (label order) for a batch of pure states ``amps[s, x]``."""
    d = amps.shape[1]
    n = _nqubits(d)
    x = np.arange(d)
    tab = np.empty((amps.shape[0], d, d), dtype=complex)
    for a in range(d):
        g = amps[:, x] * amps[:, x ^ a].conj()
        tab[:, a, :] = _walsh_hadamard(g)
    la, lb = _label_xz_bits(n)
    phase = (1j) ** (_popcount(la & lb) % 4)
    return np.real(phase[None, :] * tab[:, la, lb])


@dataclass(frozen=True)
class StabilizerDictionary:
    """Enumerated states with their amplitude vectors and Pauli table.

    ``pauli_table[p, j]`` is ``<P_p>`` on state ``j`` as an exact integer in
    ``{-1, 0, 1}``; row 0 is the identity.
    """

    n: int
    states: tuple = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)
    pauli_table: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.states)

    def projector(self, j: int) -> np.ndarray:
        v = self.amplitudes[j]
        return np.outer(v, v.conj())


@functools.lru_cache(maxsize=None)
def stabilizer_dictionary(n: int) -> StabilizerDictionary:
    """Cached dictionary for ``n <= 4`` with deduplication and integrality checks."""
    states = enumerate_stabilizer_states(n)
    amps = np.stack([_amplitudes(s) for s in states])
    keys = {phase_fixed_key(v) for v in amps}
    if len(keys) != len(states) or len(states) != stabilizer_count(n):
        raise RuntimeError("stabilizer enumeration produced duplicates or a wrong count")
    cols = _pauli_columns(amps)
    tab = np.rint(cols)
    if np.max(np.abs(tab - cols)) > 1e-9:
        raise RuntimeError("non-integer Pauli expectation on an enumerated state")
    tab = tab.astype(np.int8).T.copy()
    tab.setflags(write=False)
    amps.setflags(write=False)
    return StabilizerDictionary(n, tuple(states), amps, tab)


def _resolve_dictionary(rho_m: np.ndarray, dictionary) -> StabilizerDictionary:
    n = _nqubits(rho_m.shape[0])
    if dictionary is None:
        return stabilizer_dictionary(n)
    if isinstance(dictionary, StabilizerDictionary):
        d = dictionary
    else:
        states = list(dictionary)
        amps = np.stack([_amplitudes(s) for s in states])
        tab = np.rint(_pauli_columns(amps)).astype(np.int8).T
        d = StabilizerDictionary(states[0].n, tuple(states), amps, tab)
    if d.n != n:
        raise ValueError(f"state has n={n} but dictionary has n={d.n}")
    return d


# --------------------------------------------------------------------------
# LP oracles


@dataclass(frozen=True)
class MembershipResult:
    """Outcome of the feasibility LP.

    ``inside`` is the verdict; ``slack`` the optimal l1 constraint violation;
    ``weights`` a sparse ``{index: weight}`` convex decomposition when inside.
    """

    inside: bool
    slack: float
    weights: dict | None = None

    def __bool__(self):
        return self.inside


@dataclass(frozen=True)
class LpCertificate:
    """Robustness-of-magic certificate.

    Attributes
    ----------
    value : float
        Minimal ``sum |q_j|``.
    coefficients : dict
        Sparse signed weights ``{dictionary index: q_j}``.
    residual : float
        Max-abs entrywise error of ``sum q_j |s_j><s_j|`` against the input.
    duality_gap : float
        ``|primal - dual|`` as reported by the solver's equality marginals.
    witness : ndarray
        Dual vector in Pauli coordinates (``|W . column| <= 1`` on every state).
    """

    value: float
    coefficients: dict
    residual: float
    duality_gap: float
    witness: np.ndarray = field(repr=False)


_HIGHS_OPTS = {
    "primal_feasibility_tolerance": config.LP_SOLVER_TOL,
    "dual_feasibility_tolerance": config.LP_SOLVER_TOL,
}


def _solve(c, A_eq, b_eq):
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=_HIGHS_OPTS)
    if res.status != 0:
        raise LpSolverError(f"LP did not converge (status {res.status}): {res.message}")
    return res


def _reconstruct(d: StabilizerDictionary, coeffs: dict) -> np.ndarray:
    idx = np.fromiter(coeffs.keys(), dtype=int, count=len(coeffs))
    w = np.fromiter(coeffs.values(), dtype=float, count=len(coeffs))
    a = d.amplitudes[idx]
    return (a.T * w) @ a.conj()


def membership_lp(rho: StateLike, dictionary=None, *, tol: float = config.LP_MEMBERSHIP_TOL) -> MembershipResult:
    """Decide ``rho in conv{stabilizer projectors}`` by a feasibility LP.

    Solves ``min sum(s+ + s-)`` subject to ``T w + s+ - s- = <P>_rho``,
    ``w, s >= 0``, where ``T`` is the Pauli table (its identity row enforces
    ``sum w = 1``).  The state is inside iff the optimum is at most ``tol``.

    Raises
    ------
    LpSolverError
        If the solver stops without an optimal point.
    """
    m = _mat(rho)
    d = _resolve_dictionary(m, dictionary)
    b = pauli_moments(m)
    T = d.pauli_table.astype(float)
    nP, N = T.shape
    I = np.eye(nP)
    A = np.hstack([T, I, -I])
    c = np.concatenate([np.zeros(N), np.ones(2 * nP)])
    res = _solve(c, A, b)
    slack = float(res.fun)
    if slack <= tol:
        w = res.x[:N]
        keep = np.flatnonzero(w > 1e-12)
        return MembershipResult(True, slack, {int(j): float(w[j]) for j in keep})
    return MembershipResult(False, slack, None)


def robustness_lp(rho: StateLike, dictionary=None, *, allow_n4: bool = False) -> LpCertificate:
    """Robustness of magic ``min{ sum|q| : rho = sum q_j sigma_j }``.

    Uses the split ``q = q+ - q-``.  ``n = 4`` (73440 LP columns) needs
    ``allow_n4=True`` and takes of the order of a minute.
    """
    m = _mat(rho)
    n = _nqubits(m.shape[0])
    if n > 4 or (n == 4 and not allow_n4):
        raise ValueError("robustness_lp supports n <= 3 (n = 4 with allow_n4=True)")
    d = _resolve_dictionary(m, dictionary)
    b = pauli_moments(m)
    T = d.pauli_table.astype(float)
    N = T.shape[1]
    A = np.hstack([T, -T])
    res = _solve(np.ones(2 * N), A, b)
    q = res.x[:N] - res.x[N:]
    keep = np.flatnonzero(np.abs(q) > 1e-12)
    coeffs = {int(j): float(q[j]) for j in keep}
    recon = _reconstruct(d, coeffs) if coeffs else np.zeros_like(m)
    residual = float(np.max(np.abs(recon - m)))
    if residual > 1e-6:
        raise LpSolverError(f"robustness LP reconstruction residual {residual:.3g}")
    y = np.asarray(res.eqlin.marginals)
    dual = float(b @ y)
    return LpCertificate(float(res.fun), coeffs, residual, abs(float(res.fun) - dual), y)


# --------------------------------------------------------------------------
# witnesses and closed-form criteria


def pair_obstruction(rho: StateLike, slack: float = config.PAIR_SLACK):
    """First pair ``(x, y)``, ``x < y``, with ``|rho_xy| > min(rho_xx, rho_yy)``.

    Any such pair proves ``rho`` lies outside the stabilizer polytope.  Returns
    ``None`` when no pair violates the bound.
    """
    m = _mat(rho)
    diag = np.real(np.diag(m))
    bound = np.minimum.outer(diag, diag) + slack
    viol = np.triu(np.abs(m) > bound, k=1)
    hits = np.argwhere(viol)
    if hits.size == 0:
        return None
    x, y = hits[0]
    return int(x), int(y)


def ghzx_witness(n: int, s: int, j: int) -> np.ndarray:
    """``W = 1 + s(|0^n><1^n| + h.c.) - 2|j^n><j^n|``."""
    if s not in (1, -1) or j not in (0, 1):
        raise ValueError("need s in {+1, -1} and j in {0, 1}")
    d = 2**n
    w = np.eye(d)
    w[0, d - 1] = w[d - 1, 0] = s
    k = 0 if j == 0 else d - 1
    w[k, k] -= 2
    return w


def ghzx_witness_value(rho: StateLike, s: int, j: int) -> float:
    """``Tr(W_{s,j} rho) = 1 + 2 s Re(c) - 2 p_{j^n}``."""
    m = _mat(rho)
    d = m.shape[0]
    if s not in (1, -1) or j not in (0, 1):
        raise ValueError("need s in {+1, -1} and j in {0, 1}")
    p = m[0, 0] if j == 0 else m[d - 1, d - 1]
    return float(np.real(np.trace(m)) + 2 * s * m[0, d - 1].real - 2 * p.real)


def validate_witness_feasibility(witness: np.ndarray, dictionary) -> bool:
    """True iff ``|<s|W|s>| <= 1 + 1e-12`` for every dictionary state."""
    if isinstance(dictionary, int):
        dictionary = stabilizer_dictionary(dictionary)
    if isinstance(dictionary, StabilizerDictionary):
        amps = dictionary.amplitudes
    else:
        amps = np.stack([_amplitudes(s) for s in dictionary])
    vals = np.einsum("sx,xy,sy->s", amps.conj(), witness, amps).real
    return bool(np.max(np.abs(vals)) <= 1 + 1e-12)


def _single_excitation_block(rho: StateLike):
    m = _mat(rho)
    n = _nqubits(m.shape[0])
    d = m.shape[0]
    w = np.array([bin(i).count("1") for i in range(d)])
    heavy = w >= 2
    if np.any(np.abs(m[heavy][:, :]) > 1e-12) or np.any(np.abs(m[:, heavy]) > 1e-12):
        raise ValueError("state has support outside the zero+single-excitation sectors")
    one = np.flatnonzero(w == 1)
    if np.any(np.abs(m[0, one]) > 1e-12):
        raise ValueError("coherence between the vacuum and single-excitation sector")
    B = m[np.ix_(one, one)]
    if np.max(np.abs(B.imag)) > 1e-12:
        raise ValueError("single-excitation block must be real")
    return B.real


def row_dominance_failure(rho: StateLike):
    """First row ``i`` of the single-excitation block with
    ``B_ii < sum_{j != i} |B_ij|``, or ``None``."""
    B = _single_excitation_block(rho)
    off = np.abs(B).sum(axis=1) - np.abs(np.diag(B))
    bad = np.flatnonzero(np.diag(B) < off - 1e-12)
    return None if bad.size == 0 else int(bad[0])


def row_dominance(rho: StateLike) -> bool:
    """Membership for states living on weights {0, 1} with a real block ``B``:
    inside iff ``B_ii >= sum_{j != i} |B_ij|`` for all ``i``."""
    return row_dominance_failure(rho) is None


def _check_bloch(bloch):
    v = np.asarray(bloch, dtype=float)
    if v.shape != (3,) or np.linalg.norm(v) > 1 + 1e-12:
        raise ValueError("Bloch vector must be a real 3-vector of norm <= 1")
    return v


def octahedron_membership(bloch) -> bool:
    """Single-qubit stabilizer polytope ``|x| + |y| + |z| <= 1``."""
    return bool(np.abs(_check_bloch(bloch)).sum() <= 1 + 1e-12)


def single_qubit_rom(bloch) -> float:
    """``1 + max(0, |x| + |y| + |z| - 1)``."""
    return 1.0 + max(0.0, float(np.abs(_check_bloch(bloch)).sum()) - 1.0)


def _weight2_strings(n=4):
    return [x for x in range(2**n) if bin(x).count("1") == 2]


def we_witness_matrix() -> np.ndarray:
    """Four-qubit witness on ``E = {0000} + weight-2 strings``.

    ``W_E = 1_E + 2|0000><0000| - sum_adjacent (|x><y| + h.c.)
    + sum_opposite (|x><y| + h.c.)``, where two weight-2 strings are adjacent
    when their supports share one site and opposite when disjoint.
    """
    w = np.zeros((16, 16))
    E = [0] + _weight2_strings()
    for x in E:
        w[x, x] = 1.0
    w[0, 0] += 2.0
    two = _weight2_strings()
    for x, y in itertools.combinations(two, 2):
        overlap = bin(x & y).count("1")
        sgn = -1.0 if overlap == 1 else 1.0
        w[x, y] = w[y, x] = sgn
    return w


def we_witness_value(rho: StateLike) -> float:
    """``Tr(W_E rho)``; nonnegative on stabilizer mixtures supported on ``E``."""
    m = _mat(rho)
    if m.shape != (16, 16):
        raise ValueError("we_witness_value needs a four-qubit state")
    E = set([0] + _weight2_strings())
    out = [x for x in range(16) if x not in E]
    if np.max(np.abs(np.real(np.diag(m))[out])) > 1e-12:
        raise ValueError("state leaks outside the support set E")
    return float(np.real(np.trace(we_witness_matrix() @ m)))
