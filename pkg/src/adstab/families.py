"""Trajectory classes beyond GHZ-X.

Dicke and anti-W inputs, real generalized-W states (and the two-qubit Family B
``alpha|01> + beta|10>``), two-term basis cats, the vacuum plus punctured
affine-plane slice and its pairing-Hamiltonian realization, the
insulator/generator split of pure stabilizer inputs, and the Haar
endpoint-only statistics.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from . import config
from .ghzx import ghzx_point, membership_closed, thresholds
from .qcore import (
    DensityOperator,
    _mat,
    amplitude_damping_kraus,
    apply_local_channel,
    dicke_vector,
    pure_density,
)
from .stabset import (
    StabilizerState,
    enumerate_stabilizer_states,
    materialize,
    membership_lp,
    octahedron_membership,
    pair_obstruction,
    row_dominance_failure,
)

__all__ = [
    "UNVERIFIED_INSULATOR_COUNTS",
    "DickeSpec",
    "ClassificationRecord",
    "dicke_trajectory",
    "antiw_threshold",
    "antiw_membership",
    "antiw3_decomposition",
    "antiw3_rom_upper",
    "antiw4_decomposition",
    "antiw4_even_block_witness",
    "DickeObstruction",
    "interior_dicke_obstruction",
    "generalized_w_membership",
    "generalized_w_vector",
    "family_b_rom",
    "two_term_cat_analysis",
    "affine_plane_slice",
    "pairing_hamiltonian",
    "pairing_ground_state",
    "classify_stabilizer",
    "classify_all",
    "generator_dynamics_check",
    "haar_endpoint_test",
]


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(s) -> int:
    if isinstance(s, str):
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {s!r}")
        return int(s, 2)
    return int(s)


# --------------------------------------------------------------------------
# Dicke and anti-W


@dataclass(frozen=True)
class DickeSpec:
    n: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError("need 0 <= k <= n")

    def support(self) -> list[int]:
        return [x for x in range(2**self.n) if _popcount(x) == self.k]


def dicke_trajectory(n: int, k: int, gamma: float) -> DensityOperator:
    """Damped Dicke state built as a sum over jump branches ``K_J``.

    ``K_J`` with jumps on the sites in ``J`` sends a basis string ``v`` with
    ``J`` inside its support to ``gamma^(|J|/2) q^((|v|-|J|)/2) |v minus J>``
    and annihilates every other string.
    """
    if n > 6:
        raise ValueError("dicke_trajectory supports n <= 6")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    spec = DickeSpec(n, k)
    q = 1.0 - gamma
    d = 2**n
    amp = 1.0 / math.sqrt(math.comb(n, k))
    rho = np.zeros((d, d))
    for J in range(d):  # bitmask of jump sites
        j = _popcount(J)
        if j > k:
            continue
        branch = np.zeros(d)
        fac = amp * math.sqrt(gamma**j * q ** (k - j))
        for v in spec.support():
            if v & J == J:
                branch[v ^ J] += fac
        rho += np.outer(branch, branch)
    return DensityOperator(rho)


def antiw_threshold(n: int) -> float:
    """Exact magic-death threshold of ``|D_n^(n-1)>`` for ``n`` in {3, 4}."""
    if n == 3:
        return (math.sqrt(3.0) - 1.0) / 2.0
    if n == 4:
        return 0.5
    raise ValueError("exact anti-W thresholds are known only for n = 3 and n = 4")


def antiw_membership(n: int, gamma: float):
    """Stabilizer membership of the damped anti-W state ``|D_n^(n-1)>``.

    Exact for ``n`` in {3, 4}.  For ``n >= 5`` only the one-sided statement is
    available: returns ``False`` for ``gamma < 1/2``, ``True`` at ``gamma = 1``
    and ``None`` (undetermined) otherwise.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if gamma == 1.0:
        return True
    if n in (3, 4):
        return gamma >= antiw_threshold(n)
    if n < 3:
        raise ValueError("anti-W needs n >= 3")
    return False if gamma < 0.5 else None


def _ket(n, strings, coeffs=None):
    v = np.zeros(2**n, dtype=complex)
    coeffs = [1.0] * len(strings) if coeffs is None else coeffs
    for s, c in zip(strings, coeffs):
        v[_bits(s)] += c
    return v / np.linalg.norm(v)


def antiw3_decomposition(gamma: float) -> list[tuple[float, np.ndarray]]:
    """Explicit weights and stabilizer vectors summing to ``rho_{3,2}(gamma)``.

    Pairs ``|T_ij>`` carry ``2 gamma q / 3``, the parity-even states
    ``|S_+->`` carry ``2 q^2 / 3`` and the vacuum carries
    ``gamma^2 - q^2 / 3``.  All weights are nonnegative iff
    ``gamma >= (sqrt 3 - 1) / 2``.
    """
    q = 1.0 - gamma
    out = []
    for pair in (("001", "010"), ("001", "100"), ("010", "100")):
        out.append((2 * gamma * q / 3, _ket(3, pair)))
    for sgn in (1, -1):
        out.append((2 * q * q / 3, _ket(3, ["000", "011", "101", "110"], [sgn, 1, 1, 1])))
    out.append((gamma * gamma - q * q / 3, _ket(3, ["000"])))
    return out


def antiw3_rom_upper(gamma: float) -> float:
    """Upper bound ``1 + (2/3) max(0, (1-gamma)^2 - 3 gamma^2)`` on the robustness
    of the damped three-qubit anti-W state."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    return 1.0 + (2.0 / 3.0) * max(0.0, (1.0 - gamma) ** 2 - 3.0 * gamma**2)


def _dicke_on(n, sites, j):
    """Dicke state of weight ``j`` on the listed sites, other sites in |0>."""
    strings = []
    for ones in itertools.combinations(sites, j):
        strings.append(sum(1 << (n - 1 - s) for s in ones))
    return _ket(n, strings)


def antiw4_decomposition(gamma: float) -> list[tuple[float, np.ndarray]]:
    """Stabilizer decomposition of ``rho_{4,3}(gamma)``; weights are all
    nonnegative iff ``gamma >= 1/2``.

    Even sector: ``|S_{L,+-}> = (+-|0000> + sqrt3 |D_L^2>)/2`` with weight
    ``gamma q^2 / 2`` each, plus ``(gamma^3 - gamma q^2)`` on the vacuum.
    Odd sector: the eight-term states ``|chi_s>`` weighted ``q^3/2`` (two
    uniform sign patterns) and ``q^3/6`` (six with two minus signs), plus
    ``(q/6)(3 gamma^2 - q^2)`` on each two-point state ``|D_L^1>``.
    """
    n = 4
    q = 1.0 - gamma
    out = []
    for L in itertools.combinations(range(4), 3):
        dl = _dicke_on(n, L, 2)
        for sgn in (1, -1):
            v = sgn * _ket(n, ["0000"]) + math.sqrt(3) * dl
            out.append((gamma * q * q / 2, v / np.linalg.norm(v)))
    out.append((gamma**3 - gamma * q * q, _ket(n, ["0000"])))
    t = [15 ^ (1 << (3 - i)) for i in range(4)]
    e = [1 << (3 - i) for i in range(4)]
    for s in itertools.product((1, -1), repeat=4):
        if math.prod(s) != 1:
            continue
        w = q**3 / 2 if len(set(s)) == 1 else q**3 / 6
        out.append((w, _ket(n, t + e, [1, 1, 1, 1, *s])))
    for L in itertools.combinations(range(4), 2):
        out.append((q / 6 * (3 * gamma**2 - q * q), _dicke_on(n, L, 1)))
    return out


def antiw4_even_block_witness(gamma: float) -> float:
    """``Tr(W_E * even block)`` of ``rho_{4,3}(gamma)``.

    The even-parity block is ``gamma^3 |0000><0000| + 3 gamma q^2 Omega_2``; a
    negative value certifies that the state is outside the stabilizer polytope.
    """
    from .stabset import we_witness_value

    rho = np.asarray(dicke_trajectory(4, 3, gamma))
    even = np.array([_popcount(x) % 2 == 0 for x in range(16)])
    blk = np.where(np.outer(even, even), rho, 0.0)
    tr = np.trace(blk).real
    if tr == 0:
        return 0.0
    return tr * we_witness_value(blk / tr)


@dataclass(frozen=True)
class DickeObstruction:
    """Result of the postselection argument for interior Dicke states.

    ``inside`` is False when the reduced W block fails row dominance;
    ``failing_row`` names the offending single-excitation row.
    """

    inside: bool
    failing_row: int | None
    reduction_probability: float
    expected_probability: float
    reduction_residual: float

    def __bool__(self):
        return self.inside


def interior_dicke_obstruction(n: int, k: int, gamma: float) -> DickeObstruction:
    """Outside certificate for ``|D_n^k>``, ``2 <= k <= n-2``, via postselecting
    the first ``k-1`` qubits on ``|1>`` and testing the resulting damped W state."""
    if not (2 <= k <= n - 2):
        raise ValueError("need 2 <= k <= n-2")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if gamma == 1.0:
        return DickeObstruction(True, None, 0.0, 0.0, 0.0)
    s = k - 1
    rho = np.asarray(dicke_trajectory(n, k, gamma))
    rest = n - s
    top = (2**s - 1) << rest
    idx = [top | y for y in range(2**rest)]
    blk = rho[np.ix_(idx, idx)]
    prob = float(np.trace(blk).real)
    expected = (1.0 - gamma) ** s * math.comb(n - s, k - s) / math.comb(n, k)
    red = blk / prob
    resid = float(np.max(np.abs(red - np.asarray(dicke_trajectory(rest, 1, gamma)))))
    row = row_dominance_failure(red)
    return DickeObstruction(row is None, row, prob, expected, resid)


# --------------------------------------------------------------------------
# generalized W and Family B


def generalized_w_vector(weights: Sequence[float]) -> np.ndarray:
    """``sum_i w_i |e_i>`` with ``e_i`` the string with a single 1 at site i."""
    w = np.asarray(weights, dtype=float)
    n = len(w)
    v = np.zeros(2**n)
    for i, wi in enumerate(w):
        v[1 << (n - 1 - i)] = wi
    return v


def generalized_w_membership(weights: Sequence[float], gamma: float) -> bool:
    """Stabilizer membership of the damped real generalized-W state.

    The single-excitation block is ``B_ij = (1-gamma) w_i w_j``; membership is
    row dominance ``|w_i| >= sum_{j != i} |w_j|`` over the rows with
    ``w_i != 0``, which only one- or two-site equal-weight inputs satisfy.
    """
    w = np.abs(np.asarray(weights, dtype=float))
    if abs(np.sum(w * w) - 1.0) > 1e-12:
        raise ValueError("weights must be normalized in square")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if gamma == 1.0:
        return True
    q = 1.0 - gamma
    B = q * np.outer(w, w)
    off = B.sum(axis=1) - np.diag(B)
    return bool(np.all(np.diag(B) >= off - 1e-12))


def family_b_rom(alpha: float, gamma: float) -> float:
    """Robustness ``1 + 2(1-gamma)[alpha beta - min(alpha^2, beta^2)]`` of the
    damped ``alpha|01> + beta|10>``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    b = math.sqrt(1.0 - alpha * alpha)
    return 1.0 + 2.0 * (1.0 - gamma) * (alpha * b - min(alpha * alpha, b * b))


# --------------------------------------------------------------------------
# two-term cats


def two_term_cat_analysis(x, y, alpha: float, gamma: float) -> dict:
    """Classify ``alpha|x> + beta|y>`` under local damping.

    Bitwise-comparable pairs factor into a GHZ state on the differing sites
    times a computational-basis product, so membership follows the GHZ-X
    closed form with the amplitude of the lower string.  Incomparable pairs
    saturate ``rho_xx rho_yy = |rho_xy|^2`` for every ``gamma < 1``; they can
    meet the stabilizer polytope only where ``alpha^2 q^|x| = beta^2 q^|y|``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not isinstance(x, str) or not isinstance(y, str) or len(x) != len(y):
        raise ValueError("x and y must be bitstrings of equal length")
    xi, yi = _bits(x), _bits(y)
    if xi == yi:
        raise ValueError("x and y must differ")
    n = len(x)
    b = math.sqrt(1.0 - alpha * alpha)
    comparable = (xi & yi) == xi or (xi & yi) == yi
    out = {"comparable": comparable, "n": n}
    if comparable:
        d = _popcount(xi ^ yi)
        a_low = alpha if (xi & yi) == xi else b
        out["reduced_d"] = d
        out["reduced_alpha"] = a_low
        if d == 1:
            q = 1.0 - gamma
            bl = math.sqrt(1.0 - a_low * a_low)
            bloch = (2 * a_low * bl * math.sqrt(q), 0.0, a_low**2 + bl * bl * gamma - bl * bl * q)
            out["membership"] = octahedron_membership(bloch) or gamma == 1.0
            out["thresholds"] = None
        else:
            out["membership"] = membership_closed(ghzx_point(d, a_low, gamma))
            out["thresholds"] = thresholds(d, a_low)
        return out
    out["reduced_d"] = None
    v = np.zeros(2**n)
    v[xi], v[yi] = alpha, b
    rho = np.asarray(apply_local_channel(pure_density(v), amplitude_damping_kraus(gamma)))
    sat = abs(rho[xi, xi].real * rho[yi, yi].real - abs(rho[xi, yi]) ** 2)
    out["saturation_residual"] = float(sat)
    wx, wy = _popcount(xi), _popcount(yi)
    cand = None
    if wx != wy:
        qv = (b * b / (alpha * alpha)) ** (1.0 / (wx - wy))
        if 0.0 < qv <= 1.0:
            cand = 1.0 - qv
    elif math.isclose(alpha, b, rel_tol=1e-12):
        cand = "all"
    out["candidate_gamma"] = cand
    if gamma == 1.0:
        out["membership"] = True
    elif pair_obstruction(rho) is not None:
        out["membership"] = False
    else:
        out["membership"] = bool(membership_lp(rho)) if n <= 3 else None
    return out


# --------------------------------------------------------------------------
# punctured affine plane


def _validate_plane(n: int, L) -> tuple[list[int], int]:
    words = sorted({_bits(s) for s in L} - {0})
    if len(words) != 3:
        raise ValueError("L must contain exactly three nonzero words")
    if any(w >= 2**n for w in words):
        raise ValueError("word longer than n")
    if words[0] ^ words[1] != words[2]:
        raise ValueError("L is not closed under addition")
    ks = {_popcount(w) for w in words}
    if len(ks) != 1:
        raise ValueError("nonzero words of L must share one Hamming weight")
    return words, ks.pop()


def affine_plane_slice(n: int, L, alpha: float, gamma: float) -> dict:
    """Vacuum plus punctured affine plane ``alpha|0^n> + beta|D_L>``.

    ``L`` lists the three nonzero words (bitstrings or ints) of a
    two-dimensional linear code of constant weight ``k``.  Membership is
    ``p_0 >= p_L / 3`` and ``c_L <= p_L / sqrt 3``, with
    ``p_0 = alpha^2 + beta^2 gamma^k``, ``p_L = beta^2 q^k`` and
    ``c_L = alpha beta q^(k/2)``.
    """
    words, k = _validate_plane(n, L)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    b = math.sqrt(1.0 - alpha * alpha)
    r = alpha / b
    q = 1.0 - gamma
    p0 = alpha**2 + b * b * gamma**k
    pL = b * b * q**k
    cL = alpha * b * q ** (k / 2)
    s3 = math.sqrt(3.0)
    inside = gamma == 1.0 or (
        p0 >= pL / 3 - config.CLOSED_FORM_SLACK and cL <= pL / s3 + config.CLOSED_FORM_SLACK
    )
    gm = gp = None
    if math.isclose(s3 * r, 1.0, rel_tol=1e-12):
        gm = gp = 0.0
    elif s3 * r < 1.0:
        gp = -math.expm1((2.0 / k) * math.log(s3 * r))
        gm = bisect(lambda g: r * r + g**k - (1 - g) ** k / 3, 0.0, gp, xtol=config.ROOT_XTOL, maxiter=config.ROOT_MAXITER)
    return {
        "k": k,
        "words": words,
        "membership": inside,
        "gamma_minus": gm,
        "gamma_plus": gp,
        "coefficients": (p0, pL, cL),
    }


def affine_plane_vector(n: int, L, alpha: float) -> np.ndarray:
    words, _ = _validate_plane(n, L)
    b = math.sqrt(1.0 - alpha * alpha)
    v = np.zeros(2**n)
    v[0] = alpha
    for w in words:
        v[w] = b / math.sqrt(3.0)
    return v


# --------------------------------------------------------------------------
# pairing Hamiltonian


def pairing_hamiltonian(mu: float, g: float) -> np.ndarray:
    """``mu (N - 2)^2 - g sum_{i<j} (s+_i s+_j + s-_i s-_j)`` on three qubits,
    with ``s+ = |1><0|``."""
    n = 3
    d = 2**n
    H = np.zeros((d, d))
    for x in range(d):
        H[x, x] = mu * (_popcount(x) - 2) ** 2
    for i, j in itertools.combinations(range(n), 2):
        m = (1 << (n - 1 - i)) | (1 << (n - 1 - j))
        for x in range(d):
            if x & m == 0:  # both sites empty: pair creation
                H[x | m, x] -= g
                H[x, x | m] -= g
    return H


def pairing_ground_state(xi: float, mu: float = 1.0) -> dict:
    """Ground state of the pairing Hamiltonian at ``xi = g / mu``.

    For ``0 < xi < sqrt 3 / 2`` the ground state is
    ``alpha|000> + beta|D_3^2>`` with ``alpha/beta = sqrt3 xi / (2 + sqrt(4 + 3 xi^2))``;
    this is confirmed by dense diagonalization (``overlap``).
    """
    if xi <= 0:
        raise ValueError("xi must be positive")
    g = xi * mu
    e_even = 2 * mu - math.sqrt(4 * mu * mu + 3 * g * g)
    e_odd = mu - math.sqrt(3.0) * g
    r = math.sqrt(3.0) * xi / (2.0 + math.sqrt(4.0 + 3.0 * xi * xi))
    alpha = r / math.sqrt(1 + r * r)
    beta = 1.0 / math.sqrt(1 + r * r)
    target = np.zeros(8)
    target[0] = alpha
    for w in (0b011, 0b101, 0b110):
        target[w] = beta / math.sqrt(3.0)
    evals, evecs = np.linalg.eigh(pairing_hamiltonian(mu, g))
    gs = evecs[:, 0]
    overlap = float(abs(gs @ target) ** 2)
    valid = xi < math.sqrt(3.0) / 2.0
    return {
        "valid": valid,
        "r": r,
        "alpha": alpha,
        "state": target if valid else gs,
        "energy": e_even if valid else float(evals[0]),
        "E_even": e_even,
        "E_odd": e_odd,
        "numeric_energy": float(evals[0]),
        "gap": float(evals[1] - evals[0]),
        "overlap": overlap,
    }


# --------------------------------------------------------------------------
# insulators and generators

#: Insulator counts for n = 5, 6 as quoted, not reproduced by enumeration here.
UNVERIFIED_INSULATOR_COUNTS = {5: 1432, 6: 17624}


@dataclass(frozen=True)
class ClassificationRecord:
    state: StabilizerState
    label: str
    weight_profile: frozenset


def classify_stabilizer(stab: StabilizerState) -> ClassificationRecord:
    """Insulator iff every support string has the same Hamming weight."""
    prof = frozenset(_popcount(x) for x in stab.support())
    return ClassificationRecord(stab, "insulator" if len(prof) == 1 else "generator", prof)


def classify_all(n: int) -> dict:
    """``{"insulator": count, "generator": count}`` over all n-qubit states."""
    counts = {"insulator": 0, "generator": 0}
    for s in enumerate_stabilizer_states(n):
        counts[classify_stabilizer(s).label] += 1
    return counts


def generator_dynamics_check(stab: StabilizerState, gamma_grid: Sequence[float]) -> list[tuple]:
    """Membership verdict along the damped trajectory of a pure stabilizer input.

    Returns ``(gamma, inside, method)`` tuples; ``method`` is ``"vertex"``,
    ``"pair"`` (outside by the pair-coherence obstruction) or ``"lp"``.
    """
    if stab.n > 3:
        raise ValueError("generator_dynamics_check supports n <= 3")
    psi = pure_density(materialize(stab))
    out = []
    for g in gamma_grid:
        if g == 1.0:
            out.append((g, True, "vertex"))
            continue
        rho = apply_local_channel(psi, amplitude_damping_kraus(g))
        if pair_obstruction(rho) is not None:
            out.append((g, False, "pair"))
        else:
            out.append((g, bool(membership_lp(rho)), "lp"))
    return out


# --------------------------------------------------------------------------
# Haar-random inputs


def haar_endpoint_test(n: int, samples: int, seed: int, gamma_grid: Sequence[float] | None = None) -> dict:
    """Fraction of Haar-random inputs that violate the pair obstruction at
    ``(x, 1^n)`` for every ``gamma < 1`` on the grid.

    Uses ``(rho)_{yy} = |a_y|^2 q^n`` and
    ``|(rho)_{xy}| = |a_x||a_y| q^((|x|+n)/2)`` for ``y = 1^n``, so no channel is
    applied.  Each sample draws from its own stream spawned from ``seed``.
    """
    if not 1 <= n <= 6:
        raise ValueError("haar_endpoint_test supports n <= 6")
    if gamma_grid is None:
        gamma_grid = np.linspace(0.0, 0.99, 100)
    grid = np.asarray([g for g in gamma_grid if g < 1.0], dtype=float)
    d = 2**n
    y = d - 1
    wts = np.array([_popcount(x) for x in range(d)])
    rest = np.arange(d) != y
    streams = np.random.SeedSequence(seed).spawn(samples)
    q = 1.0 - grid
    hits = 0
    for ss in streams:
        rng = np.random.default_rng(ss)
        a = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        a /= np.linalg.norm(a)
        mod = np.abs(a)
        # |rho_xy| - rho_yy for every x != y and grid point
        lhs = mod[rest][:, None] * mod[y] * q[None, :] ** ((wts[rest][:, None] + n) / 2)
        rhs = mod[y] ** 2 * q**n
        viol = np.any(lhs > rhs[None, :], axis=0)  # analytic entries, no slack needed
        hits += bool(np.all(viol))
    frac = hits / samples
    p = 1.0 - 2.0**-n
    sigma = math.sqrt(p * (1 - p) / samples)
    return {
        "n": n,
        "samples": samples,
        "seed": seed,
        "violating": hits,
        "fraction": frac,
        "bound": p,
        "sigma": sigma,
        "passes": frac >= p - 3 * sigma,
    }
