"""Closed forms on the GHZ-X manifold.

A GHZ input ``alpha|0^n> + beta|1^n>`` under homogeneous amplitude damping
stays diagonal except for the single coherence ``c = <0^n|rho|1^n>``.  Writing
``q = 1 - gamma`` and ``r = alpha/beta``,

    P_0 = alpha^2 + beta^2 gamma^n,   P_k = C(n,k) beta^2 q^k gamma^(n-k),
    P_n = beta^2 q^n,                 c   = alpha beta q^(n/2).

The state is a stabilizer mixture iff ``c <= min(P_0, P_n)`` and its
robustness of magic is ``1 + 2 max(0, c - P_0, c - P_n)``.  This module
evaluates those formulas, the thresholds they imply, and the variants under
dephasing, phase twists, general phase-covariant profiles and site-dependent
damping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from . import config
from .qcore import (
    PhaseCovariantProfile,
    amplitude_damping_kraus,
    apply_local_channel,
    complementary_ad_output,
    concurrence,
    ghz_vector,
    negativity,
    partial_transpose,
    pauli_labels,
    pauli_moments,
    pure_density,
)

__all__ = [
    "GhzXPoint",
    "ThresholdSet",
    "ghzx_point",
    "ghzx_density",
    "membership_closed",
    "diamond_membership",
    "rom",
    "rom_closed",
    "alpha_boundaries",
    "thresholds",
    "f_n",
    "window_width_and_bound",
    "resource_mirror_check",
    "slice_witness_n2",
    "dephased_thresholds",
    "dephased_gamma_minus_n2",
    "PhaseTwistReport",
    "phase_twist_analysis",
    "phase_covariant_thresholds",
    "ThresholdAmbiguityError",
    "nonuniform_endpoints",
    "nonuniform_analysis",
    "separable_decomposition_at_death",
    "phase_averaged_tau",
    "facet_minor_mirror",
]


def _beta(alpha: float) -> float:
    return math.sqrt(1.0 - alpha * alpha)


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def _check_gamma(gamma):
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")


def _root(f, lo, hi):
    return bisect(f, lo, hi, xtol=config.ROOT_XTOL, maxiter=config.ROOT_MAXITER)


# --------------------------------------------------------------------------
# points on the manifold


@dataclass(frozen=True)
class GhzXPoint:
    """Weight-resolved populations and endpoint coherence of a GHZ-X state.

    ``populations[k]`` is the total weight on Hamming-weight-``k`` strings,
    spread uniformly over the ``C(n, k)`` strings.
    """

    n: int
    populations: tuple
    coherence: complex
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=float)
        if p.shape != (self.n + 1,):
            raise ValueError("need n+1 weight populations")
        if abs(p.sum() - 1.0) > 1e-12 or np.any(p < -1e-15):
            raise ValueError("populations must be a probability vector")
        if abs(self.coherence) ** 2 > p[0] * p[-1] + 1e-12:
            raise ValueError("endpoint block is not positive semidefinite")

    @property
    def p0(self) -> float:
        return self.populations[0]

    @property
    def pn(self) -> float:
        return self.populations[-1]

    def density(self) -> np.ndarray:
        """Full ``2^n x 2^n`` matrix of this point."""
        n = self.n
        d = 2**n
        w = np.array([bin(x).count("1") for x in range(d)])
        diag = np.array([self.populations[k] / math.comb(n, k) for k in w])
        m = np.diag(diag).astype(complex)
        m[0, d - 1] = self.coherence
        m[d - 1, 0] = np.conj(self.coherence)
        return m


def ghzx_point(n: int, alpha: float, gamma: float, coherence_phase: float = 0.0) -> GhzXPoint:
    """Closed-form point reached from ``alpha|0^n> + beta|1^n>`` at damping ``gamma``.

    ``coherence_phase`` multiplies ``c`` by ``exp(-i * coherence_phase)``,
    which is how the phase-twisted variant enters.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_alpha(alpha)
    _check_gamma(gamma)
    b = _beta(alpha)
    q = 1.0 - gamma
    pops = [math.comb(n, k) * b * b * q**k * gamma ** (n - k) for k in range(n + 1)]
    pops[0] += alpha * alpha
    c = alpha * b * q ** (n / 2)
    if coherence_phase:
        c = complex(c * np.exp(-1j * coherence_phase))
    return GhzXPoint(n, tuple(pops), c, alpha, b, gamma)


def ghzx_density(n: int, alpha: float, gamma: float) -> np.ndarray:
    return ghzx_point(n, alpha, gamma).density()


def diamond_membership(p0: float, p1: float, c: complex, slack: float = config.CLOSED_FORM_SLACK) -> bool:
    """``|Re c| + |Im c| <= min(p0, p1)`` (complex-coherence criterion)."""
    c = complex(c)
    return abs(c.real) + abs(c.imag) <= min(p0, p1) + slack


def membership_closed(point: GhzXPoint) -> bool:
    """Stabilizer membership of a GHZ-X point; the ``gamma = 1`` vertex is inside."""
    if point.gamma == 1.0:
        return True
    return diamond_membership(point.p0, point.pn, point.coherence)


def rom(p0: float, p1: float, c: float) -> float:
    """Robustness of a real GHZ-X state with endpoint block ``[[p0, c], [c, p1]]``."""
    c = complex(c)
    if abs(c.imag) > 1e-15:
        raise ValueError("rom expects a real coherence")
    c = abs(c.real)
    if c * c > p0 * p1 + 1e-12:
        raise ValueError("endpoint block is not positive semidefinite")
    return 1.0 + 2.0 * max(0.0, c - p0, c - p1)


def rom_closed(point: GhzXPoint) -> float:
    return rom(point.p0, point.pn, point.coherence)


# --------------------------------------------------------------------------
# thresholds


def alpha_boundaries(n: int) -> tuple[float, float]:
    """Amplitudes separating the three orderings of ``gamma_-, gamma_e, gamma_+``."""
    a1 = 1.0 / math.sqrt(1.0 + (1.0 + 2.0 ** (2.0 / n)) ** n)
    a2 = 1.0 / math.sqrt(1.0 + 2.0**n)
    return a1, a2


def f_n(n: int, alpha: float, gamma: float, eta: float = 1.0, F: float = 1.0) -> float:
    """``P_0 - F eta^(n/2) c``: negative before magic death, zero at ``gamma_-``."""
    b = _beta(alpha)
    return alpha * alpha + b * b * gamma**n - F * eta ** (n / 2) * alpha * b * (1.0 - gamma) ** (n / 2)


@dataclass(frozen=True)
class ThresholdSet:
    """Threshold damping strengths for one ``(n, alpha)``.

    ``gamma_minus``/``gamma_plus`` are ``None`` when there is no stabilizer
    window.  ``gamma_e``/``gamma_gme`` are capped at 1 (entanglement then
    survives for every ``gamma < 1``).
    """

    n: int
    alpha: float
    gamma_minus: float | None
    gamma_plus: float | None
    gamma_e: float
    gamma_gme: float
    regime: str
    alpha_boundaries: tuple
    eta: float = 1.0


def _regime(alpha: float, a1: float, a2: float) -> str:
    crit = 1.0 / math.sqrt(2.0)
    close = lambda a, b: math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0)
    if close(alpha, a1):
        return "I/II"
    if close(alpha, a2):
        return "II/III"
    if close(alpha, crit):
        return "III/no-window"
    if alpha < a1:
        return "I"
    if alpha < a2:
        return "II"
    if alpha < crit:
        return "III"
    return "no-window"


def _gamma_plus(n, r, scale=1.0):
    # 1 - scale * r^(2/n) without cancellation for small r
    return -math.expm1(math.log(scale) + (2.0 / n) * math.log(r))


def thresholds(n: int, alpha: float) -> ThresholdSet:
    """Magic death/rebirth, entanglement death and GME death thresholds."""
    return dephased_thresholds(n, alpha, 1.0)


def window_width_and_bound(n: int, alpha: float) -> tuple[float, float]:
    """Width ``Delta_n = gamma_+ - gamma_-`` of the stabilizer window and the
    upper bound ``(2/n) r^(2/n - 2) gamma_+^n``.

    The width is solved for directly: with ``delta = gamma_+ - gamma``,
    ``f_n = beta^2 (gamma_+ - delta)^n - alpha^2 [(1 + delta r^(-2/n))^(n/2) - 1]``
    which avoids subtracting two nearly equal thresholds at large ``n``.
    """
    _check_alpha(alpha)
    b = _beta(alpha)
    r = alpha / b
    if r >= 1.0:
        raise ValueError("no stabilizer window for alpha >= 1/sqrt(2)")
    gp = _gamma_plus(n, r)
    s = r ** (-2.0 / n)
    b2, a2 = b * b, alpha * alpha

    def g(delta):
        return b2 * (gp - delta) ** n - a2 * math.expm1((n / 2) * math.log1p(delta * s))

    bound = (2.0 / n) * r ** (2.0 / n - 2.0) * gp**n
    delta = bisect(g, 0.0, gp, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2 * config.ROOT_MAXITER)
    if delta > bound * (1 + 1e-12):
        raise ArithmeticError(f"window width {delta!r} exceeds its bound {bound!r}")
    return delta, bound


def resource_mirror_check(alpha: float, gamma: float) -> tuple[float, float]:
    """Two-qubit identity ``R(gamma) - 1 = ((1-gamma)/gamma) C(1-gamma)`` on the
    reborn branch.  ``C`` is computed from the full damped matrix."""
    _check_alpha(alpha)
    th = thresholds(2, alpha)
    if th.gamma_plus is None or not th.gamma_plus < gamma < 1.0:
        raise ValueError("gamma must lie on the reborn branch (gamma_+, 1)")
    lhs = rom_closed(ghzx_point(2, alpha, gamma)) - 1.0
    ghz = pure_density(ghz_vector(2, alpha))
    conc = concurrence(apply_local_channel(ghz, amplitude_damping_kraus(1.0 - gamma)))
    return lhs, (1.0 - gamma) / gamma * conc


_SLICE = {"II", "IZ", "ZI", "ZZ", "XX", "YY"}


def slice_witness_n2(rho) -> bool:
    """Membership on the symmetric two-qubit X-slice from three expectations:
    ``2|<ZI>| + 2|<XX>| <= 1 + <ZZ>``."""
    mom = pauli_moments(rho)
    labels = pauli_labels(2)
    if len(labels) != len(mom):
        raise ValueError("slice_witness_n2 needs a two-qubit state")
    e = dict(zip(labels, mom))
    off = max(abs(v) for k, v in e.items() if k not in _SLICE)
    if off > 1e-10 or abs(e["ZI"] - e["IZ"]) > 1e-10 or abs(e["XX"] + e["YY"]) > 1e-10:
        raise ValueError("state is not on the symmetric X-slice")
    return 2 * abs(e["ZI"]) + 2 * abs(e["XX"]) <= 1 + e["ZZ"] + 1e-12


# --------------------------------------------------------------------------
# channel variants


def dephased_thresholds(n: int, alpha: float, eta: float) -> ThresholdSet:
    """Thresholds when each qubit is also dephased, ``eta = (1 - 2p)^2``.

    ``eta = 1`` is plain amplitude damping.  The window exists iff
    ``r < eta^(n/2)``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_alpha(alpha)
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if eta == 0.0:
        raise ValueError("eta = 0 erases every coherence; the trajectory is diagonal and has no thresholds")
    a1, a2 = alpha_boundaries(n)
    b = _beta(alpha)
    r = alpha / b
    ge = min(1.0, eta * r ** (2.0 / n))
    ggme = min(1.0, eta * (r / (2 ** (n - 1) - 1)) ** (2.0 / n))
    if eta == 1.0:
        regime = _regime(alpha, a1, a2)
    else:
        regime = "re-entrant" if r < eta ** (n / 2) else "no-window"
        if math.isclose(r, eta ** (n / 2), rel_tol=1e-12):
            regime = "re-entrant/no-window"
    gm = gp = None
    edge = eta ** (n / 2)
    if math.isclose(r, edge, rel_tol=1e-12):
        # the window shrinks to the single point gamma = 0, where f_n(0) = 0
        gm = gp = 0.0
    elif r < edge:
        gp = _gamma_plus(n, r, eta)
        gm = _root(lambda g: f_n(n, alpha, g, eta), 0.0, gp)
    return ThresholdSet(n, alpha, gm, gp, ge, ggme, regime, (a1, a2), eta)


def dephased_gamma_minus_n2(alpha: float, eta: float = 1.0) -> float:
    """Closed-form two-qubit magic-death threshold under dephased damping."""
    b = _beta(alpha)
    return (math.sqrt(alpha * (4 * eta * b - (4 - eta * eta) * alpha)) - eta * alpha) / (2 * b)


@dataclass(frozen=True)
class PhaseTwistReport:
    F_n: float
    gamma_e: float
    gamma_plus: float | None
    gamma_minus: float | None
    delta_n: float
    genuine: bool
    gamma_minus_closed: float | None = None


def phase_twist_analysis(n: int, alpha: float, phi: float) -> PhaseTwistReport:
    """Thresholds when the endpoint coherence picks up ``exp(-i n phi)``.

    Membership is governed by the diamond norm, which multiplies the
    coherence by ``F_n = |cos n phi| + |sin n phi|``.
    """
    _check_alpha(alpha)
    b = _beta(alpha)
    r = alpha / b
    F = abs(math.cos(n * phi)) + abs(math.sin(n * phi))
    # values within rounding of 1 are the diamond axes
    if abs(F - 1.0) < 1e-15:
        F = 1.0
    ge = min(1.0, r ** (2.0 / n))
    delta = r ** (2.0 / n) * (F ** (2.0 / n) - 1.0)
    rF = r * F
    gp = gm = gm_closed = None
    genuine = False
    if rF < 1.0:
        gp = _gamma_plus(n, rF)
        genuine = (1.0 - rF ** (2.0 / n)) ** n > r * r * (F * F - 1.0)
        if genuine:
            gm = _root(lambda g: f_n(n, alpha, g, 1.0, F), 0.0, gp)
            if n == 2:
                gm_closed = (math.sqrt(alpha * (4 * F * b - (4 - F * F) * alpha)) - F * alpha) / (2 * b)
    return PhaseTwistReport(F, ge, gp, gm, delta, genuine, gm_closed)


class ThresholdAmbiguityError(ValueError):
    """A threshold equation has more than one root on the scanned grid."""


def _unique_root(h, grid):
    vals = np.array([h(g) for g in grid])
    sgn = np.sign(vals)
    # exact zeros on the grid count as roots
    zeros = np.flatnonzero(sgn == 0)
    nz = np.flatnonzero(sgn != 0)
    changes = [(nz[i], nz[i + 1]) for i in range(len(nz) - 1) if sgn[nz[i]] != sgn[nz[i + 1]]]
    nroots = len(changes) + len(zeros)
    if nroots == 0:
        return None
    if nroots > 1:
        raise ThresholdAmbiguityError(f"{nroots} sign changes found; threshold is not unique")
    if zeros.size:
        return float(grid[zeros[0]])
    i, j = changes[0]
    return _root(h, grid[i], grid[j])


def phase_covariant_thresholds(profile: PhaseCovariantProfile, n: int, r: float, grid_points: int = 4001):
    """Entanglement-death and rebirth thresholds for a real coherence profile.

    Solves ``r^(2/n) S(gamma) = gamma`` and ``r^(2/n) S(gamma) = 1 - gamma`` on
    ``[0, 1)`` after counting sign changes on a grid.

    Returns
    -------
    gamma_e, gamma_plus : float or None
    reflection_holds : bool
        ``|S(gamma_e) - S(1 - gamma_e)| < 1e-10``.
    """
    if not profile.is_real:
        raise ValueError("phase_covariant_thresholds needs a real profile")
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    k = r ** (2.0 / n)
    grid = np.linspace(0.0, 1.0 - 1e-9, grid_points)
    ge = _unique_root(lambda g: k * profile.S(g) - g, grid)
    gp = _unique_root(lambda g: k * profile.S(g) - (1.0 - g), grid)
    holds = False
    if ge is not None and 0.0 < ge < 1.0:
        holds = abs(profile.S(ge) - profile.S(1.0 - ge)) < 1e-10
    return ge, gp, holds


# --------------------------------------------------------------------------
# site-dependent damping


def nonuniform_endpoints(alpha: float, site_gammas: Sequence[float]) -> tuple[float, float, float]:
    """``(p_0, p_1, c)`` at the endpoints ``0^n`` and ``1^n``."""
    _check_alpha(alpha)
    g = np.asarray(site_gammas, dtype=float)
    b = _beta(alpha)
    pg, pq = float(np.prod(g)), float(np.prod(1.0 - g))
    return alpha**2 + b * b * pg, b * b * pq, alpha * b * math.sqrt(pq)


def _nonuniform_matrix(alpha, site_gammas):
    g = list(site_gammas)
    return np.asarray(apply_local_channel(pure_density(ghz_vector(len(g), alpha)), amplitude_damping_kraus, g))


def nonuniform_analysis(alpha: float, site_gammas: Sequence[float], tol: float = 1e-12) -> dict:
    """Endpoint quantities and surface tests for site-dependent damping.

    Returns a dict with ``membership``, ``on_rebirth_surface``
    (``prod(1-g_i) = r^2``), ``on_death_surface`` (``prod g_i = r^2``),
    ``pt_determinant`` (closed form, checked against every bipartition of
    the full matrix) and ``geo_means`` (geometric means of ``g_i`` and
    ``1-g_i``).
    """
    g = np.asarray(site_gammas, dtype=float)
    if np.any(g < 0) or np.any(g >= 1):
        raise ValueError("site gammas must lie in [0, 1)")
    n = len(g)
    b = _beta(alpha)
    r2 = (alpha / b) ** 2
    p0, p1, c = nonuniform_endpoints(alpha, g)
    pg, pq = float(np.prod(g)), float(np.prod(1.0 - g))
    det = b * b * pq * (b * b * pg - alpha * alpha)
    if n <= 8:
        m = _nonuniform_matrix(alpha, g)
        d = 2**n
        for mask in range(1, 2 ** (n - 1)):
            A = [k for k in range(n) if (mask >> (n - 1 - k)) & 1]
            x = sum(1 << (n - 1 - k) for k in A)  # |1_A 0_B>
            y = (d - 1) ^ x  # |0_A 1_B>
            pt = partial_transpose(m, A)
            blk = pt[np.ix_([x, y], [x, y])]
            dnum = float(np.real(np.linalg.det(blk)))
            if abs(dnum - det) > 1e-12:
                raise ArithmeticError(f"PT block determinant depends on the cut {A}")
    return {
        "membership": c <= min(p0, p1) + config.CLOSED_FORM_SLACK,
        "on_rebirth_surface": abs(pq - r2) <= tol,
        "on_death_surface": abs(pg - r2) <= tol,
        "pt_determinant": det,
        "geo_means": (pg ** (1.0 / n), pq ** (1.0 / n)),
        "endpoints": (p0, p1, c),
    }


def phase_averaged_tau(site_gammas: Sequence[float]) -> np.ndarray:
    """Explicit mixture of product states equal to the death-surface ``tau``.

    Each site carries ``sqrt(g)|0> + e^{i t} sqrt(1-g)|1>``; averaging over
    phases ``t_k`` constrained to sum to zero keeps only the diagonal and the
    ``0^n``/``1^n`` coherence.  A three-point phase grid per free angle is an
    exact quadrature for the frequencies present.
    """
    g = np.asarray(site_gammas, dtype=float)
    n = len(g)
    grid = 2 * np.pi * np.arange(3) / 3
    out = np.zeros((2**n, 2**n), dtype=complex)
    count = 0
    for idx in np.ndindex(*(3,) * (n - 1)):
        th = [grid[i] for i in idx]
        th.append(-sum(th))
        v = np.ones(1, dtype=complex)
        for gk, t in zip(g, th):
            v = np.kron(v, np.array([math.sqrt(gk), np.exp(1j * t) * math.sqrt(1 - gk)]))
        out += np.outer(v, v.conj())
        count += 1
    return out / count


def separable_decomposition_at_death(n: int, alpha: float, site_gammas: Sequence[float] | None = None) -> float:
    """Residual of ``rho - (beta^2 tau + alpha^2 |0^n><0^n|)`` on the death surface.

    ``rho`` comes from the full channel applied to the GHZ input; ``tau`` is
    built analytically.  Site gammas default to the homogeneous point
    ``gamma = r^(2/n)``.
    """
    _check_alpha(alpha)
    b = _beta(alpha)
    r = alpha / b
    if site_gammas is None:
        if r >= 1.0:
            raise ValueError("no death surface for alpha >= 1/sqrt(2)")
        site_gammas = [r ** (2.0 / n)] * n
    g = np.asarray(site_gammas, dtype=float)
    if len(g) != n:
        raise ValueError("site_gammas must have length n")
    if abs(np.prod(g) - r * r) > 1e-12:
        raise ValueError("parameters are not on the death surface prod(gamma_i) = r^2")
    d = 2**n
    tau = np.zeros((d, d))
    for x in range(d):
        bits = [(x >> (n - 1 - k)) & 1 for k in range(n)]
        tau[x, x] = np.prod([gk if bk == 0 else 1 - gk for gk, bk in zip(g, bits)])
    tau[0, d - 1] = tau[d - 1, 0] = math.sqrt(np.prod(g * (1 - g)))
    model = b * b * tau
    model[0, 0] += alpha * alpha
    rho = _nonuniform_matrix(alpha, g)
    return float(np.max(np.abs(rho - model)))


def facet_minor_mirror(alpha: float, site_gammas: Sequence[float], subset: Sequence[int] | None = None):
    """System facet ratio ``c_S^2 / (p_1^S)^2`` versus environment minor ratio
    ``c_E^2 / (a b)``.

    The system side uses the damped state, the environment side the
    complementary output; ``a, b`` are the diagonal entries of the
    environment's partial-transpose block across ``subset`` (default: first
    qubit).  Both equal ``r^2 / prod(1 - gamma_i)``.
    """
    g = np.asarray(site_gammas, dtype=float)
    if np.any(g <= 0) or np.any(g >= 1):
        raise ValueError("site gammas must lie strictly inside (0, 1)")
    n = len(g)
    psi = pure_density(ghz_vector(n, alpha))
    sys_m = _nonuniform_matrix(alpha, g)
    d = 2**n
    lhs = abs(sys_m[0, d - 1]) ** 2 / sys_m[d - 1, d - 1].real ** 2
    env = np.asarray(complementary_ad_output(psi, g))
    A = [0] if subset is None else list(subset)
    x = sum(1 << (n - 1 - k) for k in A)
    y = (d - 1) ^ x
    cE = abs(env[0, d - 1])
    a, bb = env[x, x].real, env[y, y].real
    return float(lhs), float(cE**2 / (a * bb))
