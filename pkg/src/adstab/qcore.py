"""Dense density-matrix toolkit: Kraus channels, partial transposes and
entanglement/magic diagnostics for a handful of qubits.

Conventions
-----------
Computational basis states are indexed by integers whose binary expansion reads
qubit 0 as the most significant bit, so ``|q0 q1 ... q_{n-1}>`` maps to
``int("q0q1...", 2)``.  Qubit subsets are given as 0-based indices.
Pauli strings are labelled by base-4 digits ``0=I, 1=X, 2=Y, 3=Z`` with qubit 0
as the most significant digit.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from . import config

__all__ = [
    "DensityOperator",
    "KrausChannel",
    "PhaseCovariantProfile",
    "as_density",
    "pure_density",
    "amplitude_damping_kraus",
    "dephasing_kraus",
    "coherence_scaling_kraus",
    "compose_channels",
    "apply_local_channel",
    "complementary_ad_output",
    "partial_transpose",
    "negativity",
    "concurrence",
    "pauli_labels",
    "pauli_moments",
    "srenyi2_linearized",
    "bloch_vector",
    "ghz_vector",
    "dicke_vector",
]


# --------------------------------------------------------------------------
# state container


@dataclass(frozen=True)
class DensityOperator:
    """Validated ``2^n x 2^n`` density matrix.

    Construction checks Hermiticity, unit trace and positivity up to the
    tolerances in :mod:`adstab.config`.  The stored matrix is the Hermitian
    part of the input, so small antisymmetric roundoff is removed.

    The object converts to an ndarray with ``np.asarray(rho)``.
    """

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        dim = m.shape[0]
        n = dim.bit_length() - 1
        if dim < 2 or 2**n != dim:
            raise ValueError(f"dimension {dim} is not a power of two >= 2")
        if n > config.MAX_QUBITS:
            raise ValueError(f"n={n} exceeds the dense cap of {config.MAX_QUBITS} qubits")
        if np.max(np.abs(m - m.conj().T)) > config.HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > config.TRACE_TOL:
            raise ValueError(f"trace {tr!r} differs from 1")
        m = 0.5 * (m + m.conj().T)
        if np.linalg.eigvalsh(m)[0] < config.PSD_FLOOR:
            raise ValueError("matrix has a negative eigenvalue below the PSD floor")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix.copy() if copy else self.matrix
        return self.matrix.astype(dtype)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


StateLike = Union[DensityOperator, np.ndarray]


def as_density(rho: StateLike) -> DensityOperator:
    """Coerce an array (or a DensityOperator) to a validated DensityOperator."""
    if isinstance(rho, DensityOperator):
        return rho
    return DensityOperator(np.asarray(rho))


def _mat(rho: StateLike) -> np.ndarray:
    if isinstance(rho, DensityOperator):
        return rho.matrix
    m = np.asarray(rho, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def _nqubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if 2**n != dim or n < 1:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def pure_density(psi) -> DensityOperator:
    """Projector onto a normalized copy of ``psi``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("zero vector")
    psi = psi / nrm
    return DensityOperator(np.outer(psi, psi.conj()))


def ghz_vector(n: int, alpha: float, beta: complex | None = None) -> np.ndarray:
    """``alpha|0^n> + beta|1^n>``; ``beta`` defaults to ``sqrt(1-alpha^2)``."""
    if beta is None:
        beta = math.sqrt(1.0 - alpha * alpha)
    v = np.zeros(2**n, dtype=complex)
    v[0] = alpha
    v[-1] = beta
    return v


def dicke_vector(n: int, k: int) -> np.ndarray:
    """Uniform superposition over all weight-``k`` strings of length ``n``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    idx = np.arange(2**n)
    weights = np.array([bin(i).count("1") for i in idx])
    v = (weights == k).astype(complex)
    return v / math.sqrt(math.comb(n, k))


# --------------------------------------------------------------------------
# channels


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by Kraus operators acting on ``n`` qubits."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("empty Kraus set")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise ValueError("Kraus operators must be square and of equal size")
        _nqubits(d)
        s = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(s - np.eye(d))) > config.KRAUS_TOL:
            raise ValueError("Kraus operators are not trace preserving")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def n(self) -> int:
        return _nqubits(self.operators[0].shape[0])

    def superoperator(self) -> np.ndarray:
        """Tensor ``S[a, b, c, d]`` with ``rho'[a, b] = sum S[a,b,c,d] rho[c,d]``."""
        return sum(np.einsum("ac,bd->abcd", k, k.conj()) for k in self.operators)

    def __call__(self, rho: StateLike) -> np.ndarray:
        m = _mat(rho)
        out = sum(k @ m @ k.conj().T for k in self.operators)
        return 0.5 * (out + out.conj().T)


def _check_prob(x, name):
    if not (0.0 <= x <= 1.0) or math.isnan(x):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


def amplitude_damping_kraus(gamma: float) -> KrausChannel:
    """Single-qubit amplitude damping with decay probability ``gamma``."""
    _check_prob(gamma, "gamma")
    e0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]])
    e1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]])
    return KrausChannel((e0, e1))


def dephasing_kraus(p: float) -> KrausChannel:
    """Phase flip ``rho -> (1-p) rho + p Z rho Z``."""
    _check_prob(p, "p")
    return KrausChannel((math.sqrt(1 - p) * np.eye(2), math.sqrt(p) * np.diag([1.0, -1.0])))


def coherence_scaling_kraus(mu: complex) -> KrausChannel:
    """Population-preserving channel that multiplies ``rho_01`` by ``mu``.

    Requires ``|mu| <= 1``.  Kraus pair ``diag(1, conj(mu))`` and
    ``diag(0, sqrt(1-|mu|^2))``.
    """
    a = abs(mu)
    if a > 1 + 1e-12:
        raise ValueError("|mu| must not exceed 1")
    a = min(a, 1.0)
    return KrausChannel((np.diag([1.0, np.conj(mu)]), np.diag([0.0, math.sqrt(1 - a * a)])))


def compose_channels(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Kraus set of ``second o first``."""
    return KrausChannel(tuple(b @ a for b in second.operators for a in first.operators))


def _apply_site(t: np.ndarray, sup: np.ndarray, k: int, n: int) -> np.ndarray:
    # t has 2n axes (rows then columns); sup maps (c, d) -> (a, b) on site k
    t = np.moveaxis(t, (k, n + k), (0, 1))
    shp = t.shape
    dout = sup.shape[0]
    t = sup.reshape(dout * dout, -1) @ t.reshape(shp[0] * shp[1], -1)
    t = t.reshape((dout, dout) + shp[2:])
    return np.moveaxis(t, (0, 1), (k, n + k))


def _apply_sites(m: np.ndarray, sups: Sequence[np.ndarray]) -> np.ndarray:
    n = len(sups)
    t = m.reshape((2,) * (2 * n))
    for k, s in enumerate(sups):
        t = _apply_site(t, s, k, n)
    dout = int(round(math.sqrt(t.size)))
    out = t.reshape(dout, dout)
    return 0.5 * (out + out.conj().T)


def apply_local_channel(
    rho: StateLike,
    single_qubit: Union[KrausChannel, Sequence[KrausChannel], Callable[[float], KrausChannel]],
    site_gammas: Sequence[float] | None = None,
) -> DensityOperator:
    """Apply a product of single-qubit channels, one site at a time.

    Parameters
    ----------
    rho : DensityOperator or ndarray
        n-qubit input state.
    single_qubit : KrausChannel, sequence of KrausChannel, or callable
        A single channel applied on every site, a list with one channel per
        site, or a factory ``gamma -> KrausChannel`` used with ``site_gammas``.
    site_gammas : sequence of float, optional
        Per-site parameters (length n).  If ``single_qubit`` is a channel
        rather than a factory, amplitude damping is assumed for the per-site
        channels.

    Returns
    -------
    DensityOperator
    """
    m = _mat(rho)
    n = _nqubits(m.shape[0])
    if site_gammas is not None:
        if len(site_gammas) != n:
            raise ValueError(f"site_gammas has length {len(site_gammas)}, expected {n}")
        factory = single_qubit if callable(single_qubit) and not isinstance(single_qubit, KrausChannel) \
            else amplitude_damping_kraus
        chans = [factory(g) for g in site_gammas]
    elif isinstance(single_qubit, KrausChannel):
        chans = [single_qubit] * n
    else:
        chans = list(single_qubit)
        if len(chans) != n:
            raise ValueError(f"{len(chans)} channels given for {n} qubits")
    for c in chans:
        if c.n != 1:
            raise ValueError("apply_local_channel expects single-qubit channels")
    return DensityOperator(_apply_sites(m, [c.superoperator() for c in chans]))


def _ad_isometry(gamma: float) -> np.ndarray:
    """Dilation ``V[s, e, i]``: ``V|0> = |00>``,
    ``V|1> = sqrt(1-g)|1>|0> + sqrt(g)|0>|1>`` (system first)."""
    v = np.zeros((2, 2, 2))
    v[0, 0, 0] = 1.0
    v[1, 0, 1] = math.sqrt(1.0 - gamma)
    v[0, 1, 1] = math.sqrt(gamma)
    return v


def complementary_ad_output(rho_in: StateLike, gamma: Union[float, Sequence[float]]) -> DensityOperator:
    """Environment state left behind by amplitude damping of strength ``gamma``.

    Each site is dilated by the canonical isometry and its system factor is
    traced out, leaving one environment qubit per site.  ``gamma`` may be a
    per-site sequence.
    """
    m = _mat(rho_in)
    n = _nqubits(m.shape[0])
    gammas = [gamma] * n if np.isscalar(gamma) else list(gamma)
    if len(gammas) != n:
        raise ValueError(f"got {len(gammas)} damping strengths for {n} qubits")
    sups = []
    for g in gammas:
        _check_prob(g, "gamma")
        v = _ad_isometry(g)
        # S[e, e', i, j] = sum_s V[s,e,i] conj(V[s,e',j])
        sups.append(np.einsum("sei,sfj->efij", v, v.conj()))
    return DensityOperator(_apply_sites(m, sups))


# --------------------------------------------------------------------------
# entanglement


def _check_subset(subset: Iterable[int], n: int) -> tuple:
    sub = tuple(sorted(set(int(s) for s in subset)))
    if not sub or len(sub) == n:
        raise ValueError("subset must be nonempty and proper")
    if sub[0] < 0 or sub[-1] >= n:
        raise ValueError(f"subset indices must lie in 0..{n - 1}")
    return sub


def partial_transpose(rho: StateLike, subset: Iterable[int]) -> np.ndarray:
    """Transpose the qubits listed in ``subset`` (0-based)."""
    m = _mat(rho)
    n = _nqubits(m.shape[0])
    sub = _check_subset(subset, n)
    t = m.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for k in sub:
        axes[k], axes[n + k] = axes[n + k], axes[k]
    return t.transpose(axes).reshape(m.shape)


def negativity(rho: StateLike, subset: Iterable[int]) -> float:
    """``(||rho^{T_A}||_1 - 1) / 2`` for the cut ``subset | rest``."""
    ev = np.linalg.eigvalsh(partial_transpose(rho, subset))
    return max(0.0, float(-ev[ev < 0].sum()))


_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def concurrence(rho: StateLike) -> float:
    """Two-qubit concurrence from the spin-flipped spectrum."""
    m = _mat(rho)
    if m.shape != (4, 4):
        raise ValueError("concurrence is defined here for two qubits only")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    tilde = _YY @ m.conj() @ _YY
    lam = np.linalg.eigvalsh(sq @ tilde @ sq)
    lam = np.sqrt(np.clip(lam, 0, None))[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


# --------------------------------------------------------------------------
# Pauli spectrum


def pauli_labels(n: int) -> list[str]:
    """Labels such as ``'IXZ'`` in the order used by :func:`pauli_moments`."""
    letters = "IXYZ"
    out = []
    for p in range(4**n):
        s = []
        for q in range(n):
            s.append(letters[(p >> (2 * (n - 1 - q))) & 3])
        out.append("".join(s))
    return out


def _label_xz_bits(n: int):
    """For every Pauli label index, the X-part ``a`` and Z-part ``b`` bitmasks."""
    p = np.arange(4**n)
    a = np.zeros_like(p)
    b = np.zeros_like(p)
    for q in range(n):
        d = (p >> (2 * (n - 1 - q))) & 3
        bit = 1 << (n - 1 - q)
        a |= np.where((d == 1) | (d == 2), bit, 0)
        b |= np.where((d == 2) | (d == 3), bit, 0)
    return a, b


def _popcount(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    c = np.zeros_like(x)
    while np.any(x):
        c += x & 1
        x = x >> 1
    return c


def _walsh_hadamard(v: np.ndarray) -> np.ndarray:
    """Unnormalized WHT along the last axis: ``out[..., b] = sum_x (-1)^{b.x} v[..., x]``."""
    v = np.array(v, copy=True)
    d = v.shape[-1]
    h = 1
    while h < d:
        v = v.reshape(v.shape[:-1] + (d // (2 * h), 2, h))
        a = v[..., 0, :].copy()
        b = v[..., 1, :]
        v[..., 0, :] = a + b
        v[..., 1, :] = a - b
        v = v.reshape(v.shape[:-3] + (d,))
        h *= 2
    return v


def _pauli_xz_table(m: np.ndarray) -> np.ndarray:
    """``T[a, b] = Tr(rho X^a Z^b)`` for all bitmasks (no i-phase)."""
    d = m.shape[0]
    x = np.arange(d)
    # rows a: Tr(rho X^a Z^b) = sum_x rho[x, x^a] (-1)^{b.x}
    g = np.stack([m[x, x ^ a] for a in range(d)])
    return _walsh_hadamard(g)


def pauli_moments(rho: StateLike) -> np.ndarray:
    """All ``4^n`` Pauli expectations ``Tr(rho P)`` in label order.

    Computed with one fast Walsh-Hadamard transform per X-pattern.
    """
    m = _mat(rho)
    n = _nqubits(m.shape[0])
    if n > 6:
        raise ValueError("pauli_moments supports n <= 6")
    tab = _pauli_xz_table(m)
    a, b = _label_xz_bits(n)
    phase = (1j) ** (_popcount(a & b) % 4)
    return np.real(phase * tab[a, b])


def srenyi2_linearized(rho: StateLike) -> float:
    """``-log( sum_P <P>^4 / (d Tr(rho^2)^2) )``; zero on pure stabilizer states."""
    m = _mat(rho)
    d = m.shape[0]
    mom = pauli_moments(m)
    pur = float(np.real(np.vdot(m, m)))
    return float(-math.log(np.sum(mom**4) / (d * pur * pur)))


def bloch_vector(rho: StateLike) -> np.ndarray:
    """``(x, y, z)`` of a single-qubit state."""
    m = _mat(rho)
    if m.shape != (2, 2):
        raise ValueError("bloch_vector needs a single qubit")
    return np.array([2 * m[0, 1].real, -2 * m[0, 1].imag, (m[0, 0] - m[1, 1]).real])


# --------------------------------------------------------------------------
# phase-covariant coherence profiles


@dataclass(frozen=True)
class PhaseCovariantProfile:
    """Phase-covariant qubit channel with amplitude-damping populations.

    The coherence ``rho_01`` is multiplied by ``lambda(gamma)`` instead of
    ``sqrt(1-gamma)``.  Complete positivity requires
    ``|lambda|^2 <= 1 - gamma``, checked on every evaluation.

    Use the constructors :meth:`pure_ad`, :meth:`dephased`,
    :meth:`power_law`, :meth:`phase_twist` and :meth:`custom`.
    """

    kind: str
    parameters: tuple
    lambda_of_gamma: Callable[[float], complex] = field(repr=False, compare=False)

    @classmethod
    def pure_ad(cls):
        return cls("pure-AD", (), lambda g: math.sqrt(1.0 - g))

    @classmethod
    def dephased(cls, eta: float):
        """Amplitude damping followed by dephasing with ``(1-2p)^2 = eta``."""
        if not 0.0 <= eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        s = math.sqrt(eta)
        return cls("dephased-AD", (eta,), lambda g: s * math.sqrt(1.0 - g))

    @classmethod
    def power_law(cls, a: float):
        """``lambda = (1-gamma)^a``; CP requires ``a >= 1/2``."""
        if a < 0.5:
            raise ValueError("power-law exponent below 1/2 violates complete positivity")
        return cls("power-law", (a,), lambda g: (1.0 - g) ** a)

    @classmethod
    def phase_twist(cls, phi: float):
        """``lambda = exp(-i phi) sqrt(1-gamma)``."""
        ph = cmath.exp(-1j * phi)
        return cls("phase-twist", (phi,), lambda g: ph * math.sqrt(1.0 - g))

    @classmethod
    def custom(cls, fn: Callable[[float], complex], *parameters):
        return cls("custom", tuple(parameters), fn)

    @property
    def is_real(self) -> bool:
        return all(abs(complex(self.lambda_of_gamma(g)).imag) < 1e-15 for g in (0.0, 0.3, 0.7))

    def lam(self, gamma: float) -> complex:
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        val = self.lambda_of_gamma(gamma)
        if abs(val) ** 2 > (1.0 - gamma) + 1e-12:
            raise ValueError(
                f"profile violates complete positivity at gamma={gamma}: "
                f"|lambda|^2={abs(val) ** 2:.6g} > {1 - gamma:.6g}"
            )
        return val

    def S(self, gamma: float) -> float:
        """Normalized coherence ``|lambda|^2 / (1-gamma)`` for ``gamma < 1``."""
        if gamma >= 1.0:
            raise ValueError("S is defined for gamma < 1")
        return abs(self.lam(gamma)) ** 2 / (1.0 - gamma)

    def kraus(self, gamma: float) -> KrausChannel:
        """Kraus set: amplitude damping then a coherence rescaling."""
        ad = amplitude_damping_kraus(gamma)
        lam = self.lam(gamma)
        if gamma >= 1.0:
            return ad
        mu = lam / math.sqrt(1.0 - gamma)
        return compose_channels(coherence_scaling_kraus(mu), ad)
