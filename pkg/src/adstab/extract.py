"""Parity-syndrome extraction of single-qubit magic from damped GHZ states.

Measuring the neighbouring ``Z_i Z_{i+1}`` parities and keeping the trivial
syndrome projects onto ``span{|0^n>, |1^n>}``; a CNOT cascade then moves the
surviving coherence onto qubit 0.  On the GHZ-X manifold the decoded qubit is

    [[P_0, c], [c, P_n]] / (P_0 + P_n),

with success probability ``P_0 + P_n``.  Bloch coordinates are
``x = 2c / (P_0 + P_n)``, ``z = (P_0 - P_n) / (P_0 + P_n)``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .ghzx import ghzx_point, rom_closed
from .qcore import _mat, _nqubits
from .stabset import single_qubit_rom

__all__ = [
    "H_THRESHOLD",
    "T_THRESHOLD",
    "EPS_H",
    "ExtractionResult",
    "parity_extract",
    "simulate_parity_extraction",
    "cnot_cascade",
    "lossless_identity_check",
    "twirl_and_classify",
    "large_n_coordinate",
    "cat_injection",
]

#: Input infidelity tolerated by the 15-to-1 |H>-type protocol.
EPS_H = 0.141
#: |x| + |z| above which the twirled state is |H>-distillable.
H_THRESHOLD = math.sqrt(2.0) * (1.0 - 2.0 * EPS_H)  # 1.0154053378...
#: |x| + |z| above which the twirled state is |T>-distillable (5-to-1).
T_THRESHOLD = 3.0 / math.sqrt(7.0)  # 1.1338934190...

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class ExtractionResult:
    """Decoded single-qubit state and its classification.

    ``corrected_coordinate`` is ``|x| + |z|``; ``h_polarization`` and
    ``t_polarization`` are the twirled polarizations along the H and T axes.
    ``flags`` holds ``outside_octahedron``, ``h_distillable`` and
    ``t_distillable``.
    """

    success_probability: float
    decoded: np.ndarray
    bloch: tuple
    corrected_coordinate: float
    h_polarization: float | None = None
    t_polarization: float | None = None
    flags: dict = dataclasses.field(default_factory=dict)


def parity_extract(n: int, alpha: float, gamma: float) -> ExtractionResult:
    """Closed-form extraction outcome for the damped GHZ state."""
    pt = ghzx_point(n, alpha, gamma)
    p0, pn, c = pt.p0, pt.pn, float(np.real(pt.coherence))
    ps = p0 + pn
    dec = np.array([[p0, c], [c, pn]]) / ps
    x, z = 2 * c / ps, (p0 - pn) / ps
    l1 = abs(x) + abs(z)
    return ExtractionResult(
        success_probability=ps,
        decoded=dec,
        bloch=(x, 0.0, z),
        corrected_coordinate=l1,
        flags={"outside_octahedron": l1 > 1.0 + 1e-14},
    )


def cnot_cascade(n: int) -> np.ndarray:
    """Unitary of ``CNOT(0->1) CNOT(1->2) ... CNOT(n-2->n-1)`` applied in reverse
    order, mapping ``|0^n> -> |0^n>`` and ``|1^n> -> |1 0^(n-1)>``."""
    d = 2**n
    u = np.zeros((d, d))
    for x in range(d):
        bits = [(x >> (n - 1 - k)) & 1 for k in range(n)]
        for t in range(n - 1, 0, -1):
            bits[t] ^= bits[t - 1]
        y = int("".join(map(str, bits)), 2)
        u[y, x] = 1.0
    return u


def simulate_parity_extraction(rho) -> tuple[np.ndarray, float]:
    """Matrix-level extraction: project onto the even-parity code space,
    decode with the CNOT cascade and trace out qubits ``1..n-1``.

    Returns the normalized decoded qubit and the success probability.
    """
    m = _mat(rho)
    n = _nqubits(m.shape[0])
    d = 2**n
    proj = np.zeros((d, d))
    proj[0, 0] = proj[d - 1, d - 1] = 1.0
    kept = proj @ m @ proj
    ps = float(np.real(np.trace(kept)))
    u = cnot_cascade(n)
    dec = (u @ kept @ u.T).reshape(2, d // 2, 2, d // 2)
    q = np.einsum("ajbj->ab", dec)
    return q / ps, ps


def lossless_identity_check(n: int, alpha: float, gamma: float) -> tuple[float, float]:
    """``(P_0 + P_n)(R_decoded - 1)`` and ``R - 1`` of the n-qubit state."""
    res = parity_extract(n, alpha, gamma)
    lhs = res.success_probability * (single_qubit_rom(res.bloch) - 1.0)
    rhs = rom_closed(ghzx_point(n, alpha, gamma)) - 1.0
    return lhs, rhs


def twirl_and_classify(result: ExtractionResult) -> ExtractionResult:
    """Sign-correct ``z`` and evaluate the H/T distillation criteria.

    A Pauli X is applied when ``z < 0`` so the state sits in the ``x, z >= 0``
    quadrant; the twirls then keep only the components along the H axis
    ``(1, 0, 1)/sqrt 2`` and the T axis ``(1, 1, 1)/sqrt 3``.
    """
    x, y, z = result.bloch
    if z < 0:
        z = -z
    l1 = abs(x) + abs(z)
    dec = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])
    flags = dict(result.flags)
    flags.update(
        outside_octahedron=l1 > 1.0 + 1e-14,
        h_distillable=l1 > H_THRESHOLD,
        t_distillable=l1 > T_THRESHOLD,
    )
    return dataclasses.replace(
        result,
        decoded=dec,
        bloch=(x, y, z),
        corrected_coordinate=l1,
        h_polarization=l1 / _SQRT2,
        t_polarization=l1 / _SQRT3,
        flags=flags,
    )


def large_n_coordinate(u: float) -> float:
    """``(2u + u^2 - 1) / (1 + u^2)``: limiting ``x + z`` at scaled damping ``u``."""
    if u < 1.0:
        raise ValueError("u must be at least 1")
    return (2.0 * u + u * u - 1.0) / (1.0 + u * u)


def cat_injection(n: int) -> dict:
    """Extraction from a cat state tuned so the decoded qubit approaches |H>.

    With ``a = sqrt 2 - 1`` the GHZ input ``(|0^n> + |1^n>)/sqrt 2`` damped to
    ``gamma* = 1 - a^(2/n)`` decodes to
    ``[[1 + eps, a], [a, a^2]] / (1 + a^2 + eps)``, ``eps = gamma*^n``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    a = _SQRT2 - 1.0
    gstar = -math.expm1((2.0 / n) * math.log(a))
    eps = gstar**n
    dec = np.array([[1 + eps, a], [a, a * a]]) / (1 + a * a + eps)
    h = np.array([math.cos(math.pi / 8), math.sin(math.pi / 8)])
    fid = float(h @ dec @ h)
    return {
        "gamma_star": gstar,
        "decoded": dec,
        "fidelity_with_H": fid,
        "success_probability": 2.0 - _SQRT2 + eps / 2.0,
        "epsilon_n": eps,
    }
