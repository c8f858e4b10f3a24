"""Exact magic and entanglement dynamics of locally amplitude-damped qubits.

Submodules
----------
qcore     dense states, Kraus channels, negativity, concurrence, Pauli moments
stabset   stabilizer-state enumeration, LP membership/robustness, witnesses
ghzx      closed forms on the GHZ-X manifold and channel variants
extract   parity-syndrome extraction and distillation classification
families  Dicke/anti-W, generalized W, two-term cats, affine-plane slice,
          insulator classification, Haar endpoint test
cli       command-line front end (``python -m adstab``)
"""

__version__ = "0.1.0"
