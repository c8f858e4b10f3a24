"""Numerical tolerances shared across the package.

Values are plain module constants so that callers can read them, and tests can
refer to a single source instead of repeating literals.
"""

#: Entrywise Hermiticity and trace tolerance for density operators.
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12

#: Smallest eigenvalue accepted as PSD (absorbs roundoff from channel maps).
PSD_FLOOR = -1e-10

#: Negativity below this value is read as "PPT across the cut".
NEGATIVITY_ZERO = 1e-10

#: Completeness tolerance for Kraus sets.
KRAUS_TOL = 1e-12

#: Slack used when comparing closed-form membership inequalities.
CLOSED_FORM_SLACK = 1e-14

#: LP feasibility: an l1 slack at or below this value reads as "inside".
LP_MEMBERSHIP_TOL = 1e-7

#: Primal/dual feasibility tolerance handed to the LP solver.
LP_SOLVER_TOL = 1e-9

#: Pair-coherence obstruction slack.
PAIR_SLACK = 1e-12

#: Root-finding: absolute tolerance on gamma and iteration cap.
ROOT_XTOL = 1e-15
ROOT_MAXITER = 200

#: Default upper limit on qubit number for dense matrices.
MAX_QUBITS = 8
