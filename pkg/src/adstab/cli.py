"""Command-line front end.

Every subcommand writes a table: CSV by default (one ``#`` line echoing the
full configuration, then a header row) or JSON with ``--format json``.
Floats carry 12 significant digits so identical arguments give byte-identical
output.  ``enumerate`` is the exception and writes one JSON record per line.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 capability
limit (e.g. an LP request beyond the enumerated dictionaries).

Examples
--------
    adstab thresholds --n 2 --alpha 0.4
    adstab thresholds --n 2 --alpha-grid 0.01:0.70:200
    adstab rom --n 2 --alpha 0.4 --gamma 0.45 --verify-lp
    adstab haar --n 3 --samples 1000 --seed 42
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import NamedTuple

import numpy as np

from . import config, extract, families, ghzx, qcore, stabset

__all__ = ["main", "build_parser", "CapabilityError", "VerificationFailure"]

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CAPABILITY = 0, 1, 2, 3

ROM_TOL = 1e-6


class CapabilityError(RuntimeError):
    """Request outside what the library can compute exactly."""


class VerificationFailure(RuntimeError):
    """A certification check did not hold; the table is still written."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for verification
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# formatting


def _fmt(v) -> str:
    if v is None or isinstance(v, GridSpec):
        return "nan" if v is None else str(v)
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v) + 0.0:.12g}"  # no "-0"
    return str(v)


def _json_value(v):
    if v is None:
        return None
    if isinstance(v, GridSpec):
        return str(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(f"{v:.12g}") if math.isfinite(v) else None
    return str(v)


def _config_echo(args) -> dict:
    skip = {"func", "output", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _render(args, columns, rows) -> str:
    cfg = _config_echo(args)
    if args.format == "json":
        doc = {
            "config": {k: _json_value(v) for k, v in cfg.items()},
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        return json.dumps(doc) + "\n"
    echo = " ".join(f"{k}={_fmt(v)}" for k, v in cfg.items())
    lines = [f"# adstab {echo}", ",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _write(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _kt(gamma: float | None):
    if gamma is None:
        return None
    return math.inf if gamma >= 1.0 else -math.log1p(-gamma)


class GridSpec(NamedTuple):
    lo: float
    hi: float
    points: int

    def __str__(self):
        return f"{self.lo:.12g}:{self.hi:.12g}:{self.points}"

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


def _grid(spec: str) -> GridSpec:
    """Parse ``min:max:points``."""
    try:
        lo, hi, pts = spec.split(":")
        g = GridSpec(float(lo), float(hi), int(pts))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be min:max:points, got {spec!r}")
    if g.points < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    return g


def _gamma_values(args) -> np.ndarray:
    if getattr(args, "gamma", None) is not None:
        return np.array([args.gamma])
    return args.gamma_grid.values()


def _unit(x):
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError("value must lie in [0, 1]")
    return x


# --------------------------------------------------------------------------
# subcommands


def cmd_thresholds(args):
    alphas = args.alpha_grid.values() if args.alpha is None else [args.alpha]
    cols = ["n", "alpha", "eta", "gamma_minus", "gamma_plus", "gamma_e", "gamma_gme",
            "kt_minus", "kt_plus", "regime"]
    rows = []
    for a in alphas:
        th = ghzx.dephased_thresholds(args.n, float(a), args.eta)
        rows.append([args.n, float(a), args.eta, th.gamma_minus, th.gamma_plus, th.gamma_e,
                     th.gamma_gme, _kt(th.gamma_minus), _kt(th.gamma_plus), th.regime])
    return cols, rows


def cmd_scan(args):
    cols = ["gamma", "kt", "p0", "pn", "c", "f_n", "inside", "rom"]
    rows = []
    for g in _gamma_values(args):
        pt = ghzx.ghzx_point(args.n, args.alpha, float(g))
        rows.append([float(g), _kt(g), pt.p0, pt.pn, float(np.real(pt.coherence)),
                     ghzx.f_n(args.n, args.alpha, float(g)), ghzx.membership_closed(pt), ghzx.rom_closed(pt)])
    return cols, rows


def _lp_guard(n: int, allow_n4: bool):
    if n > 4 or (n == 4 and not allow_n4):
        raise CapabilityError(
            f"LP oracle unavailable for n={n}: supported n <= 3 (n = 4 with --allow-n4)"
        )


def _trajectory_input(args):
    if args.state == "ghz":
        return qcore.pure_density(qcore.ghz_vector(args.n, args.alpha)), True
    if args.state == "bell-phi":
        return qcore.pure_density(qcore.ghz_vector(2, 1 / math.sqrt(2))), True
    if args.state == "bell-psi":
        return qcore.pure_density(qcore.dicke_vector(2, 1)), False
    return qcore.pure_density(qcore.dicke_vector(args.n, args.k)), False


def cmd_trajectory(args):
    rho0, closed = _trajectory_input(args)
    n = rho0.n
    if not closed and not args.no_rom:
        _lp_guard(n, args.allow_n4)
    cols = ["gamma", "kt", "rom_minus_1", "concurrence", "negativity", "m2"]
    rows = []
    for g in _gamma_values(args):
        g = float(g)
        rho = qcore.apply_local_channel(rho0, qcore.amplitude_damping_kraus(g))
        if args.no_rom:
            r = None
        elif closed:
            alpha = args.alpha if args.state == "ghz" else 1 / math.sqrt(2)
            r = ghzx.rom_closed(ghzx.ghzx_point(n, alpha, g)) - 1.0
        else:
            r = stabset.robustness_lp(rho, allow_n4=args.allow_n4).value - 1.0
        conc = qcore.concurrence(rho) if n == 2 else None
        neg = qcore.negativity(rho, [0])
        m2 = qcore.srenyi2_linearized(rho) if n <= 6 else None
        rows.append([g, _kt(g), r, conc, neg, m2])
    return cols, rows


def cmd_rom(args):
    pt = ghzx.ghzx_point(args.n, args.alpha, args.gamma)
    closed = ghzx.rom_closed(pt)
    inside = ghzx.membership_closed(pt)
    cols = ["n", "alpha", "gamma", "kt", "inside", "rom_closed"]
    row = [args.n, args.alpha, args.gamma, _kt(args.gamma), inside, closed]
    failed = False
    if args.verify_lp:
        _lp_guard(args.n, args.allow_n4)
        rho = pt.density()
        cert = stabset.robustness_lp(rho, allow_n4=args.allow_n4)
        mem = stabset.membership_lp(rho)
        diff = abs(cert.value - closed)
        cols += ["inside_lp", "rom_lp", "abs_diff", "duality_gap"]
        row += [mem.inside, cert.value, diff, cert.duality_gap]
        failed = diff > ROM_TOL or mem.inside != inside
    if failed:
        raise VerificationFailure("closed form and LP disagree", cols, [row])
    return cols, [row]


def cmd_extract(args):
    cols = ["n", "alpha", "gamma", "p_succ", "x", "z", "l1", "h", "t", "flags"]
    rows = []
    for g in _gamma_values(args):
        res = extract.twirl_and_classify(extract.parity_extract(args.n, args.alpha, float(g)))
        flags = "+".join(k for k in ("outside_octahedron", "h_distillable", "t_distillable") if res.flags[k]) or "-"
        x, _, z = res.bloch
        rows.append([args.n, args.alpha, float(g), res.success_probability, x, z,
                     res.corrected_coordinate, res.h_polarization, res.t_polarization, flags])
    return cols, rows


def cmd_enumerate(args):
    if not 1 <= args.n <= 4:
        raise CapabilityError("enumeration supports n = 1..4")
    return "".join(json.dumps(s.bitstrings()) + "\n" for s in stabset.enumerate_stabilizer_states(args.n))


def cmd_classify(args):
    if not 1 <= args.n <= 4:
        raise CapabilityError("classification supports n = 1..4")
    c = families.classify_all(args.n)
    return ["n", "insulators", "generators", "total"], [[args.n, c["insulator"], c["generator"],
                                                         c["insulator"] + c["generator"]]]


def _dicke_verdict(n, k, g):
    if g == 1.0 or k in (0, n):
        return True, "vertex" if g == 1.0 else "stabilizer"
    if k == 1:
        return families.generalized_w_membership([1.0] * n, g), "row-dominance"
    if k == n - 1:
        v = families.antiw_membership(n, g)
        return (None if v is None else v), "anti-w" if v is not None else "undetermined"
    ob = families.interior_dicke_obstruction(n, k, g)
    return (False if not ob.inside else None), "postselection" if not ob.inside else "undetermined"


def cmd_dicke(args):
    if not 0 <= args.k <= args.n:
        raise argparse.ArgumentTypeError("need 0 <= k <= n")
    if args.lp:
        _lp_guard(args.n, args.allow_n4)
    cols = ["gamma", "kt", "inside", "method", "negativity"] + (["rom_lp"] if args.lp else [])
    rows = []
    for g in _gamma_values(args):
        g = float(g)
        rho = families.dicke_trajectory(args.n, args.k, g)
        inside, how = _dicke_verdict(args.n, args.k, g)
        row = [g, _kt(g), "undetermined" if inside is None else inside, how, qcore.negativity(rho, [0])]
        if args.lp:
            row.append(stabset.robustness_lp(rho, allow_n4=args.allow_n4).value)
        rows.append(row)
    return cols, rows


def cmd_haar(args):
    grid = None if args.gamma_grid is None else args.gamma_grid.values()
    res = families.haar_endpoint_test(args.n, args.samples, args.seed, grid)
    cols = ["n", "samples", "seed", "violating", "fraction", "bound", "sigma", "passes"]
    return cols, [[res[c] for c in cols]]


def cmd_slice(args):
    words = args.L.split(",")
    cols = ["gamma", "kt", "inside", "gamma_minus", "gamma_plus", "p0", "pL", "cL"]
    rows = []
    for g in _gamma_values(args):
        s = families.affine_plane_slice(args.n, words, args.alpha, float(g))
        rows.append([float(g), _kt(g), s["membership"], s["gamma_minus"], s["gamma_plus"], *s["coefficients"]])
    return cols, rows


def cmd_pairing(args):
    xs = args.xi_grid.values() if args.xi is None else [args.xi]
    cols = ["xi", "valid", "r", "alpha", "energy", "numeric_energy", "gap", "overlap"]
    rows = []
    for xi in xs:
        p = families.pairing_ground_state(float(xi), args.mu)
        rows.append([float(xi)] + [p[c] for c in cols[1:]])
    return cols, rows


def cmd_mirror(args):
    th = ghzx.thresholds(2, args.alpha)
    if th.gamma_plus is None:
        raise argparse.ArgumentTypeError("no reborn branch for this alpha")
    gs = args.gamma_grid.values() if args.gamma_grid is not None else np.linspace(th.gamma_plus, 1.0, 52)[1:-1]
    cols = ["gamma", "kt", "rom_minus_1", "mirror", "abs_diff"]
    rows = []
    for g in gs:
        lhs, rhs = ghzx.resource_mirror_check(args.alpha, float(g))
        rows.append([float(g), _kt(g), lhs, rhs, abs(lhs - rhs)])
    if max(r[-1] for r in rows) > 1e-10:
        raise VerificationFailure("mirror identity violated", cols, rows)
    return cols, rows


# -- verify -----------------------------------------------------------------


def _check_complementarity():
    err = 0.0
    for n in range(2, 9):
        for a in np.arange(1, 14) * 0.05:
            th = ghzx.thresholds(n, float(a))
            err = max(err, abs(th.gamma_e + th.gamma_plus - 1.0)) if th.gamma_plus is not None else err
    return err, 1e-12


def _check_lp(n, points):
    bad = 0
    err = 0.0
    dic = stabset.stabilizer_dictionary(n)
    for a in (0.2, 0.4, 0.55, 1 / math.sqrt(2)):
        for g in np.linspace(0.0, 1.0, points):
            pt = ghzx.ghzx_point(n, a, float(g))
            rho = pt.density()
            bad += stabset.membership_lp(rho, dic).inside != ghzx.membership_closed(pt)
            err = max(err, abs(stabset.robustness_lp(rho, dic).value - ghzx.rom_closed(pt)))
    return err + bad, ROM_TOL  # any verdict mismatch pushes the error past tolerance


def _check_counts(nmax):
    expected = {1: 6, 2: 60, 3: 1080, 4: 36720}
    err = sum(abs(len(stabset.enumerate_stabilizer_states(n)) - expected[n]) for n in range(1, nmax + 1))
    return float(err), 0.0


def _check_extraction():
    err = 0.0
    for n in range(2, 6):
        for a in (0.2, 0.4, 0.6):
            for g in (0.1, 0.5, 0.8):
                dec, ps = extract.simulate_parity_extraction(ghzx.ghzx_density(n, a, g))
                res = extract.parity_extract(n, a, g)
                err = max(err, float(np.max(np.abs(dec - res.decoded))), abs(ps - res.success_probability))
    return err, 1e-12


def _check_complementary_channel():
    err = 0.0
    for n in (2, 3):
        rho = qcore.pure_density(qcore.ghz_vector(n, 0.4))
        for g in (0.2, 0.5, 0.9):
            lhs = np.asarray(qcore.complementary_ad_output(rho, g))
            rhs = np.asarray(qcore.apply_local_channel(rho, qcore.amplitude_damping_kraus(1 - g)))
            err = max(err, float(np.max(np.abs(lhs - rhs))))
    return err, 1e-12


def _check_witnesses():
    bad = 0
    for n in (2, 3):
        dic = stabset.stabilizer_dictionary(n)
        for s in (1, -1):
            for j in (0, 1):
                bad += not stabset.validate_witness_feasibility(stabset.ghzx_witness(n, s, j), dic)
    return float(bad), 0.0


def cmd_verify(args):
    checks = [
        ("complementarity", _check_complementarity),
        ("lp_n2", lambda: _check_lp(2, args.points)),
        ("enumeration_counts", lambda: _check_counts(4 if args.full else 3)),
        ("extraction_oracle", _check_extraction),
        ("complementary_channel", _check_complementary_channel),
        ("witness_feasibility", _check_witnesses),
    ]
    if args.full:
        checks.insert(2, ("lp_n3", lambda: _check_lp(3, args.points)))
    cols = ["check", "max_error", "tolerance", "status"]
    rows = []
    for name, fn in checks:
        err, tol = fn()
        rows.append([name, err, tol, "pass" if err <= tol else "FAIL"])
    if any(r[-1] == "FAIL" for r in rows):
        raise VerificationFailure("verification failed", cols, rows)
    return cols, rows


# --------------------------------------------------------------------------
# parser


def _add_common(p):
    p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_gamma(p, grid_default="0:1:101", required=False):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--gamma", type=_unit, default=None)
    g.add_argument("--gamma-grid", type=_grid, default=_grid(grid_default) if grid_default else None,
                   metavar="MIN:MAX:POINTS")


def _alpha(x):
    x = float(x)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return x


def _nq(x):
    x = int(x)
    if not 1 <= x <= config.MAX_QUBITS:
        raise argparse.ArgumentTypeError(f"n must lie in 1..{config.MAX_QUBITS}")
    return x


def _nonneg(x):
    x = int(x)
    if x < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="adstab", description="Magic and entanglement under local amplitude damping.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("thresholds", help="GHZ-X thresholds and regime labels")
    s.add_argument("--n", type=_nq, required=True)
    a = s.add_mutually_exclusive_group(required=True)
    a.add_argument("--alpha", type=_alpha)
    a.add_argument("--alpha-grid", type=_grid, metavar="MIN:MAX:POINTS")
    s.add_argument("--eta", type=_unit, default=1.0, help="extra dephasing factor on the coherence")
    s.set_defaults(func=cmd_thresholds)

    s = sub.add_parser("scan", help="closed-form membership and robustness along gamma")
    s.add_argument("--n", type=_nq, required=True)
    s.add_argument("--alpha", type=_alpha, required=True)
    _add_gamma(s)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("trajectory", help="robustness, concurrence, negativity and M2 along gamma")
    s.add_argument("--state", choices=("ghz", "bell-phi", "bell-psi", "dicke"), default="ghz")
    s.add_argument("--n", type=_nq, default=2)
    s.add_argument("--alpha", type=_alpha, default=1 / math.sqrt(2))
    s.add_argument("--k", type=_nonneg, default=1)
    s.add_argument("--no-rom", action="store_true", help="skip the robustness column")
    s.add_argument("--allow-n4", action="store_true", help="permit n = 4 robustness LPs (slow)")
    _add_gamma(s)
    s.set_defaults(func=cmd_trajectory)

    s = sub.add_parser("rom", help="closed-form robustness, optionally checked by LP")
    s.add_argument("--n", type=_nq, required=True)
    s.add_argument("--alpha", type=_alpha, required=True)
    s.add_argument("--gamma", type=_unit, required=True)
    s.add_argument("--verify-lp", action="store_true")
    s.add_argument("--allow-n4", action="store_true")
    s.set_defaults(func=cmd_rom)

    s = sub.add_parser("extract", help="parity-syndrome extraction Bloch data")
    s.add_argument("--n", type=_nq, required=True)
    s.add_argument("--alpha", type=_alpha, required=True)
    _add_gamma(s)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("enumerate", help="stabilizer states as JSON lines")
    s.add_argument("--n", type=_nq, required=True)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("classify", help="insulator/generator counts")
    s.add_argument("--n", type=_nq, required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("dicke", help="membership of damped Dicke states")
    s.add_argument("--n", type=_nq, required=True)
    s.add_argument("--k", type=_nonneg, required=True)
    s.add_argument("--lp", action="store_true", help="add an LP robustness column")
    s.add_argument("--allow-n4", action="store_true")
    _add_gamma(s)
    s.set_defaults(func=cmd_dicke)

    s = sub.add_parser("haar", help="endpoint-only obstruction rate for Haar inputs")
    s.add_argument("--n", type=_nq, required=True)
    s.add_argument("--samples", type=_nonneg, default=10000)
    s.add_argument("--seed", type=_nonneg, default=0)
    s.add_argument("--gamma-grid", type=_grid, default=None, metavar="MIN:MAX:POINTS")
    s.set_defaults(func=cmd_haar)

    s = sub.add_parser("slice", help="vacuum plus punctured affine plane")
    s.add_argument("--n", type=_nq, required=True)
    s.add_argument("--L", required=True, help="three comma-separated bitstrings")
    s.add_argument("--alpha", type=_alpha, required=True)
    _add_gamma(s)
    s.set_defaults(func=cmd_slice)

    s = sub.add_parser("pairing", help="three-qubit pairing Hamiltonian ground state")
    x = s.add_mutually_exclusive_group(required=True)
    x.add_argument("--xi", type=float)
    x.add_argument("--xi-grid", type=_grid, metavar="MIN:MAX:POINTS")
    s.add_argument("--mu", type=float, default=1.0)
    s.set_defaults(func=cmd_pairing)

    s = sub.add_parser("mirror", help="two-qubit resource mirror on the reborn branch")
    s.add_argument("--alpha", type=_alpha, required=True)
    s.add_argument("--gamma-grid", type=_grid, default=None, metavar="MIN:MAX:POINTS")
    s.set_defaults(func=cmd_mirror)

    s = sub.add_parser("verify", help="closed forms against the enumeration/LP oracle")
    s.add_argument("--points", type=int, default=21, help="gamma points per alpha in the LP checks")
    s.add_argument("--full", action="store_true", help="include n = 3 LPs and the n = 4 count")
    s.set_defaults(func=cmd_verify)

    for sp in sub.choices.values():
        _add_common(sp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        out = args.func(args)
    except VerificationFailure as exc:
        _, cols, rows = exc.args
        _write(args, _render(args, cols, rows))
        print(f"adstab: {exc.args[0]}", file=sys.stderr)
        return EXIT_VERIFY
    except (CapabilityError, stabset.LpSolverError) as exc:
        print(f"adstab: capability limit: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"adstab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(args, out if isinstance(out, str) else _render(args, *out))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
