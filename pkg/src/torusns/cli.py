"""Command-line entry points.

Exit statuses encode verification verdicts so runs can gate CI directly:
`run` and `decay` exit 0 iff every requested check holds, `lemmas` exits
0 iff the whole sweep holds, `wellposed` exits 0 iff the conditions hold
and the contraction converges.
"""

from __future__ import annotations

import argparse
import sys

from . import io, runner
from .config import KNOWN_CHECKS, load_config
from .decay import RadialProfile, continuum_linear_decay, fit_series
from .norms import hs_dot_norm, l2_norm, lemma_sweep, x_norm


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    manifest = runner.run(cfg)
    for name, ok in sorted(manifest.verdicts.items()):
        print(f"{name}: {'hold' if ok else 'FAIL'}")
    print(f"outputs in {cfg.output_dir}")
    return 0 if all(manifest.verdicts.values()) else 1


def _cmd_norms(args) -> int:
    f = io.read_field(args.field)
    sigmas = [float(s) for s in args.sigma.split(",")] if args.sigma else [-1.0, 0.0, 1.0]
    for s in sigmas:
        tag = "m" + f"{-s:g}" if s < 0 else f"{s:g}"
        print(f"x_{tag} = {x_norm(f, s):.17g}")
    print(f"l2 = {l2_norm(f):.17g}")
    print(f"hdot1 = {hs_dot_norm(f, 1.0):.17g}")
    return 0


def _cmd_lemmas(args) -> int:
    result = lemma_sweep(args.trials, args.seed, n_grid=args.n)
    for name in ("lem1", "lem2", "lem3", "product"):
        print(
            f"{name}: {result['counts'][name]}/{result['expected'][name]} hold, "
            f"worst relative margin {result['worst_relative_margin'][name]:.3e}"
        )
    if result["failures"]:
        print(f"failures: {result['failures'][:10]}")
    return 0 if result["all_hold"] else 1


def _cmd_wellposed(args) -> int:
    cfg = load_config(args.config)
    result = runner.wellposed_run(cfg)
    out = args.output or "wellposed_report.json"
    io.dump_json(out, result)
    cond = result["conditions"]
    print(f"lambda = {result['lambda']:g}, k0 = {result['k0']:g}, tail = {result['tail']:g}")
    print(f"conditions all_hold = {cond.all_hold} (epsilon = {cond.epsilon:g}, T = {cond.T:g})")
    if result["contraction"] is not None:
        c = result["contraction"]
        print(
            f"contraction: converged = {c.converged}, iterations = {c.iterations}, "
            f"observed ratio = {c.observed_ratio:g}"
        )
        print(f"crosscheck X^0 error = {result['crosscheck_x0_error']:g}")
    print(f"report in {out}")
    if not cond.all_hold:
        return 1
    return 0 if result["succeeded"] else 2


def _cmd_decay(args) -> int:
    checks = list(KNOWN_CHECKS) if args.check == "all" else [args.check]
    fit_window = None
    if args.fit_window:
        lo, hi = args.fit_window.split(":")
        fit_window = (float(lo), float(hi))
    sigmas = [float(s) for s in args.sigma.split(",")] if args.sigma else None
    reports, fits = runner.decay_checks_from_dir(args.run_dir, checks, fit_window, sigmas)
    ok = True
    for name, rep in sorted(reports.items()):
        if rep.all_hold is None:
            print(f"{name}: not applicable ({rep.params.get('reason', '')})")
            ok = False
        else:
            print(f"{name}: {'hold' if rep.all_hold else 'FAIL'} (worst margin {rep.worst_margin:.3e})")
            ok = ok and rep.all_hold
    if fits:
        for name, fit in sorted(fits.items()):
            print(
                f"fit sigma={name}: slope {fit.slope:.6f} (reference {fit.reference_slope:g}, "
                f"r^2 {fit.r_squared:.6f})"
            )
    return 0 if ok else 1


def _parse_profile(text: str) -> RadialProfile:
    parts = text.split(":")
    if parts[0] == "plateau" and len(parts) == 4:
        return RadialProfile("plateau", float(parts[1]), float(parts[2]), float(parts[3]))
    if parts[0] == "power_law" and len(parts) == 5:
        return RadialProfile(
            "power_law", float(parts[1]), float(parts[2]), float(parts[3]),
            exponent=float(parts[4]),
        )
    raise SystemExit(
        f"bad profile {text!r}: use plateau:amplitude:r_lo:r_hi or "
        "power_law:amplitude:r_lo:r_hi:exponent"
    )


def _cmd_surrogate(args) -> int:
    profile = _parse_profile(args.profile)
    times = [float(t) for t in args.times.split(",")]
    rows = continuum_linear_decay(profile, args.nu, times)
    print("t,xm1,l2")
    for r in rows:
        print(f"{r['t']:.17g},{r['xm1']:.17g},{r['l2']:.17g}")
    if args.fit and len(rows) >= 5:
        fit = fit_series(
            [r["t"] for r in rows], [r["xm1"] for r in rows], -1.0,
            (min(times), max(times)),
        )
        print(f"# slope {fit.slope:.6f} (reference {fit.reference_slope:g})",
              file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="torusns",
        description="Pseudo-spectral Navier-Stokes on the 3-torus with "
        "critical-space decay verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("config")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("norms", help="norm table of a field snapshot")
    p.add_argument("field")
    p.add_argument("--sigma", default="", help="comma-separated exponents")
    p.set_defaults(func=_cmd_norms)

    p = sub.add_parser("lemmas", help="property sweep of the interpolation checks")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=16)
    p.set_defaults(func=_cmd_lemmas)

    p = sub.add_parser("wellposed", help="rescale/split/conditions/contraction pipeline")
    p.add_argument("config")
    p.add_argument("--output", default="")
    p.set_defaults(func=_cmd_wellposed)

    p = sub.add_parser("decay", help="decay verifiers against a stored run")
    p.add_argument("run_dir")
    p.add_argument("--check", default="all", choices=("all",) + KNOWN_CHECKS)
    p.add_argument("--fit-window", default="", help="t_lo:t_hi")
    p.add_argument("--sigma", default="", help="comma-separated exponents")
    p.set_defaults(func=_cmd_decay)

    p = sub.add_parser("surrogate", help="continuum radial heat-flow decay table")
    p.add_argument("--profile", required=True)
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--times", required=True)
    p.add_argument("--fit", action="store_true")
    p.set_defaults(func=_cmd_surrogate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
