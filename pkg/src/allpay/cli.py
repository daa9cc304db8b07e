"""Command-line front end.

Subcommands map one-to-one onto the experiments the library supports:

    solve     equilibrium strategies (and prizes, for opt) -> CSV
    prize     optimal prize schedules -> CSV
    profit    profit sweeps over lambda and/or n -> CSV
    verify    deviation/IR/SA/monotonicity checks -> report + exit code
    mc        seeded Monte Carlo campaign -> CSV
    figures   the four standard datasets (fig1..fig4) -> CSV

All numeric output is CSV (RFC-4180 style, dot decimal, 12 significant
digits); plotting is a separate concern handled by the figviz package.
Exit codes: 0 success, 1 usage or config error, 2 solver error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .benchmarks import MechanismError, OptimizerError
from .config import CASE_STUDY, ConfigError, LoadedConfig, load_config
from .mechanisms import MECHANISMS, best_fixed_prize, mechanism_profit, solve_profile
from .model import PowerLaw, AtomUniform
from .numerics import NumericsError
from .optimal import SolverError, build_opt_strategies, opt_profit, solve_opt_effort
from .verify import (
    check_sa,
    monte_carlo_campaign,
    perturb_profile,
    verify_equilibrium,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3

FIG_LAMBDAS = (0.1, 0.3, 0.5)


class CliUsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems via exit code 1."""

    def error(self, message):
        raise CliUsageError(message)


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise CliUsageError(f"bad number list {text!r}: {exc}") from exc


def _parse_ints(text: str) -> list[int]:
    """Comma list with 'a..b' range syntax, e.g. '2..20' or '2,4,8'."""
    out: list[int] = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ".." in tok:
            a, b = tok.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    if not out:
        raise CliUsageError(f"empty integer list {text!r}")
    return out


def _build_parser() -> _Parser:
    parser = _Parser(prog="allpay", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mechanism=True):
        p.add_argument("--config", default=CASE_STUDY,
                       help=f"config file path or the preset name {CASE_STUDY!r}")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--lam", type=float, default=None,
                       help="override the principal valuation lambda")
        p.add_argument("--prize", type=float, default=1.0,
                       help="fixed prize Z for benchmark mechanisms")
        p.add_argument("--n", type=int, default=None,
                       help="agent count for sym/sym1/sym2/fixn mechanisms")
        if mechanism:
            p.add_argument("--mechanism", default="opt", choices=MECHANISMS)

    p = sub.add_parser("solve", help="equilibrium strategies to strategies.csv")
    common(p)
    p.add_argument("--grid", type=int, default=201, help="types per agent in the CSV")

    p = sub.add_parser("prize", help="optimal prize schedules to prizes.csv")
    common(p, mechanism=False)
    p.add_argument("--grid", type=int, default=201, help="efforts per agent in the CSV")

    p = sub.add_parser("profit", help="profit sweep to profit.csv")
    common(p)
    p.add_argument("--all", action="store_true",
                   help="sweep the four case-study mechanisms (opt, fix, sym1, sym2)")
    p.add_argument("--lambdas", default=None, help="comma list of lambda values")
    p.add_argument("--ns", default=None, help="agent counts, e.g. '2..20' or '2,4,8'")
    p.add_argument("--optimal-prize", action="store_true",
                   help="use the profit-maximizing fixed prize instead of --prize")

    p = sub.add_parser("verify", help="equilibrium verification report")
    common(p)
    p.add_argument("--type-points", type=int, default=101)
    p.add_argument("--bid-points", type=int, default=2001)
    p.add_argument("--tol", type=float, default=1e-3,
                   help="maximum tolerated deviation gain")
    p.add_argument("--perturb", type=float, default=0.0,
                   help="testing aid: shift all bids by this amount before verifying")

    p = sub.add_parser("mc", help="Monte Carlo campaign to mc.csv")
    common(p)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=20240801)

    p = sub.add_parser("figures", help="write fig1.csv .. fig4.csv")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--n-max", type=int, default=50, help="largest agent count in fig4")

    return parser


def _load(args) -> LoadedConfig:
    return load_config(args.config, lam=args.lam)


def _cmd_solve(args) -> int:
    loaded = _load(args)
    profile = solve_profile(loaded.spec, args.mechanism, prize=args.prize,
                            n=args.n, settings=loaded.numerics)
    out = Path(args.out)
    support = profile.agents[0].support
    v_grid = np.linspace(support.lo, support.hi, args.grid)
    rows = []
    for i, s in enumerate(profile.strategies):
        b = np.asarray(s.forward(v_grid))
        rows.extend((str(i + 1), v, bb) for v, bb in zip(v_grid, b))
    _write_csv(out / "strategies.csv", ["agent", "v", "b"], rows)
    print(f"wrote {out / 'strategies.csv'}")
    if args.mechanism == "opt":
        _write_prizes(profile, out, args.grid)
    return EXIT_OK


def _write_prizes(profile, out: Path, grid: int) -> None:
    rows = []
    for i, z in enumerate(profile.prizes):
        b_grid = np.linspace(z.b_min if z.b_min > 0 else z.max_bid / grid,
                             z.max_bid, grid)
        rows.extend((str(i + 1), b, zz) for b, zz in zip(b_grid, np.asarray(z(b_grid))))
    _write_csv(out / "prizes.csv", ["agent", "b", "Z"], rows)
    print(f"wrote {out / 'prizes.csv'}")


def _cmd_prize(args) -> int:
    loaded = _load(args)
    profile = solve_profile(loaded.spec, "opt", settings=loaded.numerics)
    _write_prizes(profile, Path(args.out), args.grid)
    return EXIT_OK


def _cmd_profit(args) -> int:
    loaded = _load(args)
    spec = loaded.spec
    mechanisms = ["opt", "fix", "sym1", "sym2"] if args.all else [args.mechanism]
    lambdas = _parse_floats(args.lambdas) if args.lambdas else [spec.lam]
    ns = _parse_ints(args.ns) if args.ns else [None]
    rows = []
    for mech in mechanisms:
        for lam in lambdas:
            lam_spec = load_config(args.config, lam=lam).spec
            for n in ns:
                n_eff = n if n is not None else lam_spec.n
                try:
                    if args.optimal_prize and mech != "opt":
                        _, value = best_fixed_prize(lam_spec, mech, n=n,
                                                    settings=loaded.numerics)
                    else:
                        value = mechanism_profit(lam_spec, mech, prize=args.prize,
                                                 n=n, settings=loaded.numerics)
                    rows.append((mech, lam, n_eff, value, "ok"))
                except (SolverError, MechanismError, OptimizerError, NumericsError) as exc:
                    print(f"row failed: {mech} lambda={lam} n={n_eff}: {exc}", file=sys.stderr)
                    rows.append((mech, lam, n_eff, "", "failed"))
    out = Path(args.out)
    _write_csv(out / "profit.csv", ["mechanism", "lambda", "n", "profit", "status"], rows)
    print(f"wrote {out / 'profit.csv'}")
    return EXIT_OK if all(r[-1] == "ok" for r in rows) else EXIT_SOLVER


def _sa_replacements(spec):
    lo, hi = spec.support.lo, spec.support.hi
    return (PowerLaw(alpha=3.0, lo=lo, hi=hi),
            PowerLaw(alpha=0.5, lo=lo, hi=hi),
            AtomUniform(w=0.3, lo=lo, hi=hi))


def _cmd_verify(args) -> int:
    loaded = _load(args)
    profile = solve_profile(loaded.spec, args.mechanism, prize=args.prize,
                            n=args.n, settings=loaded.numerics)
    if args.perturb:
        profile = perturb_profile(profile, args.perturb)
    sa = None
    if args.mechanism == "opt" and not args.perturb:
        sa = check_sa(loaded.spec, 0, _sa_replacements(loaded.spec), loaded.numerics)
    report = verify_equilibrium(profile, args.type_points, args.bid_points,
                                tol=args.tol, sa=sa)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = [
        f"mechanism:            {profile.label}",
        f"max deviation gain:   {report.deviation.max_gain:.6e}"
        f"  (tol {args.tol:g}, grids {args.type_points}x{args.bid_points})",
        f"worst deviation:      agent {report.deviation.worst[0] + 1}"
        f" type {report.deviation.worst[1]:.6g} bid {report.deviation.worst[2]:.6g}",
        f"IR minimum utility:   {report.ir.min_utility:.6e}"
        f"  (strict violations: {report.ir.strict_violations})",
        f"monotonicity:         {'ok' if report.monotonicity.ok else 'FAILED'}",
    ]
    if sa is not None:
        lines.append(f"strategy autonomy:    max diff {sa.max_diff:.3e}"
                     f" over {len(sa.per_replacement)} replacements"
                     + (f"; fixed-prize contrast {sa.fix_contrast:.4g}"
                        if sa.fix_contrast is not None else ""))
    lines.append(f"result:               {'PASS' if report.passed else 'FAIL'}")
    text = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(text)
    (out / "report.json").write_text(json.dumps(dataclasses.asdict(report), indent=2))
    print(text, end="")
    print(f"wrote {out / 'report.txt'} and report.json")
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_mc(args) -> int:
    loaded = _load(args)
    profile = solve_profile(loaded.spec, args.mechanism, prize=args.prize,
                            n=args.n, settings=loaded.numerics)
    result = monte_carlo_campaign(profile, args.trials, args.seed)
    rows = [
        ("profit_mean", "", result.profit_mean),
        ("profit_stderr", "", result.profit_stderr),
        ("trials", "", float(result.trials)),
        ("seed", "", float(result.seed)),
    ]
    rows.extend(("effort_mean", str(i + 1), e) for i, e in enumerate(result.effort_means))
    out = Path(args.out)
    _write_csv(out / "mc.csv", ["metric", "agent", "value"], rows)
    print(f"{profile.label}: profit {result.profit_mean:.6f}"
          f" +- {result.profit_stderr:.6f} ({result.trials} trials, seed {result.seed})")
    print(f"wrote {out / 'mc.csv'}")
    return EXIT_OK


def _cmd_figures(args) -> int:
    out = Path(args.out)

    # fig1: profit vs lambda for the four case-study mechanisms.  The
    # fixed-prize profits are revenue - lambda * Z with a lambda-free
    # revenue, so each revenue is computed once (at Z = 1).
    lambdas = np.arange(0.02, 0.8001, 0.02)
    base = load_config(CASE_STUDY).spec
    revenue = {m: mechanism_profit(base, m) + base.lam for m in ("fix", "sym1", "sym2")}
    rows1 = []
    for lam in lambdas:
        spec = load_config(CASE_STUDY, lam=float(lam)).spec
        rows1.append((
            lam,
            mechanism_profit(spec, "opt"),
            revenue["fix"] - lam,
            revenue["sym1"] - lam,
            revenue["sym2"] - lam,
        ))
    _write_csv(out / "fig1.csv", ["lambda", "opt", "fix", "sym1", "sym2"], rows1)

    # fig2: strategies vs type, five series per lambda panel.
    v_grid = np.linspace(0.0, 1.0, 201)
    fixp = solve_profile(base, "fix")
    sym1p = solve_profile(base, "sym1")
    sym2p = solve_profile(base, "sym2")
    rows2 = []
    for lam in FIG_LAMBDAS:
        spec = load_config(CASE_STUDY, lam=lam).spec
        b_opt = [solve_opt_effort(spec, 0, float(v)) for v in v_grid]
        for k, v in enumerate(v_grid):
            rows2.append((lam, v, b_opt[k],
                          fixp.strategies[0].forward(v), fixp.strategies[1].forward(v),
                          sym1p.strategies[0].forward(v), sym2p.strategies[0].forward(v)))
    _write_csv(out / "fig2.csv",
               ["lambda", "v", "opt", "fix1", "fix2", "sym1", "sym2"], rows2)

    # fig3: the two optimal prize schedules vs winner effort, per lambda.
    rows3 = []
    for lam in FIG_LAMBDAS:
        spec = load_config(CASE_STUDY, lam=lam).spec
        profile = solve_profile(spec, "opt")
        top = profile.strategies[0].max_bid
        b_grid = np.linspace(top / 200.0, top, 200)
        z1 = np.asarray(profile.prizes[0](b_grid))
        z2 = np.asarray(profile.prizes[1](b_grid))
        rows3.extend((lam, b, a, c) for b, a, c in zip(b_grid, z1, z2))
    _write_csv(out / "fig3.csv", ["lambda", "b", "Z1", "Z2"], rows3)

    # fig4: profit vs n for the variable-prize and fixed-prize contests,
    # plus the fixed-prize saturation bound 2 - lambda.
    rows4 = []
    for lam in FIG_LAMBDAS:
        spec = load_config(CASE_STUDY, lam=lam).spec
        for n in range(2, args.n_max + 1):
            rows4.append((lam, n,
                          mechanism_profit(spec, "opt", n=n),
                          mechanism_profit(spec, "fixn", n=n),
                          2.0 - lam))
    _write_csv(out / "fig4.csv", ["lambda", "n", "opt_n", "fix_n", "bound"], rows4)

    for name in ("fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv"):
        print(f"wrote {out / name}")
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "prize": _cmd_prize,
    "profit": _cmd_profit,
    "verify": _cmd_verify,
    "mc": _cmd_mc,
    "figures": _cmd_figures,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (CliUsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, MechanismError, OptimizerError, NumericsError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
