"""Command-line surface: calibrate, sanitize, audit, attack, experiment, region.

Conventions shared by every subcommand:

* long flags only; numeric parsing is locale-independent (plain floats),
* the fully resolved configuration is echoed to standard error,
* output files are written atomically (temp file + rename),
* exit 0 on success, 2 on validation errors (one-line diagnostic), 1 on
  runtime errors.

Explicit --rho0/--rho1 override budget-driven calibration; supplying both a
budget and explicit rates is an error rather than a silent preference.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import chain as chain_mod
from . import experiments as exp_mod
from .attacks import attack_correlation_aware, attack_single_bit, attack_viterbi, evaluate
from .chain import BinaryMarkovChain
from .mechanisms import CorrelatedNoiseChain, NoiseParams, sanitize_correlated, sanitize_independent
from .privacy import (
    calibrate_asymmetric,
    calibrate_symmetric_exact,
    dp_noise,
    log_lr_bound,
    lr_bound,
    rho_sufficient_symmetric,
    zhao_eps3_noise,
    zhao_eps6_noise,
)


class CliError(Exception):
    """Validation problem: reported as a one-line diagnostic with exit status 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdpmc",
        description="Sanitize binary Markov-chain series under Bayesian differential privacy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="compute noise rates for a budget")
    _common_chain_flags(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", choices=("exact", "closed", "dp", "zhao3", "zhao6"),
                   default="exact")
    p.add_argument("--n", type=int, default=30, help="chain length (zhao6 mode)")

    p = sub.add_parser("sanitize", help="sanitize a bit series from a file")
    _common_chain_flags(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--rho0", type=float)
    p.add_argument("--rho1", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=("independent", "correlated"), default="independent")

    p = sub.add_parser("audit", help="print the worst-case likelihood-ratio bounds")
    _common_chain_flags(p)
    p.add_argument("--rho0", type=float, required=True)
    p.add_argument("--rho1", type=float, required=True)
    p.add_argument("--eps", type=float, help="also check the bounds against e^eps")

    p = sub.add_parser("attack", help="reconstruct hidden bits from a sanitized file")
    _common_chain_flags(p)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--rho0", type=float, required=True)
    p.add_argument("--rho1", type=float, required=True)
    p.add_argument("--mode", choices=("sb", "ca", "viterbi"), default="viterbi")
    p.add_argument("--i", dest="index", type=int, help="1-based target index (sb/ca)")
    p.add_argument("--truth", help="true bit series for scoring")
    p.add_argument("--out", dest="outfile", help="write the viterbi guess here")

    p = sub.add_parser("experiment", help="run an experiment family and write CSVs")
    p.add_argument("which", choices=("fig2", "fig3", "fig4"))
    _common_chain_flags(p)
    p.add_argument("--eps", type=float, default=0.5, help="budget for fig2")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--databases", type=int, default=100)
    p.add_argument("--replicates", type=int, help="sanitizations per database")
    p.add_argument("--thetas", help="comma-separated theta grid (fig2)")
    p.add_argument("--eps-grid", dest="eps_grid", help="comma-separated budgets (fig3/fig4)")
    p.add_argument("--in", dest="infile", help="real-valued series file (fig4)")
    p.add_argument("--lstm-csv", dest="lstm_csv", help="eps,lstm_accuracy file to merge (fig4)")
    p.add_argument("--emit-bits", dest="emit_bits", action="store_true",
                   help="also write truth/sanitized bit files (fig4)")

    p = sub.add_parser("region", help="tabulate the feasible noise region")
    _common_chain_flags(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--resolution", type=int, default=50)
    p.add_argument("--out", dest="outfile", required=True)
    return parser


def _common_chain_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=float, help="0->1 transition rate")
    p.add_argument("--r", type=float, help="1->0 transition rate")
    p.add_argument("--theta", type=float, help="symmetric rate (sets q = r = theta)")


def _resolve_chain(args, required: bool = True) -> BinaryMarkovChain | None:
    has_qr = args.q is not None or args.r is not None
    if args.theta is not None:
        if has_qr:
            raise CliError("give either --theta or --q/--r, not both")
        return BinaryMarkovChain(args.theta, args.theta)
    if args.q is None and args.r is None:
        if required:
            raise CliError("chain parameters required: --theta or --q and --r")
        return None
    if args.q is None or args.r is None:
        raise CliError("--q and --r must be given together")
    return BinaryMarkovChain(args.q, args.r)


def _cmd_calibrate(args) -> int:
    if args.mode in ("dp",):
        print(repr(dp_noise(args.eps)))
        return 0
    if args.mode in ("zhao3", "zhao6", "closed", "exact") and args.theta is None and args.q is None:
        raise CliError("chain parameters required: --theta or --q and --r")
    if args.mode == "zhao3":
        _require_theta(args)
        value = zhao_eps3_noise(args.theta, args.eps)
        if math.isnan(value):
            raise CliError("budget is below the single-step reduction threshold")
        print(repr(value))
        return 0
    if args.mode == "zhao6":
        _require_theta(args)
        value = zhao_eps6_noise(args.theta, args.eps, args.n)
        if math.isnan(value):
            raise CliError("budget infeasible for the piecewise-linear reduction")
        print(repr(value))
        return 0
    chain = _resolve_chain(args)
    if chain.is_symmetric:
        if args.mode == "closed":
            print(repr(rho_sufficient_symmetric(chain.q, args.eps)))
        else:
            print(repr(calibrate_symmetric_exact(chain.q, args.eps)))
        return 0
    if args.mode == "closed":
        raise CliError("closed-form calibration needs a symmetric chain (--theta)")
    noise = calibrate_asymmetric(chain, args.eps)
    print(f"{noise.rho0!r} {noise.rho1!r}")
    return 0


def _require_theta(args) -> None:
    if args.theta is None:
        raise CliError("this mode needs --theta")


def _resolve_noise(args, chain: BinaryMarkovChain | None) -> NoiseParams:
    explicit = args.rho0 is not None or args.rho1 is not None
    if explicit and args.eps is not None:
        raise CliError("give either --eps or explicit --rho0/--rho1, not both")
    if explicit:
        if args.rho0 is None or args.rho1 is None:
            raise CliError("--rho0 and --rho1 must be given together")
        return NoiseParams(args.rho0, args.rho1)
    if args.eps is None:
        raise CliError("noise unspecified: give --eps or --rho0/--rho1")
    if chain is None:
        raise CliError("budget calibration needs chain parameters")
    if chain.is_symmetric:
        rho = calibrate_symmetric_exact(chain.q, args.eps)
        return NoiseParams(rho, rho)
    return calibrate_asymmetric(chain, args.eps)


def _cmd_sanitize(args) -> int:
    bits = chain_mod.read_bits(args.infile)
    if args.mode == "correlated":
        if args.eps is not None:
            raise CliError("correlated mode takes explicit --rho0/--rho1, not --eps")
        if args.rho0 is None or args.rho1 is None:
            raise CliError("correlated mode needs --rho0 and --rho1")
        z = sanitize_correlated(bits, CorrelatedNoiseChain(args.rho0, args.rho1), args.seed)
    else:
        chain = _resolve_chain(args, required=args.eps is not None)
        noise = _resolve_noise(args, chain)
        z = sanitize_independent(bits, noise, args.seed)
    chain_mod.write_bits(args.outfile, z)
    return 0


def _cmd_audit(args) -> int:
    chain = _resolve_chain(args)
    noise = NoiseParams(args.rho0, args.rho1)
    b0, b1 = lr_bound(chain, noise)
    print(f"{b0!r} {b1!r}")
    if args.eps is not None:
        l0, l1 = log_lr_bound(chain, noise)
        print("within-budget" if max(l0, l1) <= args.eps else "exceeds-budget")
    return 0


def _cmd_attack(args) -> int:
    z = chain_mod.read_bits(args.infile)
    chain = _resolve_chain(args)
    noise = NoiseParams(args.rho0, args.rho1)
    if args.mode in ("sb", "ca"):
        if args.index is None:
            raise CliError(f"--i is required for mode {args.mode}")
        if args.mode == "sb":
            guess = attack_single_bit(z, args.index)
        else:
            guess = attack_correlation_aware(chain, noise, z, args.index)
        print(guess)
        if args.truth:
            truth = chain_mod.read_bits(args.truth)
            report = evaluate(truth, (args.index, guess), attacker=args.mode)
            print(f"accuracy {report.accuracy!r} stderr {report.stderr!r}")
        return 0
    guess = attack_viterbi(chain, noise, z)
    if args.outfile:
        chain_mod.write_bits(args.outfile, guess)
    else:
        print("".join(str(int(b)) for b in guess))
    if args.truth:
        truth = chain_mod.read_bits(args.truth)
        report = evaluate(truth, guess, attacker="viterbi")
        print(f"accuracy {report.accuracy!r} stderr {report.stderr!r}")
    return 0


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise CliError(f"not a comma-separated number list: {text!r}") from None


def _cmd_experiment(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    if args.which == "fig2":
        config = exp_mod.ExperimentConfig(
            n=args.n or 30,
            thetas=_parse_grid(args.thetas) if args.thetas else exp_mod.DEFAULT_FIG2_THETAS,
            eps=args.eps,
            databases=args.databases,
            sanitizations=args.replicates or 1000,
            seed=args.seed,
        )
        suc, eps_table = exp_mod.run_dp_insufficiency(config)
        suc.write_csv(os.path.join(args.out_dir, f"eps{args.eps:g}_suc.csv"))
        eps_table.write_csv(os.path.join(args.out_dir, f"eps{args.eps:g}_eps.csv"))
        return 0
    if args.which == "fig3":
        theta = args.theta if args.theta is not None else 0.35
        config = exp_mod.ExperimentConfig(
            n=args.n or 30,
            thetas=(theta,),
            eps_grid=_parse_grid(args.eps_grid) if args.eps_grid else exp_mod.DEFAULT_EPS_GRID,
            seed=args.seed,
        )
        table = exp_mod.run_noise_privacy_comparison(config)
        table.write_csv(os.path.join(args.out_dir, "noise_privacy.csv"))
        return 0
    # fig4
    bits = None
    chain = _resolve_chain(args, required=False)
    if args.infile:
        series = chain_mod.read_real_series(args.infile)
        bits = chain_mod.binarize(series)
    elif chain is None:
        raise CliError("fig4 needs --in (real series) or --q/--r (synthetic chain)")
    config = exp_mod.ExperimentConfig(
        n=args.n or 16859,
        chain=chain,
        eps_grid=_parse_grid(args.eps_grid) if args.eps_grid else exp_mod.DEFAULT_EPS_GRID,
        databases=1,
        sanitizations=args.replicates or 1,
        seed=args.seed,
    )
    table = exp_mod.run_reconstruction_vs_bound(
        config, bits=bits, lstm_csv=args.lstm_csv,
        emit_dir=args.out_dir if args.emit_bits else None,
    )
    table.write_csv(os.path.join(args.out_dir, "reconstruction.csv"))
    return 0


def _cmd_region(args) -> int:
    chain = _resolve_chain(args)
    if args.eps <= 0:
        raise CliError(f"--eps must be positive, got {args.eps}")
    table = exp_mod.feasible_region(chain, args.eps, args.resolution)
    table.write_csv(args.outfile)
    return 0


_HANDLERS = {
    "calibrate": _cmd_calibrate,
    "sanitize": _cmd_sanitize,
    "audit": _cmd_audit,
    "attack": _cmd_attack,
    "experiment": _cmd_experiment,
    "region": _cmd_region,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    resolved = {k: v for k, v in sorted(vars(args).items()) if v is not None}
    print(f"bdpmc config: {resolved}", file=sys.stderr)
    try:
        return _HANDLERS[args.command](args)
    except CliError as exc:
        print(f"bdpmc: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IndexError, OSError) as exc:
        print(f"bdpmc: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, (ValueError, IndexError)) else 1
    except Exception as exc:  # noqa: BLE001 -- runtime failures map to exit 1
        print(f"bdpmc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
