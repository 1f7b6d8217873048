"""Command-line front end.

Exit codes: 0 when every gating check passes, 1 when a check fails, 2 for
usage or configuration errors (with a one-line diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import experiments as ex
from .ensemble import EnsembleSpec, EntryDist, sample_checkerboard, write_matrix_csv
from .reports import Report, check_format, persist_report
from .spectral import classify_regimes, eigenvalues

SUBCOMMANDS = ("generate", "spectrum", "bulk", "split", "blip", "singleton", "independence", "fibonacci", "verify")

# every key a JSON config file may contain, with its built-in default
CONFIG_DEFAULTS = {
    "k": None,
    "weights": None,
    "weights_b": None,
    "dim": None,
    "trials": None,
    "seed": 0,
    "dist": "normal",
    "blip_value": None,
    "max_moment": 4,
    "n_override": None,
    "g_override": None,
    "n_floor": 12,
    "threshold_exponent": 0.75,
    "out": None,
    "format": "json",
    "workers": None,
    "trial": 0,
    "tolerances": {},
}


# trials default per subcommand
TRIAL_DEFAULTS = {"generate": 1, "spectrum": 1, "verify": 100_000}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Reports parse errors as one line instead of usage plus message."""

    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message} (see --help)\n")


def parse_rational(text) -> Fraction:
    """Decimal or ``p/q`` string to an exact fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(str(text))
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse {text!r} as a number") from None


def parse_weights(value) -> tuple[Fraction, ...]:
    if value is None:
        return None
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise UsageError("weights must be a comma separated string or a list")
    if not parts:
        raise UsageError("weights may not be empty")
    return tuple(parse_rational(p) for p in parts)


def _add_common(p: argparse.ArgumentParser, dist_choices=("normal", "rademacher", "zero")):
    # defaults are None so config files can be told apart from explicit flags
    p.add_argument("--config", help="JSON file with any of the flag values (underscored keys)")
    p.add_argument("--k", type=int, help="checkerboard modulus k")
    p.add_argument("--weights", help="comma separated weights w_1..w_k; p/q rationals accepted")
    p.add_argument("--dim", type=int, help="matrix size N")
    p.add_argument("--trials", type=int, help="number of trials (super-trials for blip and independence)")
    p.add_argument("--seed", type=int, help="root seed")
    p.add_argument("--dist", choices=dist_choices, help="law of the random entries")
    p.add_argument("--out", help="write the report (or matrix / spectra) here")
    p.add_argument("--format", choices=("json", "csv"), help="output format for --out")
    p.add_argument("--workers", type=int, help=f"worker threads (default from ${ex.WORKERS_ENV} or 1)")


def _add_experiment(p: argparse.ArgumentParser):
    p.add_argument("--blip-value", dest="blip_value", help="weight value whose blip is studied")
    p.add_argument("--max-moment", dest="max_moment", type=int, help="highest moment reported")
    p.add_argument("--n-override", dest="n_override", type=int, help="weight exponent parameter n (replaces max(n(N), n-floor))")
    p.add_argument("--n-floor", dest="n_floor", type=int, help="lower bound for the scheduled n (default 12)")
    p.add_argument("--g-override", dest="g_override", type=int, help="matrices per averaged blip measure (default ceil(sqrt N))")
    p.add_argument("--threshold-exponent", dest="threshold_exponent", type=float, help="regime window radius N**theta, theta in (1/2, 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="checkerboard", description="Checkerboard random matrix experiments.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    helps = {
        "generate": "sample one matrix and write it as CSV",
        "spectrum": "eigenvalues of sampled matrices",
        "bulk": "bulk moments against the semicircle",
        "split": "bulk/blip eigenvalue counts per trial",
        "blip": "averaged blip moments against their limits",
        "singleton": "deviation of a multiplicity-one blip eigenvalue",
        "independence": "compare one blip under two weight vectors",
        "fibonacci": "blips at N times the Fibonacci numbers",
        "verify": "exact identity suite and hollow GOE oracle checks",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name], description=helps[name])
        _add_common(p)
        if name in ("generate", "spectrum"):
            p.add_argument("--trial", type=int, help="first trial index (default 0)")
            p.add_argument("--threshold-exponent", dest="threshold_exponent", type=float, help="regime window exponent for the counts in spectrum output")
        elif name in ("bulk", "split", "blip", "singleton", "independence"):
            _add_experiment(p)
        if name == "independence":
            p.add_argument("--weights-b", dest="weights_b", help="second weight vector sharing the studied blip")
    return parser


def _merge(args: argparse.Namespace) -> dict:
    cfg = dict(CONFIG_DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as e:
            raise UsageError(f"cannot read config: {e}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"malformed JSON in {args.config}: {e}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must contain a JSON object")
        unknown = sorted(set(data) - set(CONFIG_DEFAULTS))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(data)
    for key in CONFIG_DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _spec(cfg, weights_key="weights") -> EnsembleSpec:
    if cfg["k"] is None or cfg[weights_key] is None or cfg["dim"] is None:
        raise UsageError("--k, --weights and --dim are required")
    weights = parse_weights(cfg[weights_key])
    return EnsembleSpec(int(cfg["k"]), tuple(float(w) for w in weights), int(cfg["dim"]), EntryDist(cfg["dist"]), int(cfg["seed"]))


def _experiment_config(cfg, spec=None, with_output=True) -> ex.ExperimentConfig:
    spec = spec or _spec(cfg)
    blip = cfg["blip_value"]
    return ex.ExperimentConfig(
        spec=spec,
        trials=int(cfg["trials"]),
        blip_value=float(parse_rational(blip)) if blip is not None else None,
        max_moment=int(cfg["max_moment"]),
        n_override=cfg["n_override"],
        g_override=cfg["g_override"],
        n_floor=int(cfg["n_floor"]),
        threshold_exponent=float(cfg["threshold_exponent"]),
        tolerances=dict(cfg["tolerances"] or {}),
        output_path=cfg["out"] if with_output else None,
        output_format=cfg["format"],
        workers=cfg["workers"],
    )


def _emit(report: Report) -> int:
    for line in report.summary_lines():
        print(line)
    print(f"{report.experiment}: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def _cmd_generate(cfg) -> int:
    spec = _spec(cfg)
    m = sample_checkerboard(spec, int(cfg["trial"]))
    if cfg["out"]:
        write_matrix_csv(m, cfg["out"])
    else:
        np.savetxt(sys.stdout, m, delimiter=",", fmt="%.17g")
    return 0


def _cmd_spectrum(cfg) -> int:
    spec = _spec(cfg)
    check_format(cfg["format"])
    first = int(cfg["trial"])
    rows, counts = [], []
    for t in range(first, first + int(cfg["trials"])):
        s = eigenvalues(sample_checkerboard(spec, t))
        rows.append(s.values)
        if spec.distinct_weights():
            try:
                p = classify_regimes(s, spec, float(cfg["threshold_exponent"]))
                counts.append([p.bulk_count, *p.blip_counts])
            except ValueError:
                counts.append(None)
    if cfg["format"] == "csv":
        text = "\n".join(",".join(repr(float(v)) for v in r) for r in rows) + "\n"
    else:
        text = json.dumps(
            {
                "spec": spec.to_dict(),
                "trials": list(range(first, first + len(rows))),
                "eigenvalues": [r.tolist() for r in rows],
                "blip_values": spec.distinct_weights(),
                "regime_counts": counts,
            },
            indent=2,
            sort_keys=True,
        ) + "\n"
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_fibonacci(cfg) -> int:
    dim = int(cfg["dim"] if cfg["dim"] is not None else 100)
    k_n = int(cfg["k"] if cfg["k"] is not None else 10)
    tols = dict(cfg["tolerances"] or {})
    rep = ex.run_fibonacci(
        dim, k_n, int(cfg["trials"]), int(cfg["seed"]), cfg["dist"], cfg["workers"], tols, cfg["out"], cfg["format"]
    )
    return _emit(rep)


def _cmd_verify(cfg) -> int:
    check_format(cfg["format"])
    seed = int(cfg["seed"])
    a = ex.run_exact_identities(seed)
    trials = int(cfg["trials"])
    b = ex.run_hollow_goe(trials=trials, seed=seed, tolerances=dict(cfg["tolerances"] or {}))
    rep = Report(
        "verify",
        {"seed": seed, "goe_trials": trials},
        statistics=a.statistics + b.statistics,
        extras={**a.extras, "hollow_goe": b.config},
        seed_provenance={"identities": a.seed_provenance, "hollow_goe": b.seed_provenance},
        wall_clock_seconds=a.wall_clock_seconds + b.wall_clock_seconds,
    )
    if cfg["out"]:
        persist_report(rep, cfg["out"], cfg["format"])
    return _emit(rep)


def _dispatch(command: str, cfg: dict) -> int:
    if command == "generate":
        return _cmd_generate(cfg)
    if command == "spectrum":
        return _cmd_spectrum(cfg)
    if command == "fibonacci":
        return _cmd_fibonacci(cfg)
    if command == "verify":
        return _cmd_verify(cfg)
    if command == "independence":
        if cfg["weights_b"] is None:
            raise UsageError("independence needs --weights-b")
        ca = _experiment_config(cfg)
        cb = _experiment_config(cfg, _spec(cfg, "weights_b"), with_output=False)
        return _emit(ex.run_independence(ca, cb))
    config = _experiment_config(cfg)
    runner = {
        "bulk": ex.run_bulk,
        "split": ex.run_split_count,
        "blip": ex.run_blip_moments,
        "singleton": ex.run_singleton_blip,
    }[command]
    return _emit(runner(config))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    try:
        cfg = _merge(args)
        if cfg["trials"] is None:
            cfg["trials"] = TRIAL_DEFAULTS.get(args.command, 20)
        return _dispatch(args.command, cfg)
    except (UsageError, ValueError, TypeError, KeyError) as e:
        msg = str(e).strip().splitlines()[0] if str(e).strip() else type(e).__name__
        print(f"checkerboard {args.command}: error: {msg}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"checkerboard {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
