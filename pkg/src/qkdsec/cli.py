"""Command-line front end.

Subcommands::

    bounds    closed-form eavesdropper-success bounds (CSV or JSON)
    keyrate   key-rate-versus-QBER sweep (CSV file, optional figure)
    simulate  one seeded BB84 session (summary line + JSON transcript)
    verify    brute-force oracle suites (pass/fail report)

Every subcommand is deterministic given its flags (including --seed).
Exit codes: 0 success, 1 verification violation, 2 flag/config error,
3 session aborted on the error estimate, 4 session key verification
failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import rates as rates_mod
from . import simulator as sim_mod
from . import verify as verify_mod
from .bounds import (
    SecurityParams,
    guessing_bound,
    guessing_floor,
    kpa_bound,
    near_miss_bound,
    pa_guess_bound,
)
from .numerics import Log2Value
from .postproc import resolve_code

BOUNDS_CSV_HEADER = "name,log2_exponent,linear_value,exceeds_unity"


def _log2_flag(text: str) -> Log2Value:
    """Parse a log2-valued flag: a (negative) exponent, or -inf for zero."""
    if text.strip().lower() in ("-inf", "inf"):
        return Log2Value.zero()
    return Log2Value(float(text))


def _fmt(x: float) -> str:
    return "%.12g" % x


def _bound_row(name: str, value: Log2Value) -> dict:
    linear, exceeded = value.saturated()
    return {
        "name": name,
        "log2_exponent": _fmt(value.exponent),
        "linear_value": _fmt(linear),
        "exceeds_unity": "1" if exceeded else "0",
    }


def _emit_bounds(rows, fmt: str, out) -> None:
    if fmt == "json":
        doc = {"schema_version": 1, "bounds": rows}
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        names = BOUNDS_CSV_HEADER.split(",")
        out.write(BOUNDS_CSV_HEADER + "\n")
        for row in rows:
            out.write(",".join(row[c] for c in names) + "\n")


def cmd_bounds(args) -> int:
    params = SecurityParams(epsilon=args.eps, key_bits=args.key_bits)
    rows = [
        _bound_row("guess_floor", guessing_floor(params)),
        _bound_row("guessing_bound", guessing_bound(params)),
    ]
    if args.unknown_bits is not None:
        rows.append(_bound_row("kpa_bound",
                               kpa_bound(params, args.unknown_bits)))
    if args.qe is not None:
        rows.append(_bound_row("near_miss_bound",
                               near_miss_bound(params, args.qe)))
    if (args.delta is None) != (args.p_correct is None):
        raise ValueError("--delta and --p-correct must be given together")
    if args.delta is not None:
        rows.append(_bound_row("pa_guess_bound",
                               pa_guess_bound(args.p_correct, args.delta)))
    _emit_bounds(rows, args.format, sys.stdout)
    return 0


def cmd_keyrate(args) -> int:
    grid = rates_mod.default_q_grid(q_max=args.q_max, q_step=args.q_step)
    curves = []
    for k in args.sifted_len:
        params = rates_mod.RateModelParams(
            sifted_len=k, leak_model=args.model, xi=args.xi)
        curves.append(rates_mod.rate_curve(params, grid))
    text = rates_mod.curves_to_csv(curves)
    if args.out:
        rates_mod.write_csv_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plotting import render_rate_curves
        render_rate_curves(curves, args.plot)
    return 0


def cmd_simulate(args) -> int:
    config = sim_mod.ProtocolConfig(
        n_pulses=args.pulses,
        channel_flip_prob=args.flip,
        eve_intercept_fraction=args.intercept,
        sample_fraction=args.sample_fraction,
        abort_qber=args.abort_qber,
        code=resolve_code(args.code),
        leak_model=args.leak_model,
        xi=args.xi,
        pa_out_len=args.pa_out_len if args.pa_out_len == "auto" else int(args.pa_out_len),
        rng_seed=args.seed,
    )
    transcript = sim_mod.run_session(config)
    if args.transcript:
        with open(args.transcript, "w", encoding="ascii") as fh:
            fh.write(transcript.to_json())
    print("status=%s sifted=%d qber=%s leak_bits=%d final_key_bits=%d"
          % (transcript.status, transcript.sifted_len, _fmt(transcript.estimated_q),
             transcript.leak_bits_consumed, len(transcript.final_key_alice)))
    if transcript.status == sim_mod.STATUS_ABORTED_QBER:
        return 3
    if transcript.status == sim_mod.STATUS_VERIFICATION_FAILED:
        return 4
    return 0


def cmd_verify(args) -> int:
    names = ["mathcore", "qstate", "postproc"] if args.suite == "all" else [args.suite]
    reports = verify_mod.run_suites(names, trials=args.trials, seed=args.seed)
    ok = True
    for report in reports:
        for check in report["checks"]:
            status = "PASS" if check["violations"] == 0 else "FAIL"
            print("[%s] %s: %s  (%d cases, %d violations)"
                  % (report["suite"], status, check["name"],
                     check["cases"], check["violations"]))
            for failure in check["failures"]:
                print("    failing case: %r" % (failure,))
        ok = ok and report["passed"]
    return 0 if ok else 1


def _int_flag(text: str) -> int:
    # accepts 1e9-style exponents for lengths
    return int(float(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdsec",
        description="Finite-key QKD security analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "bounds",
        help="closed-form eavesdropper-success bounds",
        description="Print eavesdropper-success bounds: the blind-guessing floor "
                    "2^(-key_bits), the whole-key guessing bound 2^(-key_bits)+eps, "
                    "and on request the known-part (kpa), near-miss (--qe) and "
                    "post-hashing (--delta/--p-correct) bounds.")
    p.add_argument("--eps", type=_log2_flag, required=True,
                   help="trace-distance bound as a log2 exponent (e.g. -50; -inf for 0)")
    p.add_argument("--key-bits", type=_int_flag, required=True,
                   help="final key length in bits")
    p.add_argument("--qe", type=float, default=None,
                   help="bit-error rate still readable to the adversary "
                        "(adds the near-miss bound)")
    p.add_argument("--unknown-bits", type=_int_flag, default=None,
                   help="unknown key bits after a known-plaintext attack "
                        "(adds the kpa bound)")
    p.add_argument("--delta", type=_log2_flag, default=None,
                   help="hash-family collision bound as a log2 exponent")
    p.add_argument("--p-correct", type=_log2_flag, default=None,
                   help="pre-hashing guessing probability as a log2 exponent")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser(
        "keyrate",
        help="key-rate-versus-QBER sweep",
        description="Sweep the finite-key rate model over an error-rate grid, one "
                    "curve per sifted length, and write the CSV (and optionally a "
                    "rendered figure).")
    p.add_argument("--sifted-len", type=_int_flag, action="append", required=True,
                   help="sifted key length; repeat for a curve family")
    p.add_argument("--model", choices=("conventional", "yuen"), default="conventional",
                   help="syndrome-hiding leakage model")
    p.add_argument("--xi", type=float, default=1.1,
                   help="efficiency factor of the conventional leakage model")
    p.add_argument("--q-max", type=float, default=0.12)
    p.add_argument("--q-step", type=float, default=0.002)
    p.add_argument("--out", default=None,
                   help="CSV output path (written atomically); stdout if omitted")
    p.add_argument("--plot", default=None,
                   help="also render the curves to this image file")
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser(
        "simulate",
        help="run one seeded BB84 session",
        description="Run one deterministic session (random bits/bases, optional "
                    "intercept-resend attack, sifting, error estimation with abort, "
                    "syndrome reconciliation, verification, hashing) and print a "
                    "summary line.")
    p.add_argument("--pulses", type=_int_flag, required=True)
    p.add_argument("--flip", type=float, default=0.0,
                   help="channel bit-flip probability")
    p.add_argument("--intercept", type=float, default=0.0,
                   help="fraction of pulses the eavesdropper intercepts and resends")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--code", default="hamming7",
                   help="reconciliation code: named (%s) or a parity-check file"
                        % ", ".join(sorted(("hamming7", "hamming15", "rep3", "rep5"))))
    p.add_argument("--leak-model", choices=("conventional", "yuen"),
                   default="conventional")
    p.add_argument("--xi", type=float, default=1.1)
    p.add_argument("--sample-fraction", type=float, default=0.25)
    p.add_argument("--abort-qber", type=float, default=0.11)
    p.add_argument("--pa-out-len", default="auto",
                   help="final key length, or 'auto' for the finite-key model")
    p.add_argument("--transcript", default=None,
                   help="write the full JSON transcript to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "verify",
        help="run brute-force oracle suites",
        description="Exhaustive and randomized cross-checks of the analytic "
                    "bounds; prints one line per inequality with case counts and "
                    "exits nonzero on any violation.")
    p.add_argument("--suite", choices=("mathcore", "qstate", "postproc", "all"),
                   default="all")
    p.add_argument("--trials", type=_int_flag, default=1000,
                   help="randomized trials for the qstate suite")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_verify)

    return parser


_LOG2_FLAGS = ("--eps", "--delta", "--p-correct")


def _normalize_argv(argv):
    """Join log2-valued flags with '-inf' values so argparse keeps them.

    argparse's negative-number heuristic covers '-50' but not '-inf',
    which would otherwise be taken for an unknown option.
    """
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LOG2_FLAGS and i + 1 < len(argv) \
                and argv[i + 1].strip().lower() in ("-inf", "inf"):
            out.append(tok + "=" + argv[i + 1])
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_normalize_argv(list(argv)))
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
