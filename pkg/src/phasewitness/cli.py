"""Command-line front end.

Exit status: 0 on success, 2 for malformed arguments or input files, 3 when a
computation rejects its inputs (for example an ordering outside the Gaussian
regime).
"""

from __future__ import annotations

import argparse
import math
import sys
from importlib import metadata

from ._validation import DomainError
from .analytic import certify_qng, distance_lower_bound, gaussian_lambda_min
from .detector import ArraySpec, click_probabilities, recover_quasiprobs, simulate_shots, witness_from_clicks
from .fileio import FormatError, dumps_clicks, dumps_report, dumps_table, load_state, loads_clicks, state_to_dict
from .states import GaussianState, apply_loss, fock_state, make_squeezed_thermal, squeezed_two_photon_mixture
from .witness import SearchConfig, optimize_points


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def parse_grid(text: str):
    """``start:stop:step`` (inclusive), a comma list, or a single number."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9))
            return [round(start + i * step, 12) for i in range(count + 1)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}; expected start:stop:step or a comma list")


def parse_complex(text: str) -> complex:
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        parts = []
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"invalid complex number {text!r}; expected re or re,im")
    return complex(parts[0], parts[1] if len(parts) == 2 else 0.0)


def parse_array(text: str):
    try:
        n, eta = text.split(",")
        return int(n), float(eta)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid array {text!r}; expected N,eta")


def parse_points(text: str):
    pts = []
    for item in text.split(";"):
        pts.append(parse_complex(item))
    return pts


def _int_list(text: str):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phasewitness",
        description="Phase-space witnesses of nonclassicality and quantum non-Gaussianity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default):
        p.add_argument("--output", "-o", default="-", help="output file ('-' for stdout)")
        p.add_argument("--format", choices=["json", "csv"], default=fmt_default)
        p.add_argument("--seed", type=int, default=0)

    def search(p):
        p.add_argument("--starts", type=int, default=16, help="Nelder-Mead starts per search")

    p = sub.add_parser("witness", help="optimized witness for a state file")
    p.add_argument("--state", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=float, default=0.0)
    search(p)
    common(p, "json")

    p = sub.add_parser("gaussian-scan", help="closed-form witness minimum over purity and squeezing")
    p.add_argument("--purity-grid", type=parse_grid, required=True)
    p.add_argument("--r-grid", type=parse_grid, required=True)
    p.add_argument("--s", type=float, default=0.0)
    common(p, "csv")

    p = sub.add_parser("fock-loss-scan", help="witness minimum of lossy Fock states")
    p.add_argument("--fock", type=_int_list, required=True)
    p.add_argument("--eta-grid", type=parse_grid, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=float, default=0.0)
    search(p)
    common(p, "csv")

    p = sub.add_parser("qng", help="non-Gaussianity margin of squeezed two-photon mixtures")
    p.add_argument("--f-grid", type=parse_grid, required=True)
    p.add_argument("--r", type=parse_grid, required=True, help="squeezing value(s)")
    search(p)
    common(p, "csv")

    p = sub.add_parser("detector-sim", help="click statistics, recovered quasiprobabilities, witness")
    p.add_argument("--state", required=True)
    p.add_argument("--array", type=parse_array, required=True, help="N,eta")
    p.add_argument("--alpha", type=parse_complex, default=0j, help="displacement re,im")
    p.add_argument("--points", type=parse_points, help="witness points 're,im;re,im;...'")
    p.add_argument("--m", type=int, default=0, help="ordering index for the witness")
    p.add_argument("--shots", type=int)
    common(p, "json")

    p = sub.add_parser("recover", help="quasiprobabilities from a click CSV")
    p.add_argument("--clicks", required=True)
    common(p, "json")
    return parser


def _config_echo(args):
    out = {}
    for key, val in sorted(vars(args).items()):
        if isinstance(val, complex):
            val = [val.real, val.imag]
        elif isinstance(val, list):
            val = [[v.real, v.imag] if isinstance(v, complex) else v for v in val]
        out[key] = val
    return out


def _provenance(args):
    return {"config": _config_echo(args), "version": _version(), "seed": args.seed}


def _search_config(args):
    return SearchConfig(n_starts=args.starts, seed=args.seed)


def _points_table(report):
    return ";".join(f"{fmt_c(p)}" for p in report.points.points)


def fmt_c(z):
    return f"{z.real:.11e}{z.imag:+.11e}j"


def cmd_witness(args):
    state = load_state(args.state)
    report = optimize_points(state, args.n, args.s, _search_config(args))
    payload = {"command": "witness", "state": state_to_dict(state), "report": report.to_dict()}
    if isinstance(state, GaussianState) and args.n == 2:
        closed = gaussian_lambda_min(state, args.s)
        payload["closed_form"] = {
            "lambda_min": closed.lambda_min,
            "points": [[p.real, p.imag] for p in closed.optimal_points],
        }
    if args.format == "csv":
        return dumps_table(
            ["n", "s", "lambda_min", "distance_bound", "verdict", "points"],
            [(args.n, args.s, report.min_eigenvalue, report.distance_bound, report.verdict.value, _points_table(report))],
        )
    payload["provenance"] = _provenance(args)
    return dumps_report(payload)


def cmd_gaussian_scan(args):
    rows = []
    for mu in args.purity_grid:
        for r in args.r_grid:
            state = make_squeezed_thermal(mu, r)
            opt = gaussian_lambda_min(state, args.s)
            x = abs(opt.optimal_points[0]) if opt.optimal_points else float("nan")
            rows.append(
                (float(mu), float(r), state.critical_squeezing, opt.lambda_min, x, distance_lower_bound(opt.lambda_min, 2))
            )
    header = ["purity", "squeezing", "critical_squeezing", "lambda_min", "optimal_x", "distance_bound"]
    if args.format == "csv":
        return dumps_table(header, rows)
    body = [dict(zip(header, [None if isinstance(v, float) and math.isnan(v) else v for v in row])) for row in rows]
    return dumps_report({"command": "gaussian-scan", "s": args.s, "rows": body, "provenance": _provenance(args)})


def cmd_fock_loss_scan(args):
    config = _search_config(args)
    rows = []
    for level in args.fock:
        if level < 0:
            raise DomainError("Fock levels must be non-negative")
        base = fock_state(level)
        for eta in args.eta_grid:
            state = apply_loss(base, eta)
            rep = optimize_points(state, args.n, args.s, config)
            rows.append((level, float(eta), rep.min_eigenvalue, rep.distance_bound, rep.verdict.value, _points_table(rep)))
    header = ["fock", "eta", "lambda_min", "distance_bound", "verdict", "points"]
    if args.format == "csv":
        return dumps_table(header, rows)
    body = [dict(zip(header, row)) for row in rows]
    return dumps_report({"command": "fock-loss-scan", "rows": body, "provenance": _provenance(args)})


def cmd_qng(args):
    config = _search_config(args)
    rows = []
    for r in args.r:
        warm = None
        for f in args.f_grid:
            rep = certify_qng(squeezed_two_photon_mixture(f, r), config, initial=warm)
            warm = rep.points
            verdict = "quantum-non-gaussian" if rep.quantum_non_gaussian else "not-certified"
            rows.append((float(r), float(f), rep.mean_photon, rep.lambda_min, rep.bound, rep.delta, verdict))
    header = ["squeezing", "fraction", "mean_photon", "lambda_min", "bound", "delta", "verdict"]
    if args.format == "csv":
        return dumps_table(header, rows)
    body = [dict(zip(header, row)) for row in rows]
    return dumps_report({"command": "qng", "rows": body, "provenance": _provenance(args)})


def cmd_detector_sim(args):
    state = load_state(args.state)
    spec = ArraySpec(*args.array)
    if args.shots is None:
        clicks, stderr = click_probabilities(state, args.alpha, spec), None
    else:
        clicks, stderr = simulate_shots(state, args.alpha, spec, args.shots, args.seed)
    if args.format == "csv":
        return dumps_clicks(clicks, stderr, args.shots, None if args.shots is None else args.seed)
    payload = {
        "command": "detector-sim",
        "state": state_to_dict(state),
        "clicks": list(clicks.probs),
        "stderr": None if stderr is None else list(stderr),
        "quasiprobabilities": [{"s": s, "value": v} for s, v in recover_quasiprobs(clicks)],
        "provenance": _provenance(args),
    }
    if args.points:
        rep = witness_from_clicks(state, args.points, spec, args.m, args.shots, args.seed)
        payload["witness"] = rep.to_dict()
    return dumps_report(payload)


def cmd_recover(args):
    try:
        with open(args.clicks, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read click file {args.clicks}: {exc.strerror}") from exc
    clicks, _, header = loads_clicks(text)
    values = recover_quasiprobs(clicks)
    if args.format == "csv":
        return dumps_table(["m", "s", "value"], [(m, s, v) for m, (s, v) in enumerate(values)])
    return dumps_report(
        {
            "command": "recover",
            "header": header,
            "quasiprobabilities": [{"s": s, "value": v} for s, v in values],
            "provenance": _provenance(args),
        }
    )


COMMANDS = {
    "witness": cmd_witness,
    "gaussian-scan": cmd_gaussian_scan,
    "fock-loss-scan": cmd_fock_loss_scan,
    "qng": cmd_qng,
    "detector-sim": cmd_detector_sim,
    "recover": cmd_recover,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = COMMANDS[args.command](args)
    except FormatError as exc:
        print(f"phasewitness: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"phasewitness: {args.command}: {exc}", file=sys.stderr)
        return 3
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
