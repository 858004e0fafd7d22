"""Command-line client for the verification workbench.

Thin by design: every subcommand assembles a command spec and either runs
it in-process through the same registry the HTTP service uses, or posts it
to a running service when --server is given.  Reports are emitted as a
single sorted-key JSON document (stdout by default); the exit code is 0
exactly when the report passes, 1 when a residual exceeds its tolerance,
and 2 on errors.

``qtriag serve`` starts the FastAPI app with uvicorn.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .commands import COMMANDS, CommandError, run_command


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtriag",
        description="verification workbench for the twisted triangular-matrix "
                    "quantum group",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--seed", type=int, default=42,
                       help="seed for randomized checks (recorded in report)")
        p.add_argument("--output", type=str, default=None,
                       help="write the JSON report here instead of stdout")
        p.add_argument("--server", type=str, default=None,
                       help="POST to a running service, e.g. http://host:8000")

    p = sub.add_parser("nf", help="normal-order an expression")
    p.add_argument("expr", type=str,
                   help="expression text, e.g. 'a*bs' or '(3/2+1/2i)*s^-4*a^2 b'")
    common(p)

    p = sub.add_parser("check-relations",
                       help="relation engine: confluence, star closure, "
                            "q-ladder, polar q")
    p.add_argument("--max-ladder", type=int, default=5, dest="max_ladder")
    common(p)

    p = sub.add_parser("check-coassoc",
                       help="coproduct homomorphism and coassociativity")
    p.add_argument("--degree", type=int, default=2)
    common(p)

    p = sub.add_parser("check-flip",
                       help="flip symmetry: opposite coproduct at s -> s^-1")
    p.add_argument("--degree", type=int, default=2)
    common(p)

    p = sub.add_parser("cocycle", help="bicharacter cocycle/antisymmetry suite")
    p.add_argument("--x", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=10_000)
    common(p)

    p = sub.add_parser("fintwist", help="finite-model twisting suite")
    p.add_argument("--n", type=int, default=5, help="modulus of the finite ring")
    p.add_argument("--bichar", type=str, default="i^{ab}",
                   help="named bicharacter: i^{ab} (standard) or trivial")
    p.add_argument("--bichar-json", type=str, default=None, dest="bichar_json",
                   help="path to a bicharacter table in the exchange format")
    common(p)

    p = sub.add_parser("spectrum", help="modular element spectrum on a truncation")
    p.add_argument("--x", type=float, default=0.1)
    p.add_argument("--trunc", type=int, default=50)
    p.add_argument("--csv", type=str, default=None,
                   help="also write mode,eigenvalue rows to this path")
    common(p)

    p = sub.add_parser("qtorus", help="q-commutation relations on the lattice model")
    p.add_argument("--x", type=float, default=0.05)
    p.add_argument("--trunc", type=int, default=64)
    p.add_argument("--depth", type=int, default=3)
    common(p)

    p = sub.add_parser("witness", help="non-isomorphism witness via spectral ratios")
    p.add_argument("--x", type=float, default=0.1)
    p.add_argument("--y", type=float, default=0.2)
    common(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", type=str, default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


_PARAM_NAMES = {
    "nf": ["expr"],
    "check-relations": ["max_ladder"],
    "check-coassoc": ["degree"],
    "check-flip": ["degree"],
    "cocycle": ["x", "samples"],
    "fintwist": ["n", "bichar"],
    "spectrum": ["x", "trunc"],
    "qtorus": ["x", "trunc", "depth"],
    "witness": ["x", "y"],
}


def _collect_params(args: argparse.Namespace) -> dict:
    params = {name: getattr(args, name) for name in _PARAM_NAMES[args.command]}
    if args.command == "fintwist" and getattr(args, "bichar_json", None):
        with open(args.bichar_json) as fh:
            params["bichar"] = json.load(fh)
    return params


def dispatch(command: str, params: dict, seed: int,
             server: str | None = None) -> dict:
    """Run locally through the registry, or remotely over HTTP."""
    if server is None:
        return run_command(command, params, seed=seed).to_dict()
    import httpx

    resp = httpx.post(
        f"{server.rstrip('/')}/v1/run",
        json={"command": command, "params": params, "seed": seed},
        timeout=600.0,
    )
    resp.raise_for_status()
    return resp.json()


def emit(report: dict, path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("qtriag.service:app", host=args.host, port=args.port)
        return 0

    try:
        params = _collect_params(args)
        report = dispatch(args.command, params, args.seed, args.server)
    except CommandError as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return 2
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return 2

    try:
        emit(report, args.output)
        if args.command == "spectrum" and args.csv is not None:
            _write_spectrum_csv(report, args.csv)
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": f"emit failed: {exc}"}) + "\n")
        return 2

    if report.get("error"):
        return 2
    return 0 if report.get("pass") else 1


def _write_spectrum_csv(report: dict, path: str) -> None:
    spectrum = report["values"]["spectrum"]
    trunc = (len(spectrum) - 1) // 2
    with open(path, "w") as fh:
        fh.write("mode,eigenvalue\n")
        for mode, value in zip(range(-trunc, trunc + 1), reversed(spectrum)):
            fh.write(f"{mode},{value!r}\n")


if __name__ == "__main__":
    sys.exit(main())
