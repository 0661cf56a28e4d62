"""Command line interface: run a config, verify a bundled example, or
inspect torsion/pairing data.  Exit codes: 0 pass, 1 computational error,
2 verification mismatch, 3 config error."""

from __future__ import annotations

import argparse
import sys

from .config import load_config_file
from .errors import ConfigInvalid, EllBrauerError, UnknownExample
from .factor import set_degree_cap


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ellbrauer",
        description="Generators and relations of the q-torsion of the Brauer group of an elliptic curve",
    )
    parser.add_argument("--degree-cap", type=int, default=None, help="tower degree cap")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the algorithm on a config file")
    p_run.add_argument("config")
    p_run.add_argument("--output", default=None, help="write the JSON report here")
    p_run.add_argument("--json", action="store_true", help="print the JSON report")
    p_run.add_argument("--strict", action="store_true", help="fail when any caveat is raised")

    p_verify = sub.add_parser("verify", help="verify a bundled worked example")
    p_verify.add_argument("example")
    p_verify.add_argument("--output", default=None)
    p_verify.add_argument("--json", action="store_true")
    p_verify.add_argument("--strict", action="store_true")

    p_torsion = sub.add_parser("torsion", help="print the torsion basis and Galois action")
    p_torsion.add_argument("config")

    p_pairing = sub.add_parser("pairing", help="print the Weil pairing on the torsion basis")
    p_pairing.add_argument("config")

    args = parser.parse_args(argv)
    if args.degree_cap is not None:
        set_degree_cap(args.degree_cap)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "torsion":
            return _cmd_torsion(args)
        if args.command == "pairing":
            return _cmd_pairing(args)
        return 3
    except (ConfigInvalid, UnknownExample, FileNotFoundError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 3
    except EllBrauerError as e:
        print(f"computational error [{type(e).__name__}]: {e}", file=sys.stderr)
        return 1


def _cmd_run(args) -> int:
    from .pipeline import run_job

    config = load_config_file(args.config)
    report = run_job(config)
    out_path = args.output or config.output_spec.get("path")
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(report.to_json() + "\n")
    if args.json:
        print(report.to_json())
    else:
        for line in report.summary_lines():
            print(line)
    if args.strict and report.caveats():
        print("strict mode: caveats present", file=sys.stderr)
        return 1
    return 0


def _cmd_verify(args) -> int:
    from .pipeline import verify_example

    passed, checks, report = verify_example(args.example)
    for label, ok, detail in checks:
        mark = "PASS" if ok else "FAIL"
        line = f"[{mark}] {label}"
        if detail and not ok:
            line += f" -- {detail}"
        print(line)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(report.to_json() + "\n")
    if args.json:
        print(report.to_json())
    if not passed:
        return 2
    if args.strict and report.caveats():
        print("strict mode: caveats present", file=sys.stderr)
        return 1
    return 0


def _cmd_torsion(args) -> int:
    from .pipeline import run_job

    config = load_config_file(args.config)
    report = run_job(config)
    d = report.data
    print(f"splitting field: {d['classification']['L']}")
    print(f"degree over base: {d['classification']['degree_over_base']}")
    print(f"case: {d['classification']['case']}")
    print(f"P = {d['torsion_basis']['P']}")
    print(f"Q = {d['torsion_basis']['Q']}")
    for m in d["classification"]["matrices"]:
        tag = " (identity)" if m["identity"] else ""
        print(f"matrix: {m['matrix']}{tag}")
    return 0


def _cmd_pairing(args) -> int:
    from .curves import scalar_mul
    from .fields import rho_index
    from .funcfield import weil_pairing
    from .pipeline import run_job
    from .torsion import torsion_basis
    from .config import load_config_file as _load

    config = load_config_file(args.config)
    from .pipeline import run_job as _run

    # reuse the pipeline's basis construction via a full run, then print
    report = _run(config)
    d = report.data
    print(f"e(P, Q) = {d['torsion_basis']['pairing_check']['display']}")
    print(f"orientation power applied to Q: {d['torsion_basis']['orientation_power']}")
    print("basis:")
    print(f"  P = {d['torsion_basis']['P']}")
    print(f"  Q = {d['torsion_basis']['Q']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
