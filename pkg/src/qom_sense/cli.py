"""Command-line surface.

    qom-sense <command> --params <file> [--set key=value]... [--out <dir>]
              [--format csv|json] [--jobs N] [--seed S]

Commands: steady, eigen, chi, psd, sensitivity, verify, reproduce-figure.
Exit codes: 0 success, 1 check failure, 2 usage error, 3 numeric
degeneracy at a requested evaluation point.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .core import DegeneracyError, DomainError, ParameterError, PARAM_FILE_KEYS, params_from_mapping, _read_flat_config
from .figures import FIGURE_IDS, build_figure
from .noise import position_psd, radiation_spectrum, thermal_spectrum
from .runio import SweepResult, build_manifest, write_csv, write_manifest
from .sensing import sensitivity_report
from .spectral import ChiMode, default_omega_grid, spectral_structure, susceptibility
from .steady import critical_drive, steady_state
from .verify import run_verification

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qom-sense", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser):
        p.add_argument("--params", required=True, help="TOML or JSON parameter file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a parameter-file key")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)

    for name, help_text in (
        ("steady", "mean-field steady state and critical drive"),
        ("eigen", "complex eigenfrequencies, exceptional points, regime"),
        ("chi", "mechanical susceptibility on the default frequency grid"),
        ("psd", "position PSD and noise floors on the default frequency grid"),
        ("sensitivity", "temperature-sensing sensitivity at the configured drive"),
    ):
        add_common(sub.add_parser(name, help=help_text))

    p_verify = sub.add_parser("verify", help="run the self-verification suite")
    add_common(p_verify)
    p_verify.add_argument("--level", choices=("fast", "full"), default="fast")

    p_fig = sub.add_parser("reproduce-figure", help="export one of the bundled figure datasets")
    p_fig.add_argument("figure_id", choices=FIGURE_IDS)
    add_common(p_fig)

    return parser


def _load_params(args):
    raw = dict(_read_flat_config(Path(args.params)))
    for item in args.overrides:
        if "=" not in item:
            raise ParameterError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in PARAM_FILE_KEYS:
            raise ParameterError(f"--set key must be one of {', '.join(PARAM_FILE_KEYS)}, got {key!r}")
        raw[key] = value.strip()
    return params_from_mapping(raw)


def _write_result(result: SweepResult, args, stem: str, comments=None) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        path = out_dir / f"{stem}.json"
        payload = {
            "schema_version": result.schema_version,
            "columns": {name: np.asarray(col).tolist() for name, col in result.columns.items()},
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        path = write_csv(result, out_dir / f"{stem}.csv", comments=comments)
    return path


def _finish(result: SweepResult, args, stem: str, started: float, comments=None,
            degenerate_if_nonfinite=()) -> int:
    data_path = _write_result(result, args, stem, comments)
    manifest_path = write_manifest(result.manifest, Path(args.out) / f"{stem}.manifest.json",
                                   wall_time_s=time.monotonic() - started)
    print(f"wrote {data_path} and {manifest_path}")
    for name in degenerate_if_nonfinite:
        values = np.asarray(result.columns[name], dtype=float)
        if not np.all(np.isfinite(values)):
            print(f"note: non-finite values in column {name!r} (evaluation point at a divergence)")
            return EXIT_DEGENERATE
    return EXIT_OK


def _cmd_steady(params, args, started) -> int:
    st = steady_state(params)
    wc = critical_drive(params)
    cols = {
        "omega_drive_rad_s": [params.Omega],
        "omega_c_rad_s": [wc],
        "omega_drive_offset_over_gamma_m": [(params.Omega - wc) / params.gamma_m],
        "alpha_re": [st.alpha.real],
        "alpha_im": [st.alpha.imag],
        "photon_number": [st.photon_number],
        "q_s2": [st.Q_s2],
        "q_s": [st.Q_s],
        "p_s": [st.P_s],
        "above_threshold": [int(st.above_threshold)],
    }
    result = SweepResult(columns=cols, manifest=build_manifest("steady", params, args.overrides, args.seed))
    return _finish(result, args, "steady", started)


def _cmd_eigen(params, args, started) -> int:
    s = spectral_structure(params)
    cols = {
        "omega_drive_rad_s": [params.Omega],
        "re_omega_plus_rad_s": [s.omega_plus.real],
        "im_omega_plus_rad_s": [s.omega_plus.imag],
        "re_omega_minus_rad_s": [s.omega_minus.real],
        "im_omega_minus_rad_s": [s.omega_minus.imag],
        "omega_c_rad_s": [s.omega_c_drive],
        "omega_ep1_rad_s": [s.omega_ep1],
        "omega_ep2_rad_s": [s.omega_ep2],
        "regime": [s.regime.value],
    }
    result = SweepResult(columns=cols, manifest=build_manifest("eigen", params, args.overrides, args.seed))
    return _finish(result, args, "eigen", started)


def _cmd_chi(params, args, started) -> int:
    st = steady_state(params)
    grid = default_omega_grid(params.omega_m)
    chi = np.asarray(susceptibility(params, st, grid, ChiMode.EXACT))
    cols = {
        "omega_rad_s": grid,
        "omega_over_omega_m": grid / params.omega_m,
        "chi_real": chi.real,
        "chi_imag": chi.imag,
        "abs_chi_sq": np.abs(chi) ** 2,
    }
    result = SweepResult(columns=cols, manifest=build_manifest("chi", params, args.overrides, args.seed))
    return _finish(result, args, "chi", started, degenerate_if_nonfinite=("abs_chi_sq",))


def _cmd_psd(params, args, started) -> int:
    st = steady_state(params)
    grid = default_omega_grid(params.omega_m)
    cols = {
        "omega_rad_s": grid,
        "omega_over_omega_m": grid / params.omega_m,
        "s_m_th_per_s": thermal_spectrum(params, grid, params.T),
        "s_c_vac_per_s": radiation_spectrum(params, st, grid),
        "s_qq_seconds": position_psd(params, st, grid, params.T),
    }
    result = SweepResult(columns=cols, manifest=build_manifest("psd", params, args.overrides, args.seed))
    return _finish(result, args, "psd", started, degenerate_if_nonfinite=("s_qq_seconds",))


def _cmd_sensitivity(params, args, started) -> int:
    report = sensitivity_report(params, params.T)
    cols = {
        "omega_drive_rad_s": [params.Omega],
        "temperature_k": [params.T],
        "regime": [report.regime.value],
        "omega_eval_rad_s": [report.omega_eval],
        "xi_closed_s_per_k": [report.xi_closed_form],
        "xi_numeric_s_per_k": [report.xi_numeric],
    }
    result = SweepResult(columns=cols, manifest=build_manifest("sensitivity", params, args.overrides, args.seed))
    return _finish(result, args, "sensitivity", started,
                   degenerate_if_nonfinite=("xi_closed_s_per_k", "xi_numeric_s_per_k"))


def _cmd_verify(params, args, started) -> int:
    report = run_verification(params, level=args.level, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "verify_report.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(build_manifest("verify", params, args.overrides, args.seed,
                                  extra={"level": args.level}),
                   out_dir / "verify_report.manifest.json",
                   wall_time_s=time.monotonic() - started)
    for check in report["checks"]:
        line = f"[{check['status']:>7}] {check['name']}"
        if check.get("detail"):
            line += f": {check['detail']}"
        elif check["status"] == "fail":
            line += f": observed={check['observed']!r} expected={check['expected']!r}"
        print(line)
    print(f"report written to {report_path}")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def _cmd_reproduce_figure(params, args, started) -> int:
    result = build_figure(args.figure_id, params, jobs=args.jobs)
    result.manifest["overrides"] = list(args.overrides)
    result.manifest["seed"] = args.seed
    comments = [f"figure {args.figure_id}: {result.manifest['description']}",
                "units: frequencies normalized as named; raw columns in rad/s; PSD in seconds"]
    return _finish(result, args, f"figure_{args.figure_id}", started, comments=comments)


_COMMANDS = {
    "steady": _cmd_steady,
    "eigen": _cmd_eigen,
    "chi": _cmd_chi,
    "psd": _cmd_psd,
    "sensitivity": _cmd_sensitivity,
    "verify": _cmd_verify,
    "reproduce-figure": _cmd_reproduce_figure,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        params = _load_params(args)
        return _COMMANDS[args.command](params, args, started)
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegeneracyError as exc:
        print(f"numeric degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
