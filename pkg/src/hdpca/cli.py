"""Configuration-driven command line front end.

Subcommands: ``spectrum`` (eigenvalue/sphericity tables and condition
verdicts), ``classify`` (regime and eigenvalue-limit tables), ``simulate``
(Monte Carlo aggregate reports), and ``verify`` (classify + simulate +
prediction checks, exiting nonzero on any failed check so CI can gate on it).

Progress goes to standard error; in text mode standard output carries only
the final summary table.  Exit codes: 0 pass, 1 verification failure,
2 config error, 3 unsupported structure, 4 excessive replicate failures,
5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .asymptotics import (
    INDEPENDENT_BOUNDED8TH,
    RHO_MIXING_BOUNDED4TH,
    classify,
    two_block_regime,
    limits_to_json,
    predict_eigenvalue_limits,
    spike_structure_from_model,
)
from .errors import (
    BoundaryUnsupportedError,
    ConfigError,
    ExperimentError,
    HdpcaError,
    UnsupportedStructureError,
)
from .harness import (
    SPEC_VERSION,
    AggregateReport,
    ExperimentPlan,
    run_experiment,
    verify_prediction,
)
from .sampling import GAUSSIAN, SCALE_MIXTURE, NoiseSpec, SeedSpec, noise_from_config
from .spectra import BlockEquicorrelation, CovarianceModel, condition_check, model_from_config, sphericity

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_UNSUPPORTED = 3
EXIT_REPLICATE_FAILURES = 4
EXIT_IO = 5

_FORMATS = ("csv", "json", "text")

_TOP_KEYS = {"model", "noise", "plan", "seed", "output", "spectrum", "classify"}
_PLAN_KEYS = {
    "n",
    "n_grid",
    "d_grid",
    "replicates",
    "metrics",
    "tracked_groups",
    "angle_indices",
    "angle_ceiling_deg",
    "right_angle_floor_deg",
    "deviation_ceiling",
    "flat_band_deg",
}


@dataclass
class RunConfig:
    model: CovarianceModel
    noise: NoiseSpec | None
    plan_table: dict | None
    seed: SeedSpec
    out_dir: str
    formats: tuple[str, ...]
    spectrum_k: int
    spectrum_grid: tuple[int, ...] | None
    classify_n: int | None
    gaussian: bool | None


def load_config(path: str) -> RunConfig:
    """Parse and validate the TOML run configuration; unknown keys are errors."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    if "model" not in doc:
        raise ConfigError("missing [model] section")
    model = model_from_config(doc["model"])

    noise = noise_from_config(doc["noise"]) if "noise" in doc else None

    plan_table = doc.get("plan")
    if plan_table is not None:
        bad = set(plan_table) - _PLAN_KEYS
        if bad:
            raise ConfigError(f"plan: unknown keys {sorted(bad)}")
        if "n" in plan_table and "n_grid" in plan_table:
            raise ConfigError("plan: give either n or n_grid, not both")

    seed_table = doc.get("seed", {})
    bad = set(seed_table) - {"master"}
    if bad:
        raise ConfigError(f"seed: unknown keys {sorted(bad)}")
    seed = SeedSpec(master_seed=int(seed_table.get("master", 0)))

    out_table = doc.get("output", {})
    bad = set(out_table) - {"directory", "formats"}
    if bad:
        raise ConfigError(f"output: unknown keys {sorted(bad)}")
    out_dir = str(out_table.get("directory", "out"))
    formats = tuple(out_table.get("formats", list(_FORMATS)))
    if any(f not in _FORMATS for f in formats):
        raise ConfigError(f"output.formats entries must be among {_FORMATS}")

    spec_table = doc.get("spectrum", {})
    bad = set(spec_table) - {"k", "d_grid"}
    if bad:
        raise ConfigError(f"spectrum: unknown keys {sorted(bad)}")
    spectrum_k = int(spec_table.get("k", 1))
    spectrum_grid = tuple(int(d) for d in spec_table["d_grid"]) if "d_grid" in spec_table else None

    cls_table = doc.get("classify", {})
    bad = set(cls_table) - {"n", "gaussian"}
    if bad:
        raise ConfigError(f"classify: unknown keys {sorted(bad)}")
    classify_n = int(cls_table["n"]) if "n" in cls_table else None
    gaussian = bool(cls_table["gaussian"]) if "gaussian" in cls_table else None

    return RunConfig(
        model=model,
        noise=noise,
        plan_table=plan_table,
        seed=seed,
        out_dir=out_dir,
        formats=formats,
        spectrum_k=spectrum_k,
        spectrum_grid=spectrum_grid,
        classify_n=classify_n,
        gaussian=gaussian,
    )


def build_plan(config: RunConfig) -> ExperimentPlan:
    table = config.plan_table
    if table is None:
        raise ConfigError("this command needs a [plan] section")
    if config.noise is None:
        raise ConfigError("this command needs a [noise] section")
    if "d_grid" not in table or "replicates" not in table:
        raise ConfigError("plan: d_grid and replicates are required")
    n = table.get("n_grid", table.get("n"))
    if n is None:
        raise ConfigError("plan: n or n_grid is required")
    return ExperimentPlan(
        model=config.model,
        noise=config.noise,
        n=n,
        d_grid=tuple(table["d_grid"]),
        replicates=int(table["replicates"]),
        seed=config.seed,
        metrics=frozenset(table.get("metrics", ("angles",))),
        tracked_groups=tuple(tuple(g) for g in table.get("tracked_groups", ())),
        angle_indices=tuple(table.get("angle_indices", ())),
        angle_ceiling_deg=float(table.get("angle_ceiling_deg", 10.0)),
        right_angle_floor_deg=float(table.get("right_angle_floor_deg", 80.0)),
        deviation_ceiling=float(table.get("deviation_ceiling", 0.1)),
        flat_band_deg=float(table.get("flat_band_deg", 2.0)),
    )


def _classification_inputs(config: RunConfig):
    n = config.classify_n
    if n is None and config.plan_table is not None:
        raw = config.plan_table.get("n_grid", config.plan_table.get("n"))
        if raw is not None:
            n = max(raw) if isinstance(raw, (list, tuple)) else int(raw)
    if n is None:
        raise ConfigError("classification needs plan.n or classify.n")
    if config.gaussian is not None:
        gaussian = config.gaussian
    else:
        gaussian = config.noise is None or config.noise.law == GAUSSIAN
    if config.noise is not None and config.noise.law == SCALE_MIXTURE:
        z_assumption = RHO_MIXING_BOUNDED4TH
    else:
        z_assumption = INDEPENDENT_BOUNDED8TH
    return n, gaussian, z_assumption


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ensure_out_dir(config: RunConfig) -> None:
    os.makedirs(config.out_dir, exist_ok=True)
    probe = os.path.join(config.out_dir, ".write_probe")
    with open(probe, "w") as fh:
        fh.write("")
    os.remove(probe)


def _law_text(entry: dict) -> str:
    if entry["law"] == "chi_sq_over_n":
        return f"{entry['scale']:g} * chi2({entry['n']})/{entry['n']}"
    if entry["law"] == "wishart_eigenvalue":
        kind = "Wishart" if entry["gaussian"] else "Gram"
        return f"eig#{entry['order']} of {kind}(n={entry['n']}, C=diag{tuple(entry['c_diag'])})/n"
    return f"constant {entry['value']:g}"


def cmd_spectrum(config: RunConfig) -> int:
    grid = config.spectrum_grid
    if grid is None and config.plan_table is not None:
        grid = tuple(int(d) for d in config.plan_table.get("d_grid", ()))
    if not grid:
        raise ConfigError("spectrum needs spectrum.d_grid or plan.d_grid")
    if len(grid) < 3:
        raise ConfigError("spectrum needs at least 3 grid dimensions")
    k = config.spectrum_k
    rows = []
    for d in grid:
        rep = sphericity(config.model.eigenvalues(d), k)
        rows.append((d, k, rep.epsilon_k, rep.d_epsilon_k, rep.sqrtd_epsilon_k))
    verdict = condition_check(config.model, k, grid)

    _ensure_out_dir(config)
    if "csv" in config.formats:
        with open(os.path.join(config.out_dir, "spectrum.csv"), "w", encoding="utf-8") as fh:
            fh.write("d,k,epsilon_k,d_epsilon_k,sqrtd_epsilon_k\n")
            for d, kk, e, de, sde in rows:
                fh.write(f"{d},{kk},{e:.12g},{de:.12g},{sde:.12g}\n")
    if "json" in config.formats:
        _write_json(
            os.path.join(config.out_dir, "condition.json"),
            {
                "spec_version": SPEC_VERSION,
                "family": config.model.family,
                "k": k,
                "epsilon_condition": verdict.epsilon_condition,
                "strong_epsilon_condition": verdict.strong_epsilon_condition,
                "basis": verdict.basis,
                "rows": [
                    {"d": d, "epsilon_k": e, "d_epsilon_k": de, "sqrtd_epsilon_k": sde}
                    for d, _, e, de, sde in rows
                ],
            },
        )
    if "text" in config.formats:
        print(f"family: {config.model.family}  k={k}")
        print(f"epsilon-condition: {verdict.epsilon_condition}   strong: {verdict.strong_epsilon_condition}   basis: {verdict.basis}")
        print(f"{'d':>10} {'epsilon_k':>14} {'d*eps':>14} {'sqrt(d)*eps':>14}")
        for d, _, e, de, sde in rows:
            print(f"{d:>10} {e:>14.6g} {de:>14.6g} {sde:>14.6g}")
    return EXIT_OK


def cmd_classify(config: RunConfig) -> int:
    n, gaussian, z_assumption = _classification_inputs(config)
    structure = spike_structure_from_model(config.model, n, z_assumption)
    verdict = classify(structure)
    limits = predict_eigenvalue_limits(structure, gaussian=gaussian)
    payload = {
        "spec_version": SPEC_VERSION,
        "model": config.model.to_config(),
        "n": n,
        **verdict.to_json(),
        "eigenvalue_limits": limits_to_json(limits),
    }
    if isinstance(config.model, BlockEquicorrelation):
        regime = two_block_regime(config.model.rho1, config.model.rho2)
        payload["two_block_case"] = regime.case
        payload["two_block_label"] = regime.label

    _ensure_out_dir(config)
    if "json" in config.formats:
        _write_json(os.path.join(config.out_dir, "regime.json"), payload)
    if "text" in config.formats:
        law_by_i = {entry["i"]: entry for entry in limits_to_json(limits)}
        print(f"{'i':>4} {'verdict':<24} {'group':<10} {'limit law':<44} mode")
        for dv in verdict.directions:
            group = ",".join(str(j) for j in dv.group) or "-"
            law = _law_text(law_by_i[dv.i]) + f"  [d^{law_by_i[dv.i]['exponent']:g}]"
            print(f"{dv.i:>4} {dv.kind:<24} {group:<10} {law:<44} {verdict.mode}")
    return EXIT_OK


def _progress(stream):
    def cb(d, n, failures):
        print(f"[simulate] finished d={d} n={n} (failures={failures})", file=stream)

    return cb


def cmd_simulate(config: RunConfig, jobs: int = 1) -> int:
    plan = build_plan(config)
    _ensure_out_dir(config)
    report = run_experiment(plan, jobs=jobs, progress=_progress(sys.stderr))
    _write_report(config, report)
    return EXIT_OK


def _write_report(config: RunConfig, report: AggregateReport) -> None:
    if "csv" in config.formats:
        report.write_csv(os.path.join(config.out_dir, "report.csv"))
    if "json" in config.formats:
        _write_json(os.path.join(config.out_dir, "report.json"), report.to_json_dict())
    if "text" in config.formats:
        sys.stdout.write(report.to_csv_text())


def cmd_verify(config: RunConfig, jobs: int = 1) -> int:
    n, gaussian, z_assumption = _classification_inputs(config)
    structure = spike_structure_from_model(config.model, n, z_assumption)
    verdict = classify(structure)
    limits = predict_eigenvalue_limits(structure, gaussian=gaussian)

    plan = build_plan(config)
    _ensure_out_dir(config)
    report = run_experiment(plan, jobs=jobs, progress=_progress(sys.stderr))
    _write_report(config, report)

    result = verify_prediction(plan, report, verdict, limits)
    if "json" in config.formats:
        _write_json(os.path.join(config.out_dir, "verify.json"), result.to_json())
    if "text" in config.formats:
        print(f"{'check':<34} {'pass':<5} requirement / observed")
        for c in result.checks:
            print(f"{c.name:<34} {'ok' if c.passed else 'FAIL':<5} {c.requirement} | {c.observed}")
        print(f"overall: {'PASS' if result.passed else 'FAIL'}")
    return EXIT_OK if result.passed else EXIT_VERIFY_FAILED


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hdpca",
        description="High-dimension low-sample-size PCA laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "eigenvalue and sphericity tables over the d grid"),
        ("classify", "regime verdicts and limiting eigenvalue laws"),
        ("simulate", "run the Monte Carlo plan and write aggregate reports"),
        ("verify", "classify, simulate, and check predictions end to end"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--out", help="output directory (overrides output.directory)")
        p.add_argument("--seed", type=int, help="master seed (overrides seed.master)")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
        p.add_argument("--format", choices=_FORMATS, help="restrict output to one format")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        if args.out is not None:
            config.out_dir = args.out
        if args.seed is not None:
            config.seed = config.seed.with_master(args.seed)
        if args.format is not None:
            config.formats = (args.format,)

        if args.command == "spectrum":
            return cmd_spectrum(config)
        if args.command == "classify":
            return cmd_classify(config)
        if args.command == "simulate":
            return cmd_simulate(config, jobs=args.jobs)
        return cmd_verify(config, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BoundaryUnsupportedError, UnsupportedStructureError) as exc:
        print(f"unsupported structure: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ExperimentError as exc:
        print(f"experiment aborted: {exc}", file=sys.stderr)
        return EXIT_REPLICATE_FAILURES
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except HdpcaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
