"""Command line workflow: configure -> run -> process -> report.

``configure`` expands a sweep file into one scenario config per parameter
combination plus a batch manifest; ``run`` executes manifest scenarios on a
worker pool (outputs are independent of the core count); ``process`` converts
raw runs into published bundles; ``report`` writes the analysis files.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor, as_completed

from .analysis import write_report
from .config import MECHANISMS, ScenarioConfig
from .errors import ConfigurationError, UasError
from .scenario import process_raw, run_scenario, save_raw

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

OUT_DIR_ENV = "UAS_OUT_DIR"


def _default_out() -> str:
    return os.environ.get(OUT_DIR_ENV, os.path.join(os.getcwd(), "out"))


def _rate_tag(rate: float) -> str:
    return ("%g" % rate).replace(".", "p")


def expand_sweep(mechanism: str, sweep: dict) -> list[ScenarioConfig]:
    """One config per combination in the sweep; raises on empty sweeps."""
    if mechanism not in MECHANISMS:
        raise ConfigurationError(f"unknown mechanism {mechanism!r}")
    base = dict(sweep.get("base", {}))
    base.setdefault("map", {"synthetic": {}})
    types = sweep.get("anomaly_types", [])
    if not types:
        raise ConfigurationError("sweep lists no anomaly_types")
    seed_base = int(sweep.get("seed_base", base.get("seed", 0)))

    combos: list[dict] = []
    if mechanism == "central":
        for atype in types:
            combos.append({"anomaly_type": atype, "name": f"central_{atype}"})
    else:
        rates = sweep.get("rates", [])
        if not rates:
            raise ConfigurationError(f"sweep for {mechanism!r} lists no rates")
        if mechanism == "infectious":
            for atype in types:
                for rate in rates:
                    combos.append(
                        {
                            "anomaly_type": atype,
                            "epidemic": {**base.get("epidemic", {}), "transmission_prob": rate},
                            "name": f"infectious_{atype}_r{_rate_tag(rate)}",
                        }
                    )
        else:
            selections = sweep.get("selections", [])
            if not selections:
                raise ConfigurationError("sweep for 'location' lists no selections")
            for atype in types:
                for rate in rates:
                    for sel in selections:
                        combos.append(
                            {
                                "anomaly_type": atype,
                                "location": {
                                    **base.get("location", {}),
                                    "transmission_prob": rate,
                                    "selection": sel,
                                },
                                "name": f"location_{atype}_r{_rate_tag(rate)}_{sel}",
                            }
                        )

    configs = []
    for k, combo in enumerate(combos):
        data = dict(base)
        data.update(combo)
        data["mechanism"] = mechanism
        data["seed"] = seed_base + k
        configs.append(ScenarioConfig.from_dict(data))
    return configs


def cmd_configure(args) -> int:
    try:
        with open(args.sweep) as fh:
            sweep = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read sweep file {args.sweep}: {exc}") from None
    configs = expand_sweep(args.mechanism, sweep)
    config_dir = os.path.join(args.out, "configs")
    os.makedirs(config_dir, exist_ok=True)
    paths = []
    for cfg in configs:
        path = os.path.join(config_dir, f"{cfg.name}.json")
        cfg.save(path)
        paths.append(path)
    manifest = os.path.join(config_dir, "manifest.json")
    with open(manifest, "w") as fh:
        json.dump({"scenarios": paths}, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(paths)} configs and manifest {manifest}")
    return EXIT_OK


def _run_one(config_path: str, out_root: str) -> str:
    """Worker: run one scenario and persist its raw output."""
    cfg = ScenarioConfig.load(config_path)
    world, result = run_scenario(cfg)
    raw_dir = os.path.join(out_root, "raw", cfg.name)
    save_raw(result, cfg, world.region_name, raw_dir)
    return cfg.name


def cmd_run(args) -> int:
    if args.cores < 1:
        raise ConfigurationError("--cores must be at least 1")
    try:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        scenario_paths = manifest["scenarios"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigurationError(f"cannot read manifest {args.manifest}: {exc}") from None
    if not scenario_paths:
        raise ConfigurationError("manifest lists no scenarios")

    os.makedirs(args.out, exist_ok=True)
    failures: list[tuple[str, str]] = []
    if args.cores == 1:
        for path in scenario_paths:
            try:
                name = _run_one(path, args.out)
                print(f"completed {name}")
            except Exception:
                failures.append((path, traceback.format_exc()))
    else:
        with ProcessPoolExecutor(max_workers=args.cores) as pool:
            futures = {pool.submit(_run_one, p, args.out): p for p in scenario_paths}
            for fut in as_completed(futures):
                path = futures[fut]
                try:
                    print(f"completed {fut.result()}")
                except Exception:
                    failures.append((path, traceback.format_exc()))

    for path, trace in failures:
        name = os.path.splitext(os.path.basename(path))[0]
        quarantine = os.path.join(args.out, "_failed", name)
        os.makedirs(quarantine, exist_ok=True)
        partial = os.path.join(args.out, "raw", name)
        for leftover in (partial, partial + ".tmp"):
            if os.path.exists(leftover):
                shutil.rmtree(leftover)
        with open(os.path.join(quarantine, "error.txt"), "w") as fh:
            fh.write(trace)
        print(f"scenario {name} failed; details in {quarantine}/error.txt", file=sys.stderr)
    return EXIT_RUNTIME if failures else EXIT_OK


def cmd_process(args) -> int:
    raw_root = os.path.join(args.dir, "raw")
    if not os.path.isdir(raw_root):
        raise ConfigurationError(f"no raw runs under {args.dir}")
    names = sorted(
        d for d in os.listdir(raw_root) if os.path.isdir(os.path.join(raw_root, d))
    )
    if not names:
        raise ConfigurationError(f"no raw runs under {raw_root}")
    for name in names:
        bundle_dir = process_raw(os.path.join(raw_root, name), args.dir)
        print(f"processed {name} -> {bundle_dir}")
    return EXIT_OK


def cmd_report(args) -> int:
    bundle_dirs = []
    for mechanism in MECHANISMS:
        mech_dir = os.path.join(args.dir, mechanism)
        if not os.path.isdir(mech_dir):
            continue
        for name in sorted(os.listdir(mech_dir)):
            candidate = os.path.join(mech_dir, name)
            if os.path.isfile(os.path.join(candidate, "info.json")):
                bundle_dirs.append(candidate)
    if not bundle_dirs:
        raise ConfigurationError(f"no processed bundles under {args.dir}")
    for bundle in bundle_dirs:
        report_dir = write_report(bundle)
        print(f"reported {bundle} -> {report_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uas", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("configure", help="expand a sweep file into scenario configs")
    p.add_argument("--mechanism", required=True, choices=MECHANISMS)
    p.add_argument("--sweep", required=True, help="sweep JSON file")
    p.add_argument("--out", default=_default_out(), help="output root directory")
    p.set_defaults(func=cmd_configure)

    p = sub.add_parser("run", help="run scenarios from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--cores", type=int, default=1)
    p.add_argument("--out", default=_default_out())
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("process", help="convert raw runs into published bundles")
    p.add_argument("--dir", default=_default_out())
    p.set_defaults(func=cmd_process)

    p = sub.add_parser("report", help="write analysis reports for processed bundles")
    p.add_argument("--dir", default=_default_out())
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
