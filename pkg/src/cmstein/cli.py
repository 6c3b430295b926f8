"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation or precondition error,
3 runtime failure. Errors go to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import rng as rngmod
from .bounds import BoundInputs, theorem1_bound
from .config import Configuration, sample_configuration
from .degseq import DegreeDistribution, check_conditions, sample_degree_sequence, validate
from .errors import ValidationError
from .explore import explore_truncated
from .mc import ExperimentConfig, run_clt_experiment, sample_statistic, variance_scaling_study, variance_with_se
from .stats import evaluate_statistic, statistic_from_json
from .stein import coupling_draw, estimate_variance_identity

SUBCOMMANDS = ("sample", "explore", "stat", "couple", "bound", "variance", "clt", "conditions")
SECTIONS = {"clt": "mc"}
SEED_ENV = "CMSTEIN_SEED"


class UsageError(Exception):
    pass


class ConfigError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cmstein", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    return p


def apply_override(cfg: dict, item: str) -> None:
    if "=" not in item:
        raise UsageError(f"override {item!r} is not KEY=VALUE")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = cfg
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise UsageError(f"override {key!r} descends into a non-object")
    node[parts[-1]] = value


def resolve(cfg: dict, subcommand: str) -> dict:
    """Top-level keys overlaid with the subcommand's own section."""
    name = SECTIONS.get(subcommand, subcommand)
    section_names = set(SUBCOMMANDS) | set(SECTIONS.values())
    out = {k: v for k, v in cfg.items() if k not in section_names}
    section = cfg.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"section {name!r} must be an object")
    out.update(section)
    return out


def _need(sec: dict, key: str):
    if key not in sec:
        raise ConfigError(f"missing required key {key!r}")
    return sec[key]


def _degrees(sec: dict, seed: int):
    if "degrees" in sec:
        return validate(sec["degrees"])
    pi = DegreeDistribution.from_json(_need(sec, "distribution"))
    n = int(_need(sec, "n"))
    cap = int(sec.get("cap") or max(pi.support))
    return sample_degree_sequence(pi, n, cap, rngmod.stream(seed, rngmod.DEGREES, n))


def _configuration(sec: dict, seed: int) -> Configuration:
    obj = sec.get("configuration")
    if obj is None:
        return sample_configuration(_degrees(sec, seed), rngmod.stream(seed, rngmod.CONFIGURATION))
    if isinstance(obj, str):
        obj = json.loads(Path(obj).read_text())
    # accept the bare object, or the envelope written by `sample`
    obj = obj.get("result", obj)
    if "configuration" in obj:
        obj = obj["configuration"]
    return Configuration.from_json(obj)


def cmd_sample(sec, seed, threads):
    g = sample_configuration(_degrees(sec, seed), rngmod.stream(seed, rngmod.CONFIGURATION))
    return {"configuration": g.to_json()}


def cmd_explore(sec, seed, threads):
    g = _configuration(sec, seed)
    ell = int(_need(sec, "ell"))
    roots = sec.get("root")
    roots = range(g.n) if roots is None else [int(r) - 1 for r in (roots if isinstance(roots, list) else [roots])]
    return {"components": [explore_truncated(g, v, ell).to_json() for v in roots]}


def cmd_stat(sec, seed, threads):
    g = _configuration(sec, seed)
    h = statistic_from_json(_need(sec, "statistic"))
    s = evaluate_statistic(g, h, with_index=False)
    return {"U": s.value, "per_vertex": s.per_vertex.tolist()}


def cmd_couple(sec, seed, threads):
    d = _degrees(sec, seed)
    h = statistic_from_json(_need(sec, "statistic"))
    replications = int(sec.get("replications", 1))
    sigma, mu = sec.get("sigma"), sec.get("mu")
    if sigma is None:
        probe = sample_statistic(d, h, int(sec.get("sigma_replications", 200)), seed + 1, threads)
        sigma, mu = math.sqrt(probe.var(ddof=1)), float(probe.mean())
    vertices = sec.get("vertices", "all")
    vertices = range(d.n) if vertices == "all" else [int(v) - 1 for v in vertices]

    def one(r):
        g = sample_configuration(d, rngmod.stream(seed, rngmod.CONFIGURATION, r))
        summary = evaluate_statistic(g, h, mean_hint=mu)
        lines = []
        for v in vertices:
            rec = coupling_draw(g, v, h, summary, float(sigma), rngmod.stream(seed, rngmod.COUPLING, r, v))
            lines.append({"replication": r, **rec.to_json()})
        return lines

    records = [line for chunk in rngmod.replicate(one, replications, threads) for line in chunk]
    return {"sigma": sigma, "mu": mu, "records": records}


def cmd_bound(sec, seed, threads):
    if "sigma" in sec:
        sigma = float(sec["sigma"])
    else:
        sigma = math.sqrt(float(_need(sec, "sigma2")))
    inp = BoundInputs(
        float(_need(sec, "sup_norm")), int(_need(sec, "d_max")), int(_need(sec, "ell")),
        int(_need(sec, "n")), int(_need(sec, "m")), sigma,
    )
    return theorem1_bound(inp).to_json()


def cmd_variance(sec, seed, threads):
    d = _degrees(sec, seed)
    h = statistic_from_json(_need(sec, "statistic"))
    replications = int(_need(sec, "replications"))
    est = estimate_variance_identity(d, h, replications, seed, threads)
    out = {"identity": est._asdict()}
    if sec.get("direct", True):
        var, se = variance_with_se(sample_statistic(d, h, replications, seed + 1, threads))
        out["direct"] = {"variance": var, "std_error": se}
    return out


def cmd_clt(sec, seed, threads, csv_path=None, log=None):
    cfg = ExperimentConfig.from_json({**sec, "master_seed": seed})
    result = run_clt_experiment(cfg, threads, log=log)
    out = result.to_json()
    if cfg.mode == "giant_component":
        out["variance_scaling"] = variance_scaling_study(cfg, result=result).to_json()
    if csv_path is not None:
        csv_path.write_text(result.to_csv())
    return out


def cmd_conditions(sec, seed, threads):
    pi = DegreeDistribution.from_json(_need(sec, "distribution"))
    cap = int(sec.get("cap") or max(pi.support))
    family = [
        sample_degree_sequence(pi, int(n), cap, rngmod.stream(seed, rngmod.DEGREES, int(n)))
        for n in _need(sec, "n_grid")
    ]
    return check_conditions(pi, family).to_json()


HANDLERS = {
    "sample": cmd_sample,
    "explore": cmd_explore,
    "stat": cmd_stat,
    "couple": cmd_couple,
    "bound": cmd_bound,
    "variance": cmd_variance,
    "clt": cmd_clt,
    "conditions": cmd_conditions,
}


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        raw = {}
        if args.config is not None:
            try:
                raw = json.loads(args.config.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config {args.config}: {exc}") from exc
            if not isinstance(raw, dict):
                raise UsageError("config must be a JSON object")
        for item in args.overrides:
            apply_override(raw, item)
        sec = resolve(raw, args.subcommand)
        if args.seed is not None:
            seed = args.seed
        elif os.environ.get(SEED_ENV):
            seed = int(os.environ[SEED_ENV])
        else:
            seed = int(sec.get("master_seed", sec.get("seed", 0)))
        if not 0 <= seed < 2 ** 64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        sec.pop("seed", None)
        sec["master_seed"] = seed
        threads = max(1, args.threads)
    except UsageError as exc:
        _error("UsageError", str(exc))
        return 1

    try:
        body_args = {k: v for k, v in sec.items() if k != "master_seed"}
        handler = HANDLERS[args.subcommand]
        if args.subcommand == "clt":
            csv_path = args.out.with_suffix(".csv") if args.out is not None else None
            log = lambda line: print(line, file=sys.stderr)  # noqa: E731
            body = handler(body_args, seed, threads, csv_path=csv_path, log=log)
        else:
            body = handler(body_args, seed, threads)
    except (ValidationError, TypeError, ValueError) as exc:
        _error(type(exc).__name__, str(exc))
        return 2
    except Exception as exc:  # noqa: BLE001
        _error(type(exc).__name__, str(exc))
        return 3

    header = {"subcommand": args.subcommand, "config": sec, "master_seed": seed}
    if args.subcommand == "couple":
        lines = [json.dumps({**header, "sigma": body["sigma"], "mu": body["mu"]})]
        lines += [json.dumps(rec) for rec in body["records"]]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(json.dumps({**header, "result": body}, indent=2) + "\n", args.out)
    return 0


def _error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
