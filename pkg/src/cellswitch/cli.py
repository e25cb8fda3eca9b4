"""Experiment runner: ``cellswitch run`` and ``cellswitch sweep``.

A run evaluates every requested method over ``rounds`` independent traces
and writes

* ``power_<method>.csv``       slot,round,watts
* ``power_<method>_mean.csv``  slot,mean_watts (average over rounds)
* ``summary.csv``              method,s,energy_j,gain_pct,mean_tput,infeasible_slots
* ``config_echo.txt``          every resolved parameter as key=value

Settings come from an optional flat ``key = value`` file; command-line
flags override it. Each round draws its own trace and agent seeds from the
master seed, so output is identical however rounds are scheduled.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import shutil
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .agent import AgentConfig
from .benchmarks import EXHAUSTIVE_CAP, METHODS
from .metrics import RunSummary, gain
from .power_model import DEFAULT_PROFILES, BsType, PowerProfile, build_stations
from .scenarios import run_method, scenario_stations
from .traffic import SLOTS_PER_DAY, build_trace, load_raw_csv, synthetic_trace

log = logging.getLogger("cellswitch")

POWER_HEADER = ["slot", "round", "watts"]
SUMMARY_HEADER = ["method", "s", "energy_j", "gain_pct", "mean_tput", "infeasible_slots"]
SCENARIO_KAPPA = {"A": 20.0, "B": 10.0}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str = "B"
    s: list[int] = field(default_factory=lambda: [4])
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    trace: str = "synthetic"
    csv_path: str | None = None
    seed: int = 0
    slots: int = SLOTS_PER_DAY
    rounds: int = 25
    exhaustive_cap: int = EXHAUSTIVE_CAP
    output_dir: str = "results"
    agent: AgentConfig = field(default_factory=AgentConfig)
    sc_types: list[BsType] = field(default_factory=list)
    profiles: dict[BsType, PowerProfile] = field(default_factory=dict)
    midpoint: float = 0.35
    workers: int = 1

    def validate(self) -> None:
        if self.scenario not in ("A", "B", "custom"):
            raise ConfigError(f"scenario must be A, B or custom, not {self.scenario!r}")
        if self.scenario == "custom" and not self.sc_types:
            raise ConfigError("scenario custom needs sc_types")
        if not self.s or any(k < 0 for k in self.s):
            raise ConfigError("s must list non-negative small-cell counts")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ConfigError(f"methods must be a non-empty subset of {METHODS}, got {self.methods}")
        if self.trace not in ("synthetic", "csv"):
            raise ConfigError("trace must be synthetic or csv")
        if self.trace == "csv" and not self.csv_path:
            raise ConfigError("trace csv needs csv_path")
        if self.slots < 1 or self.rounds < 1 or self.workers < 1:
            raise ConfigError("slots, rounds and workers must be positive")

    def echo(self) -> dict[str, str]:
        out = {
            "scenario": self.scenario,
            "s": ",".join(map(str, self.s)),
            "methods": ",".join(self.methods),
            "trace": self.trace,
            "csv_path": self.csv_path or "",
            "seed": str(self.seed),
            "slots": str(self.slots),
            "rounds": str(self.rounds),
            "exhaustive_cap": str(self.exhaustive_cap),
            "midpoint": repr(self.midpoint),
            "sc_types": ",".join(t.value for t in self.sc_types),
        }
        for f in dataclasses.fields(self.agent):
            v = getattr(self.agent, f.name)
            out[f"agent.{f.name}"] = v if isinstance(v, str) else repr(v)
        # profiles as actually deployed (scenario A zeroes the micro sleep power)
        used = {st.bs_type: st.profile for st in self.stations(max(self.s))}
        for t, p in sorted(used.items(), key=lambda kv: kv[0].value):
            for f in dataclasses.fields(p):
                out[f"profile.{t.value}.{f.name}"] = repr(getattr(p, f.name))
        return out

    def resolved_profiles(self) -> dict[BsType, PowerProfile]:
        return {**DEFAULT_PROFILES, **self.profiles}

    def stations(self, s: int):
        if self.scenario == "custom":
            if len(self.sc_types) != s:
                raise ConfigError(f"sc_types lists {len(self.sc_types)} cells but s={s}")
            return build_stations(self.sc_types, self.resolved_profiles())
        return scenario_stations(self.scenario, s, self.profiles)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def read_config_file(path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def build_config(values: dict[str, str]) -> RunConfig:
    cfg = RunConfig()
    agent_kw: dict[str, float] = {}
    profile_kw: dict[BsType, dict[str, float]] = {}
    try:
        for key, value in values.items():
            if key == "scenario":
                cfg.scenario = value if value == "custom" else value.upper()
            elif key == "s":
                cfg.s = _int_list(value)
            elif key == "methods":
                cfg.methods = [m.strip() for m in value.split(",") if m.strip()]
            elif key == "trace":
                kind, _, rest = value.partition(":")
                cfg.trace = kind.strip()
                if rest:
                    cfg.csv_path = rest.strip()
            elif key in ("seed", "slots", "rounds", "exhaustive_cap", "workers"):
                setattr(cfg, key, int(value))
            elif key == "midpoint":
                cfg.midpoint = float(value)
            elif key in ("csv_path", "output_dir"):
                setattr(cfg, key, value)
            elif key == "sc_types":
                cfg.sc_types = [BsType(v.strip().lower()) for v in value.split(",") if v.strip()]
            elif key.startswith("agent."):
                name = key[len("agent."):]
                if name == "value_model":
                    agent_kw[name] = value
                elif name == "restart_on_overload":
                    if value.lower() not in ("true", "false", "1", "0"):
                        raise ConfigError(f"{key} must be true or false")
                    agent_kw[name] = value.lower() in ("true", "1")
                else:
                    agent_kw[name] = float(value)
            elif key.startswith("profile."):
                _, type_name, attr = key.split(".")
                profile_kw.setdefault(BsType(type_name.lower()), {})[attr] = float(value)
            else:
                raise ConfigError(f"unknown setting {key!r}")
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

    for name in ("xi", "j_min", "j_rep", "max_iter"):
        if name in agent_kw:
            agent_kw[name] = int(agent_kw[name])
    agent_kw.setdefault("kappa", SCENARIO_KAPPA.get(cfg.scenario, AgentConfig.kappa))
    try:
        cfg.agent = AgentConfig(**agent_kw)
        cfg.profiles = {t: dataclasses.replace(DEFAULT_PROFILES[t], **kw)
                        for t, kw in profile_kw.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def round_seeds(master: int, rounds: int) -> list[tuple[int, int]]:
    """(trace seed, agent seed) per round, derived from the master seed."""
    children = np.random.SeedSequence(master).spawn(rounds)
    return [tuple(int(v) for v in c.generate_state(2)) for c in children]


def _trace_for(cfg: RunConfig, s: int, trace_seed: int, raw=None):
    if cfg.trace == "csv":
        return build_trace(raw, s, trace_seed, cfg.slots)
    return synthetic_trace(s, cfg.slots, trace_seed, midpoint=cfg.midpoint)


def _run_round(cfg: RunConfig, s: int, r: int, seeds: tuple[int, int], raw) -> dict[str, list]:
    trace_seed, agent_seed = seeds
    trace = _trace_for(cfg, s, trace_seed, raw)
    stations = cfg.stations(s)
    methods = list(dict.fromkeys(["all_on"] + cfg.methods))
    out = {}
    for m in methods:
        out[m] = run_method(m, trace, stations, cfg.agent, agent_seed, cfg.exhaustive_cap)
    log.debug("s=%d round %d done", s, r)
    return {"slot_seconds": trace.slot_seconds, "results": out}


def evaluate(cfg: RunConfig, s: int, methods: list[str]) -> tuple[dict[str, np.ndarray], list[RunSummary]]:
    """Run all rounds for one small-cell count.

    Returns per-method power matrices (rounds x slots) and summary rows.
    """
    raw = load_raw_csv(cfg.csv_path) if cfg.trace == "csv" else None
    sub = dataclasses.replace(cfg, methods=methods)
    seeds = round_seeds(cfg.seed, cfg.rounds)
    args = [(sub, s, r, seeds[r], raw) for r in range(cfg.rounds)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            rounds = list(pool.map(_run_round, *zip(*args)))
    else:
        rounds = [_run_round(*a) for a in args]

    power = {}
    energies = {}
    tputs = {}
    infeasible = {}
    for m in dict.fromkeys(["all_on"] + methods):
        power[m] = np.array([[x.power_w for x in rd["results"][m]] for rd in rounds])
        energies[m] = float(np.mean([power[m][i].sum() * rd["slot_seconds"]
                                     for i, rd in enumerate(rounds)]))
        tputs[m] = float(np.mean([[x.tput_norm for x in rd["results"][m]] for rd in rounds]))
        infeasible[m] = int(sum(not x.feasible for rd in rounds for x in rd["results"][m]))
    e_on = energies["all_on"]
    summaries = [RunSummary(m, s, energies[m], gain(e_on, energies[m]), tputs[m], infeasible[m])
                 for m in methods]
    return {m: power[m] for m in methods}, summaries


def _write_power(dirpath: Path, method: str, power: np.ndarray) -> None:
    with open(dirpath / f"power_{method}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POWER_HEADER)
        for r, row in enumerate(power):
            for t, watts in enumerate(row):
                w.writerow([t, r, repr(float(watts))])
    with open(dirpath / f"power_{method}_mean.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["slot", "mean_watts"])
        for t, watts in enumerate(power.mean(axis=0)):
            w.writerow([t, repr(float(watts))])


def _write_summary(path: Path, rows: list[RunSummary]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for r in rows:
            w.writerow([r.method, r.s, repr(r.energy_j), repr(r.gain_pct),
                        repr(r.mean_tput), r.infeasible_slots])


def _write_echo(path: Path, cfg: RunConfig) -> None:
    path.write_text("".join(f"{k} = {v}\n" for k, v in cfg.echo().items()))


class _Staging:
    """Write into a scratch directory and move files into place only on success."""

    def __init__(self, output_dir):
        self.target = Path(output_dir)

    def __enter__(self) -> Path:
        self.target.parent.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.target.parent))
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        try:
            if exc_type is None:
                self.target.mkdir(parents=True, exist_ok=True)
                for p in sorted(self.tmp.rglob("*")):
                    dest = self.target / p.relative_to(self.tmp)
                    if p.is_dir():
                        dest.mkdir(exist_ok=True)
                    else:
                        shutil.move(str(p), dest)
        finally:
            shutil.rmtree(self.tmp, ignore_errors=True)
        return False


def run(cfg: RunConfig) -> list[RunSummary]:
    if len(cfg.s) != 1:
        raise ConfigError("run takes a single s; use sweep for a list")
    s = cfg.s[0]
    if "exhaustive" in cfg.methods and s > cfg.exhaustive_cap:
        raise ConfigError(f"exhaustive search requested for s={s} above the cap {cfg.exhaustive_cap}")
    with _Staging(cfg.output_dir) as tmp:
        power, summaries = evaluate(cfg, s, cfg.methods)
        for m, p in power.items():
            _write_power(tmp, m, p)
        _write_summary(tmp / "summary.csv", summaries)
        _write_echo(tmp / "config_echo.txt", cfg)
    return summaries


def sweep(cfg: RunConfig) -> list[RunSummary]:
    """One summary row per (s, method); exhaustive is dropped above its cap."""
    rows: list[RunSummary] = []
    with _Staging(cfg.output_dir) as tmp:
        for s in cfg.s:
            methods = [m for m in cfg.methods
                       if not (m == "exhaustive" and s > cfg.exhaustive_cap)]
            if len(methods) < len(cfg.methods):
                log.info("s=%d exceeds the exhaustive cap; skipping exhaustive", s)
            if not methods:
                continue
            power, summaries = evaluate(cfg, s, methods)
            sub = tmp / f"s_{s}"
            sub.mkdir()
            for m, p in power.items():
                _write_power(sub, m, p)
            rows.extend(summaries)
        _write_summary(tmp / "summary.csv", rows)
        _write_echo(tmp / "config_echo.txt", cfg)
    return rows


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cellswitch", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "evaluate methods for one small-cell count"),
                        ("sweep", "evaluate methods over a list of small-cell counts")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="key = value settings file")
        sp.add_argument("--scenario", help="A, B or custom")
        sp.add_argument("--s", help="small-cell count (comma list for sweep)")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--methods", help="comma list of " + ",".join(METHODS))
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--rounds", type=int)
        sp.add_argument("--slots", type=int)
        sp.add_argument("--trace", help="synthetic or csv:<path>")
        sp.add_argument("--workers", type=int)
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        values = read_config_file(args.config) if args.config else {}
        flags = {"scenario": args.scenario, "s": args.s, "seed": args.seed,
                 "methods": args.methods, "output_dir": args.out, "rounds": args.rounds,
                 "slots": args.slots, "trace": args.trace, "workers": args.workers}
        values.update({k: str(v) for k, v in flags.items() if v is not None})
        cfg = build_config(values)
        rows = run(cfg) if args.command == "run" else sweep(cfg)
    except (ConfigError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return 2
    for r in rows:
        log.info("%-10s s=%-3d gain=%7.2f%%  tput=%.3f  infeasible=%d",
                 r.method, r.s, r.gain_pct, r.mean_tput, r.infeasible_slots)
    return 0


if __name__ == "__main__":
    sys.exit(main())
