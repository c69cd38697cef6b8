"""Command-line experiment runner.

Settings come from flags and, optionally, a key=value file given with
``--config``; flags take precedence.  Every command is a deterministic
function of its settings and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Callable, List, Optional, Sequence

from . import distinguish, fourier, gf, learn, stab, state
from .errors import QuditError, SizeGuardError, check_size
from .state import RngStream

EXIT_OK, EXIT_CONFIG, EXIT_SIZE, EXIT_SELFTEST = 0, 2, 3, 4
SCHEMA = 1
DOPED_DEPTH = 20


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = ""
    mode: Optional[str] = None
    state: Optional[str] = None
    p: int = 3
    n: int = 2
    t: int = 1
    k: float = 1.0
    delta: float = 0.01
    trials: int = 10
    seed: int = 0
    output: Optional[str] = None
    format: str = "json"
    workers: int = 1
    sources: str = "stab,haar"
    kind: str = "b"

    def validate(self) -> "ExperimentConfig":
        if not gf._is_prime(self.p) or self.p < 3:
            raise ConfigError(f"p must be an odd prime, got {self.p}")
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.trials < 1 or self.workers < 1:
            raise ConfigError("trials and workers must be positive")
        if self.t < 0:
            raise ConfigError("t must be non-negative")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        return self


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key: str, raw: str):
    kind = _TYPES.get(key)
    if kind is None:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for ln in lines:
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise ConfigError(f"config line without '=': {ln!r}")
        key, val = (s.strip() for s in ln.split("=", 1))
        out[key] = _coerce(key, val)
    return out


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for f in fields(ExperimentConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            values[f.name] = val
    return ExperimentConfig(**values).validate()


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _emit(text: str, cfg: ExperimentConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, indent=2, sort_keys=False) + "\n"


def _map_trials(fn: Callable, items: Sequence, workers: int) -> List:
    if workers <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# state specs
# ---------------------------------------------------------------------------

def parse_state_spec(spec: str, cfg: ExperimentConfig) -> state.StateVector:
    """stab:<group.json> | haar:<seed> | doped:p,n,t,seed | basis:<digits>."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "stab":
            with open(arg) as fh:
                G = stab.StabilizerGroup.from_json(fh.read())
            return stab.state_closed_form(G)
        if kind == "haar":
            return state.haar_random(cfg.n, cfg.p, RngStream(int(arg)))
        if kind == "doped":
            p, n, t, seed = (int(a) for a in arg.split(","))
            gf.field(p)
            circ = distinguish.doped_circuit(p, n, t, DOPED_DEPTH, "cubic-phase", RngStream(seed))
            return distinguish.run(circ)
        if kind == "basis":
            digits = [int(a) for a in (arg.split(",") if "," in arg else list(arg))]
            if any(not 0 <= d < cfg.p for d in digits):
                raise ConfigError(f"basis digits must lie in [0, {cfg.p})")
            return state.basis_state(digits, cfg.p)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad state spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown state spec {spec!r}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    rows = run_selftest(fault=args.inject_fault)
    width = max(len(r[0]) for r in rows)
    for name, ok, detail in rows:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    failed = sum(not ok for _, ok, _ in rows)
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


def _learn_trial(job):
    mode, p, n, seed, i = job
    G = stab.random_group(p, n, RngStream(seed, (i, 0)))
    oracle = learn.CopyOracle(G)
    rng = RngStream(seed, (i, 1))
    if mode == "bell":
        res = learn.algorithm1(oracle, rng, seed=seed)
    else:
        res = learn.algorithm2(oracle, None, rng, seed=seed)
    out = {"trial": i, **res.to_dict()}
    out["valid"] = bool(res.success and learn.validate_recovery(G, res.recovered))
    return out


def cmd_learn(cfg: ExperimentConfig) -> int:
    if cfg.mode not in ("bell", "quadratic"):
        raise ConfigError("learn mode must be bell or quadratic")
    if cfg.mode == "bell":
        check_size(cfg.p ** (4 * cfg.n), state.MULTI_COPY_LIMIT, "Bell basis p^(4n)")
        bound = 1 - cfg.p ** (-cfg.n)
    else:
        check_size(cfg.p ** (4 * cfg.n), state.MULTI_COPY_LIMIT, "interference register p^(4n)")
        bound = 1 - 2 * cfg.p ** (-cfg.n)
    jobs = [(cfg.mode, cfg.p, cfg.n, cfg.seed, i) for i in range(cfg.trials)]
    results = _map_trials(_learn_trial, jobs, cfg.workers)
    rate = sum(r["success"] for r in results) / cfg.trials
    if cfg.format == "csv":
        lines = ["trial,success,valid,copies_S,copies_S_conj"]
        lines += [f"{r['trial']},{int(r['success'])},{int(r['valid'])},{r['copies_S']},{r['copies_S_conj']}" for r in results]
        _emit("\n".join(lines) + "\n", cfg)
    else:
        _emit(_json({
            "command": "learn", "mode": cfg.mode, "p": cfg.p, "n": cfg.n, "trials": cfg.trials, "seed": cfg.seed,
            "success_rate": rate, "bound": bound, "results": results,
        }), cfg)
    return EXIT_OK


SOURCE_IDS = {"stab": 0, "haar": 1, "doped": 2}
EXPECTED = {"stab": "high_fidelity", "doped": "high_fidelity", "haar": "haar"}


def _distinguish_trial(job):
    source, p, n, t, k, delta, seed, i = job
    rs = RngStream(seed, (SOURCE_IDS[source], i))
    if source == "stab":
        psi = stab.state_closed_form(stab.random_group(p, n, rs.child(0)))
    elif source == "haar":
        psi = state.haar_random(n, p, rs.child(0))
    else:
        psi = distinguish.run(distinguish.doped_circuit(p, n, t, DOPED_DEPTH, "cubic-phase", rs.child(0)))
        k = float(p ** (2 * t))
    res = distinguish.algorithm3(psi, k, delta, rs.child(1))
    return {"trial": i, "source": source, **res.to_dict(seed), "copies": res.copies, "k": k}


def cmd_distinguish(cfg: ExperimentConfig) -> int:
    sources = [s.strip() for s in cfg.sources.split(",") if s.strip()]
    if not sources or any(s not in SOURCE_IDS for s in sources):
        raise ConfigError(f"sources must be drawn from {sorted(SOURCE_IDS)}")
    check_size(cfg.p ** (2 * cfg.n), state.EXPECTATION_LIMIT, "Weyl expectation table p^(2n)")
    jobs = [(s, cfg.p, cfg.n, cfg.t, cfg.k, cfg.delta, cfg.seed, i) for s in sources for i in range(cfg.trials)]
    results = _map_trials(_distinguish_trial, jobs, cfg.workers)
    confusion = {s: {"haar": 0, "high_fidelity": 0} for s in sources}
    for r in results:
        confusion[r["source"]][r["verdict"]] += 1
    errors = sum(r["verdict"] != EXPECTED[r["source"]] for r in results)
    if cfg.format == "csv":
        lines = ["source,trial,verdict,X,m,sigma_p2"]
        lines += [f"{r['source']},{r['trial']},{r['verdict']},{r['X']:.17g},{r['m']},{r['sigma_p2']:.17g}" for r in results]
        _emit("\n".join(lines) + "\n", cfg)
    else:
        _emit(_json({
            "command": "distinguish", "p": cfg.p, "n": cfg.n, "k": cfg.k, "delta": cfg.delta, "seed": cfg.seed,
            "m": distinguish.compute_m(cfg.k, cfg.delta), "confusion": confusion, "errors": errors, "results": results,
        }), cfg)
    return EXIT_OK


def cmd_distributions(cfg: ExperimentConfig) -> int:
    if not cfg.state:
        raise ConfigError("distributions needs --state")
    psi = parse_state_spec(cfg.state, cfg)
    check_size(psi.p ** (4 * psi.n), fourier.TRANSFORM_LIMIT, "symplectic transform p^(4n)")
    pd = fourier.characteristic_distribution(psi)
    jd = fourier.involute_distribution(pd)
    makers = {
        "p": lambda: pd,
        "j": lambda: jd,
        "b": lambda: fourier.weyl_distribution(psi),
        "sft_p": lambda: fourier.sft(pd).real(),
        "sft_j": lambda: fourier.sft(jd).real(),
    }
    if cfg.kind == "all":
        if not cfg.output:
            raise ConfigError("--kind all writes one file per distribution and needs --output DIR")
        os.makedirs(cfg.output, exist_ok=True)
        for name, make in makers.items():
            with open(os.path.join(cfg.output, f"{name}.csv"), "w") as fh:
                fh.write(make().to_csv())
        return EXIT_OK
    if cfg.kind not in makers:
        raise ConfigError(f"kind must be one of {sorted(makers)} or all")
    _emit(makers[cfg.kind]().to_csv(), cfg)
    return EXIT_OK


def cmd_fidelity(cfg: ExperimentConfig) -> int:
    if not cfg.state:
        raise ConfigError("fidelity needs --state")
    psi = parse_state_spec(cfg.state, cfg)
    stab.check_fidelity_size(psi.n, psi.p)
    value, G = stab.stabilizer_fidelity_bruteforce(psi)
    lower, upper = stab.fidelity_bounds(psi, G.lagrangian)
    _emit(_json({
        "command": "fidelity", "state": cfg.state, "p": psi.p, "n": psi.n, "fidelity": value,
        "lower": lower, "upper": upper, "bracketed": bool(lower <= value + 1e-12 and value <= upper + 1e-12),
        "argmax": G.to_dict(),
    }), cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="key=value file; flags override it")
    sp.add_argument("--p", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--output")
    sp.add_argument("--format", choices=["json", "csv"])
    sp.add_argument("--workers", type=int)


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quditstab", description="Qudit stabiliser learning and testing experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("selftest", help="run the invariant suite")
    sp.add_argument("--inject-fault", choices=["phase-convention"], help="corrupt a convention to exercise the suite")

    sp = sub.add_parser("learn", help="run a stabiliser learner over random hidden groups")
    sp.add_argument("mode", nargs="?", choices=["bell", "quadratic"])
    _common(sp)

    sp = sub.add_parser("distinguish", help="Haar versus high-fidelity distinguisher")
    _common(sp)
    sp.add_argument("--k", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--t", type=int, help="doping level for the doped source")
    sp.add_argument("--sources", help="comma list from stab, haar, doped")

    sp = sub.add_parser("distributions", help="dump characteristic, involuted and Bell-difference distributions")
    _common(sp)
    sp.add_argument("--state")
    sp.add_argument("--kind", help="p, j, b, sft_p, sft_j or all")

    sp = sub.add_parser("fidelity", help="brute-force stabiliser fidelity with bounds")
    _common(sp)
    sp.add_argument("--state")
    return ap


COMMANDS = {
    "learn": cmd_learn,
    "distinguish": cmd_distinguish,
    "distributions": cmd_distributions,
    "fidelity": cmd_fidelity,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.command == "selftest":
        return cmd_selftest(args)
    try:
        cfg = build_config(args)
        cfg.command = args.command
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except QuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
