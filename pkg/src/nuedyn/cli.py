"""Command-line surface: reproducible experiments from config files.

Subcommands: ``verify`` (hypothesis report for a torus map), ``lyapunov``
(exponent ensemble), ``hyp-times`` (hyperbolic-time detection and running
density), ``equilibrium`` (pressure / equilibrium measure / low-variation
verdict), ``variational`` (sampled variational gaps), ``gibbs`` (cylinder
ratio scan).  Exit codes: 0 pass, 1 a verified hypothesis or check failed,
2 usage or config error.  Identical config and seed give byte-identical
output; no timestamps are written.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import coding, config, hyperbolic, orbits, sft, torus
from .errors import NuedynError

__all__ = ["main"]


# ---------------------------------------------------------------------------
# canonical output
# ---------------------------------------------------------------------------

def _canonical(obj):
    """Make an object JSON-ready: numpy to python, floats round-tripped."""
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(format(float(obj), ".17g"))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_canonical(obj), sort_keys=True, indent=2) + "\n"


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


class _Emitter:
    def __init__(self, args, command: str):
        self.quiet = args.quiet
        self.fmt = args.format
        self.out = Path(args.out) if args.out else None
        self.command = command
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)
        self._primary_csv = None

    def json(self, obj, name=None):
        text = _dump_json(obj)
        if self.out is not None:
            (self.out / f"{name or self.command}.json").write_text(text)
        if not self.quiet and self.fmt == "json":
            sys.stdout.write(text)

    def csv(self, name, header, rows, primary=False):
        text = _csv_text(header, rows)
        if self.out is not None:
            (self.out / f"{name}.csv").write_text(text)
        if primary:
            self._primary_csv = text
        if not self.quiet and self.fmt == "csv" and primary:
            sys.stdout.write(text)


def _warn(args, message: str) -> None:
    if not args.quiet:
        print(f"warning: {message}", file=sys.stderr)


# ---------------------------------------------------------------------------
# shared resolution
# ---------------------------------------------------------------------------

def _shift_and_potential(cfg: dict, run: dict, base_dir):
    """(A, phi, origin) from the sft section or the map's partition."""
    explicit = config.build_sft(cfg, base_dir)
    if explicit is not None:
        A, phi_doc = explicit
        phi = (config.build_potential(run["potential"], A.d)
               if run.get("potential") is not None else phi_doc)
        if phi is None:
            phi = sft.LocallyConstantPotential.zero(A.d)
        return A, phi, "explicit"
    f = config.build_map(cfg)
    im = coding.build_itinerary_map(f)
    phi = config.build_potential(run.get("potential"), im.A.d)
    return im.A, phi, "induced"


def _reference_c(cfg: dict, run: dict, f: torus.TorusMap, seed: int) -> float:
    if run.get("c") is not None:
        return float(run["c"])
    report = torus.verify_hypotheses(
        f, run["grid_per_axis"], gamma0=run.get("gamma0"),
        ensemble_seeds=run["gamma0_seeds"], ensemble_len=run["gamma0_len"],
        ensemble_seed=seed)
    if report.c is None:
        raise NuedynError("constants are infeasible; supply run.c explicitly")
    return report.c


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_verify(cfg, run, args) -> int:
    f = config.build_map(cfg)
    report = torus.verify_hypotheses(
        f, run["grid_per_axis"], gamma0=run.get("gamma0"),
        ensemble_seeds=run["gamma0_seeds"], ensemble_len=run["gamma0_len"],
        ensemble_seed=args.seed if args.seed is not None else run["seed"])
    emitter = _Emitter(args, "verify")
    emitter.json(report.to_dict(), "report")
    return 0 if report.all_passed else 1


def cmd_lyapunov(cfg, run, args) -> int:
    f = config.build_map(cfg)
    seed = args.seed if args.seed is not None else run["seed"]
    exps = orbits.ensemble_lyapunov(f, seeds=run["seeds"], length=run["N"], seed=seed)
    summary = {
        "seeds": run["seeds"],
        "N": run["N"],
        "seed": seed,
        "exponent_min": exps.min(axis=0),
        "exponent_max": exps.max(axis=0),
        "exponent_mean": exps.mean(axis=0),
        "sum_mean": float(exps.sum(axis=1).mean()),
        "per_seed": exps,
    }
    emitter = _Emitter(args, "lyapunov")
    emitter.json(summary, "lyapunov")
    emitter.csv("exponents", ["seed"] + [f"lambda{i + 1}" for i in range(f.n)],
                [[k] + list(exps[k]) for k in range(exps.shape[0])], primary=True)
    return 0


def cmd_hyp_times(cfg, run, args) -> int:
    f = config.build_map(cfg)
    seed = args.seed if args.seed is not None else run["seed"]
    c = _reference_c(cfg, run, f, seed)
    eps0 = hyperbolic.estimate_eps0(f, c, run["eps0_grid"])
    logs, _ = orbits.ensemble_logs(f, seeds=run["seeds"], length=run["N"], seed=seed)
    per_seed = []
    density_rows = []
    all_ok = True
    stride = max(1, run["N"] // 2000)
    for s in range(run["seeds"]):
        rep = hyperbolic.hyperbolic_times_from_logs(logs[s], c)
        all_ok &= rep.precondition_ok
        times = rep.times.tolist()
        per_seed.append({
            "seed_index": s,
            "count": int(rep.times.size),
            "times": times if len(times) <= 1000 else times[-1000:],
            "times_truncated": bool(len(times) > 1000),
            "density_liminf_proxy": rep.density_liminf_proxy,
            "d0": rep.d0,
            "precondition_ok": rep.precondition_ok,
        })
        if s < 8:
            counts = np.zeros(run["N"], dtype=np.int64)
            if rep.times.size:
                counts[rep.times - 1] = 1
            running = np.cumsum(counts) / np.arange(1, run["N"] + 1)
            density_rows.append(running[stride - 1::stride])
    summary = {
        "c": c,
        "eps0": eps0,
        "N": run["N"],
        "seeds": run["seeds"],
        "seed": seed,
        "min_density_liminf_proxy": min(p["density_liminf_proxy"] for p in per_seed),
        "all_preconditions_ok": bool(all_ok),
        "per_seed": per_seed,
    }
    emitter = _Emitter(args, "hyp-times")
    emitter.json(summary, "hyp_times")
    if density_rows:
        steps = list(range(stride, run["N"] + 1, stride))
        header = ["step"] + [f"density_seed{k}" for k in range(len(density_rows))]
        rows = [[steps[i]] + [density_rows[k][i] for k in range(len(density_rows))]
                for i in range(len(steps))]
        emitter.csv("density", header, rows, primary=True)
    return 0 if all_ok else 1


def _gibbs_rows(A, mu, phi, pressure_value, max_len):
    d = A.d
    length = max_len
    while d ** length > 200000 and length > 1:
        length -= 1
    rows = []
    lo, hi = math.inf, -math.inf
    for word, m, s, ratio in coding.gibbs_scan_rows(A, mu, phi, pressure_value, length):
        rows.append(["".join(str(x) for x in word), m, s, ratio])
        lo, hi = min(lo, ratio), max(hi, ratio)
    return rows, lo, hi, length


def cmd_equilibrium(cfg, run, args) -> int:
    A, phi, origin = _shift_and_potential(cfg, run, args.config_dir)
    rho = float(run["rho"])
    P = sft.pressure(A, phi)
    mu = sft.equilibrium_markov(A, phi)
    h = sft.markov_entropy(mu)
    integ = sft.integral(mu, phi)
    htop = sft.topological_entropy(A)
    low_var = sft.low_variation_check(phi, A, rho)
    if not low_var:
        _warn(args, "potential fails the low-variation margin; results reported anyway")
    rows, lo, hi, used_len = _gibbs_rows(A, mu, phi, P, run["max_len"])
    summary = {
        "origin": origin,
        "d": A.d,
        "pressure": P,
        "topological_entropy": htop,
        "entropy": h,
        "integral": integ,
        "entropy_plus_integral": h + integ,
        "equilibrium_gap": P - h - integ,
        "rho": rho,
        "max_potential": phi.max_value(),
        "low_variation": bool(low_var),
        "gibbs_ratio_min": lo,
        "gibbs_ratio_max": hi,
        "gibbs_max_len": used_len,
        "P": mu.P,
        "pi": mu.pi,
    }
    emitter = _Emitter(args, "equilibrium")
    emitter.json(summary, "equilibrium")
    emitter.csv("gibbs", ["word", "mu", "S_n_phi", "ratio"], rows, primary=True)
    return 0


def cmd_variational(cfg, run, args) -> int:
    A, phi, origin = _shift_and_potential(cfg, run, args.config_dir)
    seed = args.seed if args.seed is not None else run["seed"]
    trials = int(run["trials"])
    gaps = sft.variational_gap_sample(A, phi, trials, seed)
    eq_gap = sft.variational_gap(A, phi, sft.equilibrium_markov(A, phi))
    summary = {
        "origin": origin,
        "d": A.d,
        "trials": trials,
        "seed": seed,
        "gap_min": float(gaps.min()),
        "gap_max": float(gaps.max()),
        "gap_mean": float(gaps.mean()),
        "equilibrium_gap": eq_gap,
        "all_nonnegative": bool(gaps.min() >= -1e-10),
    }
    emitter = _Emitter(args, "variational")
    emitter.json(summary, "variational")
    emitter.csv("gaps", ["trial", "gap"],
                [[t, gaps[t]] for t in range(trials)], primary=True)
    ok = gaps.min() >= -1e-10 and abs(eq_gap) <= 1e-10
    return 0 if ok else 1


def cmd_gibbs(cfg, run, args) -> int:
    A, phi, origin = _shift_and_potential(cfg, run, args.config_dir)
    P = sft.pressure(A, phi)
    mu = sft.equilibrium_markov(A, phi)
    rows, lo, hi, used_len = _gibbs_rows(A, mu, phi, P, run["max_len"])
    summary = {
        "origin": origin,
        "d": A.d,
        "pressure": P,
        "max_len": used_len,
        "ratio_min": lo,
        "ratio_max": hi,
        "cylinders": len(rows),
    }
    emitter = _Emitter(args, "gibbs")
    emitter.json(summary, "gibbs")
    emitter.csv("gibbs", ["word", "mu", "S_n_phi", "ratio"], rows, primary=True)
    return 0


_COMMANDS = {
    "verify": cmd_verify,
    "lyapunov": cmd_lyapunov,
    "hyp-times": cmd_hyp_times,
    "equilibrium": cmd_equilibrium,
    "variational": cmd_variational,
    "gibbs": cmd_gibbs,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nuedyn",
        description="Batch experiments on non-uniformly expanding torus maps "
                    "and their symbolic models.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON/TOML config path")
    parser.add_argument("--out", default=None, help="directory for output files")
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    parser.add_argument("--format", choices=["json", "csv"], default="json",
                        help="stdout format (files are always written to --out)")
    parser.add_argument("--quiet", action="store_true", help="suppress stdout/stderr chatter")
    args = parser.parse_args(argv)

    try:
        cfg = config.load_config(args.config)
        args.config_dir = Path(args.config).resolve().parent
        run = config.run_params(cfg)
        return _COMMANDS[args.command](cfg, run, args)
    except NuedynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
