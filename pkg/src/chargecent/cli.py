"""Command-line front end for reproducible centrality/simulation experiments.

Subcommands: ``centrality`` (expected scores), ``simulate`` (realized
scores), ``correlate`` (rank correlation of two score files, single or
batch), and ``experiment`` (ratio sweep with repetitions tying the other
three together). Every output embeds the fully resolved configuration, and
identical configurations with identical seeds reproduce byte-identical
files.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .betweenness import soc_betweenness, standard_betweenness
from .errors import NumericalError
from .generators import sample_omega
from .graph import Graph, GraphParseError, load_edge_list, make_instance, spectral_radius
from .katz import KatzParams, max_alpha, soc_katz, standard_katz
from .oracles import OracleBudget, brute_soc_bc, dense_soc_katz
from .rwbc import rwbc_all_pairs, sample_feasible_pairs, soc_rwbc
from .scores import ScoreVector, align_scores
from .simulate import HoppingParams, SirParams, particle_hopping, sir_influence
from .stats import correlation_report, kendall_tau

logger = logging.getLogger(__name__)

MEASURES = ("soc-katz", "katz", "soc-bc", "bc", "soc-rwbc", "rwbc")
SIMULATIONS = ("sir", "hopping")


@dataclass
class ExperimentConfig:
    """Resolved run parameters; serializable to/from JSON config files."""

    input: str
    format: str = "snap-tsv"
    directed: bool = False
    kappa: int = 1
    omega_file: str | None = None
    omega_ratio: float | None = None
    seed: int = 0
    measure: str | None = None
    alpha: float | None = None
    pairs: int | None = None
    pairs_file: str | None = None
    sim: str | None = None
    runs: int = 1000
    policy: str = "shortest-feasible"
    duration: int = 10000
    injection_rate: float = 0.5
    max_injections: int | None = None
    ratios: str | None = None
    reps: int = 1
    workers: int = 1
    endpoints: str = "target"
    verify: bool = False
    state_dump: bool = False
    out: str = "."

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items()}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with any of the long options as keys")
    p.add_argument("--input", help="edge-list file")
    p.add_argument("--format", choices=("snap-tsv", "matrix-market", "csv"))
    p.add_argument("--directed", action="store_const", const=True)
    p.add_argument("--kappa", type=int)
    p.add_argument("--omega-file", help="file with one refill node label per line")
    p.add_argument("--omega-ratio", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chargecent", description=__doc__)
    ap.add_argument("--version", action="version", version=f"chargecent {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("centrality", help="compute expected centrality scores")
    _add_common(c)
    c.add_argument("--measure", choices=MEASURES)
    c.add_argument("--alpha", type=float)
    c.add_argument("--pairs", type=int, help="number of sampled source-target pairs")
    c.add_argument("--pairs-file", help="file of 'source target' label pairs")
    c.add_argument("--endpoints", choices=("target", "none"))
    c.add_argument("--verify", action="store_const", const=True,
                   help="cross-check against the brute-force oracle (small inputs)")
    c.add_argument("--state-dump", action="store_const", const=True,
                   help="also write per-(node, charge) scores (soc-bc only)")

    s = sub.add_parser("simulate", help="run a realized-centrality simulation")
    _add_common(s)
    s.add_argument("--sim", choices=SIMULATIONS)
    s.add_argument("--alpha", type=float, help="transmission probability (sir)")
    s.add_argument("--runs", type=int)
    s.add_argument("--policy", choices=("shortest-feasible", "random-feasible"))
    s.add_argument("--duration", type=int)
    s.add_argument("--injection-rate", type=float)
    s.add_argument("--max-injections", type=int)
    s.add_argument("--pairs", type=int)
    s.add_argument("--pairs-file")

    r = sub.add_parser("correlate", help="rank-correlate expected vs realized scores")
    r.add_argument("--expected", help="expected-score CSV")
    r.add_argument("--realized", help="realized-score CSV")
    r.add_argument("--batch", help="experiment directory with ratio_*/rep_*/ runs")
    r.add_argument("--out")

    e = sub.add_parser("experiment", help="ratio sweep with repetitions")
    _add_common(e)
    e.add_argument("--measure", choices=MEASURES)
    e.add_argument("--alpha", type=float)
    e.add_argument("--sim", choices=SIMULATIONS)
    e.add_argument("--runs", type=int)
    e.add_argument("--policy", choices=("shortest-feasible", "random-feasible"))
    e.add_argument("--duration", type=int)
    e.add_argument("--injection-rate", type=float)
    e.add_argument("--max-injections", type=int)
    e.add_argument("--pairs", type=int)
    e.add_argument("--ratios", help="comma-separated refill ratios, e.g. 0.1,0.2")
    e.add_argument("--reps", type=int)
    e.add_argument("--workers", type=int)
    return ap


def _resolve(args: argparse.Namespace) -> ExperimentConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        file_cfg = json.loads(Path(args.config).read_text())
        unknown = set(file_cfg) - set(ExperimentConfig.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    cfg = ExperimentConfig(input=file_cfg.get("input", ""))
    for name in ExperimentConfig.__dataclass_fields__:
        cli_val = getattr(args, name, None)
        if cli_val is not None:
            setattr(cfg, name, cli_val)
        elif name in file_cfg:
            setattr(cfg, name, file_cfg[name])
    if not cfg.input:
        raise ValueError("--input is required (flag or config file)")
    return cfg


def _load_instance(cfg: ExperimentConfig):
    g = load_edge_list(cfg.input, cfg.format, cfg.directed)
    omega = _resolve_omega(cfg, g)
    return g, make_instance(g, omega, cfg.kappa)


def _resolve_omega(cfg: ExperimentConfig, g: Graph) -> list[int]:
    if cfg.omega_file:
        labels = [ln.strip() for ln in Path(cfg.omega_file).read_text().splitlines() if ln.strip()]
        missing = [lab for lab in labels if lab not in g.label_to_id]
        if missing:
            raise ValueError(f"omega labels not in graph: {missing[:5]}")
        return [g.label_to_id[lab] for lab in labels]
    if cfg.omega_ratio is not None:
        return sample_omega(g.n, cfg.omega_ratio, cfg.seed)
    return []


def _resolve_pairs(cfg: ExperimentConfig, g: Graph, inst) -> list[tuple[int, int]]:
    if cfg.pairs_file:
        pairs = []
        for ln in Path(cfg.pairs_file).read_text().splitlines():
            toks = ln.split()
            if not toks:
                continue
            if len(toks) != 2:
                raise ValueError(f"pair line needs two labels: {ln!r}")
            pairs.append((g.label_to_id[toks[0]], g.label_to_id[toks[1]]))
        if not pairs:
            raise ValueError("empty pairs file")
        return pairs
    if cfg.pairs:
        sampled, _ = sample_feasible_pairs(inst, cfg.pairs, cfg.seed)
        return sampled
    raise ValueError("random-walk betweenness needs --pairs N or --pairs-file")


def compute_measure(cfg: ExperimentConfig, g: Graph, inst) -> ScoreVector:
    measure = cfg.measure
    if measure in ("soc-katz", "katz"):
        alpha = cfg.alpha
        if alpha is None:
            if measure == "soc-katz":
                bound = max_alpha(inst).max_alpha
            else:
                rho = spectral_radius(g).value
                bound = np.inf if rho <= 0 else 1.0 / rho
            alpha = 0.03 if not np.isfinite(bound) else 0.9 * bound
        if measure == "soc-katz":
            return soc_katz(inst, KatzParams(alpha=alpha))
        return standard_katz(g, alpha)
    if measure == "soc-bc":
        return soc_betweenness(inst, cfg.endpoints)
    if measure == "bc":
        return standard_betweenness(g, cfg.endpoints)
    pairs = _resolve_pairs(cfg, g, inst)
    if measure == "soc-rwbc":
        return soc_rwbc(inst, pairs)
    if measure == "rwbc":
        return rwbc_all_pairs(g, pairs)
    raise ValueError(f"--measure must be one of {MEASURES}")


def _write_scores(sv: ScoreVector, cfg: ExperimentConfig, out: Path, stem: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    embedded = cfg.to_dict()
    embedded.pop("out", None)  # output location is not part of the run's identity
    sv.meta["config"] = embedded
    sv.meta["version"] = __version__
    csv = out / f"{stem}.csv"
    sv.write_csv(csv)
    Path(out / f"{stem}.meta.json").write_text(
        json.dumps(sv.meta, sort_keys=True, indent=2) + "\n"
    )
    return csv


def cmd_centrality(cfg: ExperimentConfig) -> int:
    g, inst = _load_instance(cfg)
    sv = compute_measure(cfg, g, inst)
    if cfg.verify:
        code = _verify(cfg, g, inst, sv)
        if code:
            return code
    out = Path(cfg.out)
    _write_scores(sv, cfg, out, "scores")
    if cfg.state_dump:
        if cfg.measure != "soc-bc":
            raise ValueError("--state-dump applies to soc-bc only")
        _write_state_dump(inst, cfg, out)
    print(f"wrote {out / 'scores.csv'} ({len(sv)} nodes)")
    return 0


def _write_state_dump(inst, cfg: ExperimentConfig, out: Path) -> None:
    from .betweenness import soc_betweenness_scores
    from .statespace import build_state_graph

    sg = build_state_graph(inst, starred=True)
    scores = soc_betweenness_scores(inst, cfg.endpoints, sg)
    with open(out / "scores.states.csv", "w") as fh:
        fh.write("node_label,charge,score\n")
        for idx in range(sg.n_numeric):
            node, soc = sg.state_of(idx)
            fh.write(f"{inst.graph.labels[node]},{soc},{float(scores.state_scores[idx])!r}\n")


def _verify(cfg: ExperimentConfig, g: Graph, inst, sv: ScoreVector) -> int:
    budget = OracleBudget()
    if cfg.measure == "soc-bc":
        ref = brute_soc_bc(inst, cfg.endpoints, budget)
    elif cfg.measure == "soc-katz":
        alpha = sv.meta["alpha"]
        ref = dense_soc_katz(inst, alpha)
    else:
        raise ValueError("--verify supports soc-bc and soc-katz")
    worst = float(np.max(np.abs(ref.values - sv.values)))
    ok = worst <= 1e-8
    print(f"verify {cfg.measure}: max |kernel - oracle| = {worst:.3e} -> {'OK' if ok else 'MISMATCH'}")
    return 0 if ok else 2


def cmd_simulate(cfg: ExperimentConfig) -> int:
    g, inst = _load_instance(cfg)
    out = Path(cfg.out)
    if cfg.sim == "sir":
        if cfg.alpha is None:
            raise ValueError("sir needs --alpha (transmission probability)")
        outcome = sir_influence(inst, SirParams(alpha=cfg.alpha, runs=cfg.runs, seed=cfg.seed))
    elif cfg.sim == "hopping":
        pairs = None
        if cfg.pairs_file or cfg.pairs:
            pairs = tuple(_resolve_pairs(cfg, g, inst))
        outcome = particle_hopping(
            inst,
            HoppingParams(
                policy=cfg.policy,
                duration=cfg.duration,
                injection_rate=cfg.injection_rate,
                seed=cfg.seed,
                pairs=pairs,
                max_injections=cfg.max_injections,
            ),
        )
    else:
        raise ValueError(f"--sim must be one of {SIMULATIONS}")
    _write_scores(outcome.to_scores(), cfg, out, "realized")
    print(f"wrote {out / 'realized.csv'} ({g.n} nodes)")
    return 0


def _sibling_meta(csv_path: Path) -> dict:
    meta_path = csv_path.with_suffix("").with_suffix(".meta.json")
    if not meta_path.exists():
        meta_path = csv_path.parent / (csv_path.stem + ".meta.json")
    if meta_path.exists():
        return json.loads(meta_path.read_text())
    return {}


def _correlate_files(expected: Path, realized: Path) -> dict:
    sv_e = ScoreVector.read_csv(expected)
    sv_r = ScoreVector.read_csv(realized)
    y, z = align_scores(sv_e, sv_r)
    meta_e = _sibling_meta(expected)
    meta_r = _sibling_meta(realized)
    cfg = meta_e.get("config", meta_r.get("config", {}))
    report = correlation_report(
        kendall_tau(y, z),
        len(y),
        measure=meta_e.get("measure", "unknown"),
        simulation=meta_r.get("simulation", "unknown"),
        expected=str(expected),
        realized=str(realized),
    )
    for key in ("omega_ratio", "kappa", "seed"):
        if key in cfg:
            report[key] = cfg[key]
    return report


def cmd_correlate(args: argparse.Namespace) -> int:
    if args.batch:
        return _correlate_batch(Path(args.batch), Path(args.out or args.batch))
    if not (args.expected and args.realized):
        raise ValueError("need --expected and --realized, or --batch")
    report = _correlate_files(Path(args.expected), Path(args.realized))
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _correlate_batch(root: Path, out: Path) -> int:
    rows = []
    for ratio_dir in sorted(root.glob("ratio_*")):
        ratio = float(ratio_dir.name.split("_", 1)[1])
        taus = []
        for rep_dir in sorted(ratio_dir.glob("rep_*")):
            exp, real = rep_dir / "expected.csv", rep_dir / "realized.csv"
            if not (exp.exists() and real.exists()):
                continue
            taus.append(_correlate_files(exp, real)["tau"])
        if taus:
            q = np.quantile(taus, [0.0, 0.25, 0.5, 0.75, 1.0])
            rows.append((ratio, len(taus), *q))
    if not rows:
        raise ValueError(f"no ratio_*/rep_*/ score pairs under {root}")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "summary.csv"
    with open(path, "w") as fh:
        fh.write("ratio,reps,tau_min,tau_q1,tau_median,tau_q3,tau_max\n")
        for ratio, k, *qs in rows:
            fh.write(f"{ratio!r},{k}," + ",".join(repr(float(x)) for x in qs) + "\n")
    print(f"wrote {path} ({len(rows)} ratios)")
    return 0


def _run_rep(task: tuple) -> tuple[float, int, float]:
    cfg_dict, ratio, rep = task
    cfg = ExperimentConfig(**cfg_dict)
    g = load_edge_list(cfg.input, cfg.format, cfg.directed)
    rep_seed = int(np.random.SeedSequence([cfg.seed, int(ratio * 1000), rep]).generate_state(1)[0])
    omega = sample_omega(g.n, ratio, rep_seed)
    inst = make_instance(g, omega, cfg.kappa)
    rep_cfg = ExperimentConfig(**dict(cfg_dict, seed=rep_seed, omega_ratio=ratio))
    out = Path(cfg.out) / f"ratio_{ratio}" / f"rep_{rep:02d}"
    expected = compute_measure(rep_cfg, g, inst)
    _write_scores(expected, rep_cfg, out, "expected")
    if cfg.sim == "sir":
        outcome = sir_influence(inst, SirParams(alpha=cfg.alpha, runs=cfg.runs, seed=rep_seed))
    else:
        pairs = tuple(_resolve_pairs(rep_cfg, g, inst)) if cfg.pairs else None
        outcome = particle_hopping(
            inst,
            HoppingParams(policy=cfg.policy, duration=cfg.duration,
                          injection_rate=cfg.injection_rate, seed=rep_seed,
                          pairs=pairs, max_injections=cfg.max_injections),
        )
    _write_scores(outcome.to_scores(), rep_cfg, out, "realized")
    y, z = align_scores(expected, outcome.to_scores())
    return ratio, rep, kendall_tau(y, z)


def cmd_experiment(cfg: ExperimentConfig) -> int:
    if not cfg.measure or not cfg.sim:
        raise ValueError("experiment needs --measure and --sim")
    if cfg.sim == "sir" and cfg.alpha is None:
        raise ValueError("sir needs --alpha")
    ratios = [float(r) for r in (cfg.ratios or "0.1").split(",")]
    tasks = [(cfg.to_dict(), r, k) for r in ratios for k in range(cfg.reps)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_rep, tasks))
    else:
        results = [_run_rep(t) for t in tasks]
    results.sort(key=lambda r: (r[0], r[1]))
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "taus.csv", "w") as fh:
        fh.write("ratio,rep,tau\n")
        for ratio, rep, tau in results:
            fh.write(f"{ratio!r},{rep},{tau!r}\n")
    embedded = cfg.to_dict()
    embedded.pop("out", None)
    (out / "experiment.meta.json").write_text(
        json.dumps({"config": embedded, "version": __version__}, sort_keys=True, indent=2) + "\n"
    )
    _correlate_batch(out, out)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "correlate":
            return cmd_correlate(args)
        cfg = _resolve(args)
        if args.command == "centrality":
            return cmd_centrality(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        return cmd_experiment(cfg)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (GraphParseError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
