"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerical failure
(blow-up or no certified contraction), 3 verification failures present.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .analytic_solver import PicardConfig, gaussian_data, picard_solve, tlambda_scan
from .errors import BlowUpError, ConfigError, NoContractionError
from .experiments import config as config_mod
from .experiments.config import ExperimentConfig
from .experiments.data import inflation_threshold
from .experiments.growth import ROW_COLUMNS, growth_experiment, initial_data
from .experiments.io import write_diagnostics, write_json, write_rows, write_spectra
from .experiments.verify import verify_suite
from .integrator import evolve
from .spectral_core import ar_norm, hs_norm, l2_norm, momentum

log = logging.getLogger("raman3nls")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _load(args) -> tuple[ExperimentConfig, Path]:
    cfg = config_mod.load(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    if args.out is not None:
        cfg = cfg.replace(output_dir=args.out)
    out = config_mod.ensure_writable(cfg.output_dir)
    (out / "config.yaml").write_text(config_mod.dumps(cfg), encoding="utf-8")
    return cfg, out


def cmd_simulate(cfg: ExperimentConfig, out: Path) -> int:
    u0 = initial_data(cfg)
    hs_list = tuple(dict.fromkeys((1.0,) + tuple(cfg.hs_list)))
    traj, diag = evolve(u0, cfg.params, cfg.T, cfg.dt, probes=cfg.probes, hs_list=hs_list,
                        store_every=cfg.store_every)
    write_spectra(traj.initial, out / "initial.spectra")
    write_spectra(traj.final, out / "final.spectra")
    write_diagnostics(diag, out / "diagnostics.csv")
    summary = {"steps_stored": len(traj), "dt_stored": traj.dt, "l2_initial": float(diag.l2[0]),
               "l2_final": float(diag.l2[-1]), "max_l2_drift": float(diag.max_l2_drift[-1])}
    write_json(summary, out / "simulate.json")
    print(f"simulate: T={cfg.T:g} stored={len(traj)} max relative L2 drift={summary['max_l2_drift']:.3e}")
    return EXIT_OK


def cmd_picard(cfg: ExperimentConfig, out: Path) -> int:
    pc = cfg.picard
    u0 = initial_data(cfg)
    res = picard_solve(u0, cfg.params, PicardConfig(pc.r, pc.c, pc.grid_points, pc.tol, pc.max_iter,
                                                    pc.max_halvings))
    traj = res.trajectory
    mid = len(traj) // 2
    for label, j in (("minus_T", 0), ("zero", mid), ("plus_T", len(traj) - 1)):
        write_spectra(traj.state(j), out / f"picard_{label}.spectra")
    summary = {"T_certified": res.T_certified, "c_used": res.c_used, "iterations": res.iterations,
               "contraction_history": res.contraction_history, "ball_norm": res.ball_norm,
               "data_norm": res.data_norm, "ball_radius": 2 * res.data_norm,
               "fixed_point_residual": res.fixed_point_residual}
    write_json(summary, out / "picard.json")
    print(f"picard: T={res.T_certified:.6g} iterations={res.iterations} "
          f"final ratio={res.final_ratio:.3g} ball={res.ball_norm:.6g} <= {2 * res.data_norm:.6g}")
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out: Path) -> int:
    report = verify_suite(cfg)
    write_json(report, out / "verify.json")
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: observed={c['observed']:.3e} "
              f"tol={c['tolerance']:.1e}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_growth(cfg: ExperimentConfig, out: Path) -> int:
    rep = growth_experiment(cfg)
    write_rows(rep.as_dicts(), ROW_COLUMNS, out / "growth.csv")
    write_json({"rows": rep.as_dicts(), "mass": rep.mass, "momentum": rep.momentum,
                "drift_a": rep.drift_a, "amplitude_heuristic": rep.amplitude_heuristic},
               out / "growth.json")
    for r in rep.rows:
        print(f"k={r.k}: fitted={r.fitted_rate:.6g} predicted={r.predicted_rate:.6g} "
              f"gap={r.rel_gap:.3%} window={r.window:g}{'' if r.window_ok else ' (no window met the bound)'}")
    return EXIT_OK


def cmd_scan(cfg: ExperimentConfig, out: Path) -> int:
    pc = cfg.picard
    base = PicardConfig(pc.lambdas[0], pc.c, pc.grid_points, pc.tol, pc.max_iter, pc.max_halvings)
    table = tlambda_scan(pc.lambdas, cfg.params, base)
    cols = ["lam", "N", "data_norm", "T_certified", "c_used", "iterations", "final_ratio",
            "dispersion_length"]
    write_rows([r.__dict__ for r in table.rows], cols, out / "tlambda.csv")
    write_json({"slope": table.slope, "r_squared": table.r_squared,
                "nondecreasing": table.nondecreasing}, out / "tlambda.json")
    for r in table.rows:
        print(f"lambda={r.lam:g} N={r.N} |g|_A={r.data_norm:.6g} T={r.T_certified:.6g}")
    print(f"origin fit slope={table.slope:.6g} R^2={table.r_squared:.5f}")
    return EXIT_OK


def cmd_gen_data(cfg: ExperimentConfig, out: Path) -> int:
    u0 = initial_data(cfg)
    write_spectra(u0, out / "data.spectra")
    meta = {"family": cfg.data.family, "N": cfg.N, "l2": l2_norm(u0), "momentum": momentum(u0),
            "h1": hs_norm(u0, 1.0)}
    if cfg.data.family in ("psi", "phi"):
        meta["hs"] = hs_norm(u0, cfg.data.s)
    if cfg.data.family == "psi":
        meta["k0_threshold"] = inflation_threshold(cfg.data.s, cfg.data.eps)
        log.info("smallest k0 with ||psi||_{H^s} <= eps: %d", meta["k0_threshold"])
    if cfg.data.family == "gaussian":
        meta["a_norm"] = ar_norm(u0, cfg.data.lam)
    write_json(meta, out / "data.json")
    print(f"gen-data: {cfg.data.family} N={cfg.N} l2={meta['l2']:.6g}")
    return EXIT_OK


COMMANDS = {
    "simulate": (cmd_simulate, "integrate the truncated system and write diagnostics"),
    "picard": (cmd_picard, "certified fixed-point solve in the analytic class"),
    "verify": (cmd_verify, "run the identity checks and write a JSON report"),
    "growth": (cmd_growth, "fit probe-mode growth rates against the drift prediction"),
    "scan-tlambda": (cmd_scan, "existence time of Gaussian data against lambda"),
    "gen-data": (cmd_gen_data, "write an initial-data spectra file"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="raman3nls", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="YAML configuration file (defaults apply when omitted)")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, help="override the RNG seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, out = _load(args)
        return COMMANDS[args.command][0](cfg, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowUpError, NoContractionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
