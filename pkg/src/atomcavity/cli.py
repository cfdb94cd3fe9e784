"""Command-line interface.

Every subcommand writes its outputs under --out-dir and prints a short
summary. Option values resolve in three layers: built-in defaults, then a
JSON config file (--config or the ATOMCAVITY_CONFIG environment variable),
then explicit flags. Exit status: 0 on success, 1 on runtime or input
failure (including a failed verify), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance, fitting, geometry, lindblad, montecarlo, qed
from . import reports, thermal
from .errors import AtomCavityError, TableFormatError

CONFIG_ENV = "ATOMCAVITY_CONFIG"


def _load_config(path: str | None) -> dict:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise TableFormatError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise TableFormatError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise TableFormatError("config must be a JSON object")
    return cfg


class _Options:
    """Flag > config > default resolution for one parsed command."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = _load_config(args.config)

    def get(self, key: str, default):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag
        if key in self.config:
            return type(default)(self.config[key]) if default is not None \
                else self.config[key]
        return default

    def out_dir(self) -> Path:
        return Path(self.get("out_dir", "out"))


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must be MIN:MAX:STEP, got {text!r}") from None
    if step <= 0 or hi <= lo:
        raise ValueError("grid needs MAX > MIN and STEP > 0")
    n = int(round((hi - lo) / step)) + 1
    return np.linspace(lo, hi, n)


def _cavity_params(opt: _Options) -> qed.CavityParams:
    return qed.CavityParams(
        g0=opt.get("g0", qed.CavityParams.g0),
        kappa=opt.get("kappa", qed.CavityParams.kappa),
        gamma=opt.get("gamma", qed.CavityParams.gamma))


def cmd_simulate_spectrum(args) -> int:
    opt = _Options(args)
    params = _cavity_params(opt)
    n_atoms = opt.get("n_atoms", 1)
    g = opt.get("g", 2.74)
    delta_ca = opt.get("delta_ca", 0.0)
    grid = _parse_grid(opt.get("grid", "-12:12:0.05"))
    noise = opt.get("noise", 0.0)

    if opt.get("oracle", False):
        spec = lindblad.SystemSpec.uniform(
            n_atoms=n_atoms, g=g, delta_ca=delta_ca, kappa=params.kappa,
            gamma=params.gamma, photon_cutoff=opt.get("cutoff", 3))
        scan = lindblad.oracle_transmission(spec, grid)
        source = "master equation"
    else:
        omega = qed.collective_coupling([g] * n_atoms).omega_eff
        scan = qed.spectrum(grid, omega_eff=omega, delta_ca=delta_ca,
                            params=params)
        source = "analytic response"
    if noise > 0:
        rng = montecarlo.rng_from_seed(opt.get("seed", 0))
        noisy = scan.transmission * (1.0 + noise * rng.standard_normal(
            scan.transmission.size))
        scan = qed.SpectrumScan(scan.delta_pa, np.clip(noisy, 0.0, None))

    out = opt.out_dir()
    reports.spectrum_to_csv(out / "spectrum.csv", scan)
    reports.plot_series(out / "spectrum.svg",
                        [(scan.delta_pa, scan.transmission, None)],
                        "probe-atom detuning (MHz)", "transmission",
                        title=f"{n_atoms} atoms, {source}")
    print(f"wrote {out / 'spectrum.csv'} and spectrum.svg "
          f"({len(scan)} points, {source})")
    return 0


def cmd_fit_spectrum(args) -> int:
    opt = _Options(args)
    scan = reports.spectrum_from_csv(args.csv)
    params = _cavity_params(opt)
    result = fitting.fit_vrs(scan, params=params)
    out = opt.out_dir()
    reports.write_json(out / "fit.json", reports.fit_report(result))
    model = result.value("amplitude") * qed.transmission(
        scan.delta_pa, delta_ca=result.value("delta_ca"),
        omega_eff=result.value("omega_eff"), params=params)
    reports.plot_series(out / "fit.svg",
                        [(scan.delta_pa, scan.transmission, "data"),
                         (scan.delta_pa, model, "fit")],
                        "probe-atom detuning (MHz)", "transmission")
    print(f"omega_eff = {result.value('omega_eff'):.4f} "
          f"+/- {result.sigma('omega_eff'):.4f} MHz, delta_ca = "
          f"{result.value('delta_ca'):.4f} MHz "
          f"(chi2/dof = {result.chi2 / max(result.dof, 1):.3g})")
    print(f"wrote {out / 'fit.json'} and fit.svg")
    return 0


def cmd_scan_z(args) -> int:
    opt = _Options(args)
    geo = geometry.ModeGeometry()
    g0 = opt.get("g0", qed.CavityParams.g0)
    span = opt.get("span_um", 250.0)
    n = opt.get("points", 1001)
    z = np.linspace(-span, span, n)
    env = geometry.envelope(z, geo)
    out = opt.out_dir()
    reports.write_csv(out / "scan_z.csv",
                      {"z_um": z, "envelope": env, "coupling_MHz": g0 * env})
    reports.plot_series(out / "scan_z.svg", [(z, g0 * env, None)],
                        "axial position (um)", "coupling (MHz)",
                        title=f"beat period {geo.beat_period_um:.1f} um")
    print(f"beat period {geo.beat_period_um:.2f} um; wrote "
          f"{out / 'scan_z.csv'} and scan_z.svg")
    return 0


def cmd_scan_xy(args) -> int:
    opt = _Options(args)
    geo = geometry.ModeGeometry()
    g0 = opt.get("g0", qed.CavityParams.g0)
    span = opt.get("span_um", 100.0)
    n = opt.get("points", 81)
    x = np.linspace(-span, span, n)
    y = np.linspace(-span, span, n)
    xx, yy = np.meshgrid(x, y)
    coupling = geometry.local_coupling(xx, yy, 0.0, geo, g0)
    out = opt.out_dir()
    reports.write_csv(out / "scan_xy.csv",
                      {"x_um": xx.ravel(), "y_um": yy.ravel(),
                       "coupling_MHz": coupling.ravel()})
    reports.plot_map(out / "scan_xy.svg", x, y, coupling,
                     "x (um)", "y (um)", label="coupling (MHz)",
                     title=f"waist {geo.waist_geometric_um:.1f} um")
    print(f"wrote {out / 'scan_xy.csv'} and scan_xy.svg "
          f"({n} x {n} map)")
    return 0


def cmd_thermal_avg(args) -> int:
    opt = _Options(args)
    trap = thermal.TrapParams(
        temperature_uk=opt.get("temperature_uk",
                               thermal.TrapParams.temperature_uk),
        lattice_depth_mk=opt.get("depth_mk",
                                 thermal.TrapParams.lattice_depth_mk))
    where = opt.get("z0", "antinode")
    if where == "antinode":
        z0 = 0.0
    elif where == "node":
        z0 = thermal.probe_node_offset_nm()
    else:
        z0 = float(where)
    report = thermal.convergence_report(
        z0, trap, g0=opt.get("g0", thermal.G0_GEOMETRIC_MHZ),
        n_max=opt.get("n_max", 10), n_intervals=opt.get("intervals", 2048))
    report["z0_nm"] = z0
    out = opt.out_dir()
    reports.write_json(out / "thermal.json", report)
    print(f"thermal average at z0 = {z0:.2f} nm: "
          f"{report['value_mhz']:.4f} MHz (nbar = {report['mean_phonon']:.3f},"
          f" truncation shift {report['truncation_shift']:.1e})")
    print(f"wrote {out / 'thermal.json'}")
    return 0


def cmd_load_mc(args) -> int:
    opt = _Options(args)
    model = montecarlo.LoadingModel(
        p_load=opt.get("p_load", montecarlo.LOAD_PROBABILITY),
        n_sites=opt.get("n_sites", montecarlo.N_SITES))
    trials = opt.get("trials", 100_000)
    seed = opt.get("seed", 0)
    occ = montecarlo.simulate_loading(model, n_trials=trials, seed=seed)
    per_trial = occ.sum(axis=1)
    counts = np.bincount(per_trial, minlength=model.n_sites + 1)
    gof = montecarlo.occupancy_gof(per_trial, model)
    out = opt.out_dir()
    k = np.arange(model.n_sites + 1)
    reports.write_csv(out / "loading.csv",
                      {"occupancy": k, "trials": counts,
                       "expected": model.pmf(k) * trials})
    summary = {"trials": trials, "seed": seed, "p_load": model.p_load,
               "n_sites": model.n_sites,
               "mean_occupancy": float(per_trial.mean()),
               "expected_mean": model.mean_occupancy,
               "std_occupancy": float(per_trial.std(ddof=1)),
               "chi2": gof.statistic, "chi2_dof": gof.dof,
               "chi2_pvalue": gof.pvalue}
    reports.write_json(out / "loading.json", summary)
    reports.plot_histogram(out / "loading.svg", k, counts,
                           "occupied sites", "trials",
                           overlay=(k, model.pmf(k) * trials, "binomial"))
    print(f"mean occupancy {summary['mean_occupancy']:.3f} "
          f"(expect {model.mean_occupancy:.2f}), chi-square p = "
          f"{gof.pvalue:.3f}")
    print(f"wrote {out / 'loading.csv'}, loading.json, loading.svg")
    return 0


def cmd_fit_scaling(args) -> int:
    opt = _Options(args)
    table = reports.read_csv(args.csv)
    for name in ("n_atoms", "omega_eff_MHz"):
        if name not in table:
            raise TableFormatError(f"missing column {name!r}", line=1)
    sigmas = table.get("sigma_MHz")
    result = fitting.fit_sqrt_scaling(table["n_atoms"],
                                      table["omega_eff_MHz"], sigmas)
    g = result.value("g")
    out = opt.out_dir()
    reports.write_json(out / "scaling.json", reports.fit_report(result))
    n_grid = np.linspace(table["n_atoms"].min(), table["n_atoms"].max(), 200)
    reports.plot_series(
        out / "scaling.svg",
        [(table["n_atoms"], table["omega_eff_MHz"], "data"),
         (n_grid, g * np.sqrt(n_grid), "g sqrt(N)")],
        "atom number N", "collective coupling (MHz)",
        title=f"g = {g:.3f} MHz")
    print(f"g = {g:.4f} +/- {result.sigma('g'):.4f} MHz "
          f"(chi2/dof = {result.chi2 / max(result.dof, 1):.3g})")
    print(f"wrote {out / 'scaling.json'} and scaling.svg")
    return 0


def cmd_verify(args) -> int:
    only = set(args.only.split(",")) if args.only else None
    names = [c.__name__.removeprefix("check_") for c in acceptance.CRITERIA]
    if only is not None:
        unknown = only - set(names)
        if unknown:
            raise ValueError(f"unknown criteria: {', '.join(sorted(unknown))}"
                             f" (choose from {', '.join(names)})")
    all_passed = True
    for check, name in zip(acceptance.CRITERIA, names):
        if only is not None and name not in only:
            continue
        result = check()
        print(result.line())
        all_passed &= result.passed
    return 0 if all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomcavity",
        description="Simulate and analyze an atom array coupled to a "
                    "high-finesse cavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out-dir", dest="out_dir", help="output directory "
                       "(default: out)")
        p.add_argument("--config", help="JSON config file; also read from "
                       f"${CONFIG_ENV}")

    p = sub.add_parser("simulate-spectrum",
                       help="transmission spectrum for N coupled atoms")
    p.add_argument("--n-atoms", dest="n_atoms", type=int)
    p.add_argument("--g", type=float, help="per-atom coupling, MHz")
    p.add_argument("--delta-ca", dest="delta_ca", type=float,
                   help="cavity-atom detuning, MHz")
    p.add_argument("--grid", help="probe grid MIN:MAX:STEP in MHz")
    p.add_argument("--kappa", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--noise", type=float,
                   help="multiplicative noise fraction")
    p.add_argument("--seed", type=int)
    p.add_argument("--oracle", action="store_const", const=True,
                   help="use the master-equation solver")
    p.add_argument("--cutoff", type=int, help="photon cutoff for --oracle")
    common(p)
    p.set_defaults(func=cmd_simulate_spectrum)

    p = sub.add_parser("fit-spectrum", help="fit a spectrum CSV to the "
                       "split-resonance model")
    p.add_argument("csv")
    p.add_argument("--kappa", type=float)
    p.add_argument("--gamma", type=float)
    common(p)
    p.set_defaults(func=cmd_fit_spectrum)

    p = sub.add_parser("scan-z", help="axial coupling envelope map")
    p.add_argument("--g0", type=float)
    p.add_argument("--span-um", dest="span_um", type=float)
    p.add_argument("--points", type=int)
    common(p)
    p.set_defaults(func=cmd_scan_z)

    p = sub.add_parser("scan-xy", help="transverse coupling map")
    p.add_argument("--g0", type=float)
    p.add_argument("--span-um", dest="span_um", type=float)
    p.add_argument("--points", type=int)
    common(p)
    p.set_defaults(func=cmd_scan_xy)

    p = sub.add_parser("thermal-avg", help="motion-averaged coupling")
    p.add_argument("--z0", help="'antinode', 'node', or offset in nm")
    p.add_argument("--g0", type=float)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--intervals", type=int)
    p.add_argument("--temperature-uk", dest="temperature_uk", type=float)
    p.add_argument("--depth-mk", dest="depth_mk", type=float)
    common(p)
    p.set_defaults(func=cmd_thermal_avg)

    p = sub.add_parser("load-mc", help="Monte Carlo loading statistics")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--p-load", dest="p_load", type=float)
    p.add_argument("--n-sites", dest="n_sites", type=int)
    common(p)
    p.set_defaults(func=cmd_load_mc)

    p = sub.add_parser("fit-scaling", help="fit collective splittings to "
                       "g sqrt(N)")
    p.add_argument("csv", help="columns n_atoms, omega_eff_MHz "
                   "[, sigma_MHz]")
    common(p)
    p.set_defaults(func=cmd_fit_scaling)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion names")
    common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AtomCavityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
