"""Loading statistics, site readout, and the atom-number error budget.

Each of the eleven sites loads a single atom with probability 0.57.
Occupied and empty sites separate into two photon-count distributions
whose overlap sets the misclassification rate; losses during the probe
window add a second, occupancy-dependent error. The demo simulates a
full run, refits the count histogram blind, and prints the error table.
"""

import argparse
import math
from pathlib import Path

import numpy as np

from atomcavity import fitting, montecarlo, reports


def mixture_curve(refit: fitting.BimodalFit, n_total: int) -> np.ndarray:
    """Fitted two-Gaussian mixture evaluated on the histogram grid."""
    c = refit.bin_centers
    width = c[1] - c[0]
    d = refit.detection
    g0 = (np.exp(-0.5 * ((c - d.mu_empty) / d.sigma_empty) ** 2)
          / (d.sigma_empty * math.sqrt(2.0 * math.pi)))
    g1 = (np.exp(-0.5 * ((c - d.mu_occupied) / d.sigma_occupied) ** 2)
          / (d.sigma_occupied * math.sqrt(2.0 * math.pi)))
    return n_total * width * ((1.0 - refit.p_load) * g0 + refit.p_load * g1)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="demo_output/loading_and_detection")
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out_dir)

    loading = montecarlo.LoadingModel()
    occ = montecarlo.simulate_loading(loading, n_trials=args.trials,
                                      seed=args.seed)
    per_trial = occ.sum(axis=1)
    gof = montecarlo.occupancy_gof(per_trial, loading)
    print(f"{args.trials} loading trials: mean occupancy "
          f"{per_trial.mean():.3f} (binomial expects "
          f"{loading.mean_occupancy:.2f}), chi-square p = {gof.pvalue:.3f}")

    k = np.arange(loading.n_sites + 1).astype(float)
    counts = np.bincount(per_trial, minlength=loading.n_sites + 1)
    reports.plot_histogram(out / "occupancy.svg", k, counts.astype(float),
                           "occupied sites", "trials",
                           overlay=(k, loading.pmf(k) * args.trials,
                                    "binomial"))

    # photon counts for every site of every trial, then a blind refit
    detection = montecarlo.DetectionModel()
    photons = montecarlo.simulate_counts(occ, detection, seed=args.seed + 1)
    refit = fitting.fit_bimodal(photons.ravel())
    print(f"bimodal refit of {photons.size} counts: p_load = "
          f"{refit.p_load:.4f}, peaks at {refit.detection.mu_empty:.1f} / "
          f"{refit.detection.mu_occupied:.1f} photons")
    reports.plot_histogram(
        out / "counts.svg", refit.bin_centers, refit.bin_counts,
        "photon counts", "sites",
        overlay=(refit.bin_centers, mixture_curve(refit, photons.size),
                 "mixture fit"))

    threshold = montecarlo.optimal_threshold(detection)
    err = montecarlo.detection_error(detection, threshold)
    print(f"optimal threshold {threshold:.0f} photons -> per-site "
          f"misclassification {err:.2e}")

    survival = montecarlo.SurvivalModel()
    window = 3e-3
    print(f"loss in a {1e3 * window:.0f} ms window "
          f"(lifetime {survival.lifetime_s} s): "
          f"{1.0 - survival.survival(window):.6f}")
    print("\natom-number error vs occupancy (quadratic in N):")
    for n in range(1, 9):
        print(f"  N = {n}: {montecarlo.atom_number_error(n):.4f}")
    print(f"wrote {out}/occupancy.svg, counts.svg")


if __name__ == "__main__":
    main()
