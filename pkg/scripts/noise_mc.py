"""Monte Carlo change rate of the pentagon Crocker diagrams vs the union bound."""

import argparse
import json

from crocker_stability.noise import NoiseModel, mc_stability_experiment
from crocker_stability.oracles import pentagon_noise_setup

p = argparse.ArgumentParser()
p.add_argument("--sigma", type=float, nargs="+", default=[0.0, 0.0002, 0.0005, 0.002, 0.008])
p.add_argument("--trials", type=int, default=200)
p.add_argument("--seed", type=int, default=0)
args = p.parse_args()

series, grid = pentagon_noise_setup()
for sigma in args.sigma:
    rep = mc_stability_experiment(series, grid, NoiseModel(sigma, 2, seed=args.seed), args.trials)
    keep = {k: rep[k] for k in ("sigma", "change_rate", "crossing_rate", "mean_l1", "tau_star", "theoretical_bound")}
    print(json.dumps(keep))
