"""Intermediate sigma_x measurements do not break the fluctuation relation.

The drive R_Y(pi) is cut into N slices with a discarded sigma_x
measurement between them.  The transition probabilities drift to 1/2 as N
grows (the qubit is scrambled rather than frozen), yet the exponential
average of the energy change stays exactly 1.
"""
from qflucts import ExperimentDef, QubitSpec, oracles, run_experiment, tpm

spec = (QubitSpec.from_beta_omega(1.0),)
print(f"{'N':>4} {'p(0|0) sampled':>15} {'closed form':>12} {'exact <exp>':>12}")
for n in (1, 2, 3, 5, 10, 25, 50, 200):
    d = ExperimentDef("intermediate", "aatpm", spec, seed=3, n_steps=n)
    sampled = run_experiment(d).conditional()[0, 0]
    stay, _ = oracles.intermediate_pmn(n)
    exact = tpm.fr_estimate(d, tpm.exact_distribution(d)).value
    print(f"{n:4d} {sampled:15.4f} {stay:12.4f} {exact:12.10f}")
