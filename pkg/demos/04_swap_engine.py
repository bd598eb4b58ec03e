"""Two qubits at different temperatures exchanged by a SWAP gate.

Only three energy-change pairs can occur: nothing, or one quantum moving
each way.  The mean exchanges follow from population differences, and
their signs decide whether the pair acts as an engine, refrigerator,
accelerator or heater.
"""
import numpy as np

from qflucts import ExperimentDef, QubitSpec, oracles, run_experiment, tpm
from qflucts.tpm import SIGN_NAMES, SIGNS

W1, W2 = 5.25, 5.17
b1, b2 = 0.5, 2.0
d = ExperimentDef("swap", "aatpm", (QubitSpec.from_beta_omega(b1, W1),
                                    QubitSpec.from_beta_omega(b2, W2)), seed=11)
jd = run_experiment(d)
ecd = tpm.energy_change_distribution(jd, (W1, W2))
closed = oracles.swap_joint_probabilities(b1, b2)
print("P_ab       sampled   closed form")
for i, a in enumerate(SIGNS):
    for j, b in enumerate(SIGNS):
        print(f"P_{SIGN_NAMES[a]}{SIGN_NAMES[b]}  {ecd.p(a, b):10.4f} {closed[i, j]:12.4f}")

en = tpm.engine_energetics(jd, (W1, W2))
ref = oracles.swap_energetics(b1, b2, W1, W2)
print(f"\n<dE1> {en.dE1:+.4f} +/- {en.err_dE1:.4f}   (theory {ref[0]:+.4f})")
print(f"<dE2> {en.dE2:+.4f} +/- {en.err_dE2:.4f}   (theory {ref[1]:+.4f})")
print(f"<W>   {en.work:+.4f} +/- {en.err_work:.4f}   (theory {ref[2]:+.4f})")
print("fluctuation relation:", round(tpm.fr_estimate(d, jd).value, 4))

# mode map from the closed form; rows are beta1*omega1, columns beta2*omega2
grid = np.linspace(0.25, 2.5, 10)
for ratio in (W2 / W1, 0.5):
    modes = oracles.theoretical_phase_diagram(W1, ratio * W1, grid, grid)
    print(f"\nomega2/omega1 = {ratio:.3f}")
    for row in modes:
        print(" ".join(m.value for m in row))
