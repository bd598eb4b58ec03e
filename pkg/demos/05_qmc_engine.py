"""Replacing the SWAP by a singlet-triplet measurement halves every exchange.

The measurement outcome is thrown away.  Starting from |01> or |10> the
qubits end up swapped half of the time, so all mean energy changes are
half the SWAP values while the fluctuation relation still holds.
"""
from qflucts import ExperimentDef, QubitSpec, exact_distribution, tpm

W1, W2 = 5.25, 5.17
print(f"{'b1':>5} {'b2':>5} {'QMC <W> / SWAP <W>':>20} {'QMC relation':>13}")
for b1, b2 in ((0.5, 2.0), (1.0, 0.5), (2.2, 0.3)):
    specs = (QubitSpec.from_beta_omega(b1, W1), QubitSpec.from_beta_omega(b2, W2))
    swap = tpm.engine_energetics(exact_distribution(ExperimentDef("swap", "aatpm", specs)), (W1, W2))
    qmc_def = ExperimentDef("qmc", "aatpm", specs)
    jd = exact_distribution(qmc_def)
    qmc = tpm.engine_energetics(jd, (W1, W2))
    print(f"{b1:5.2f} {b2:5.2f} {qmc.work / swap.work:20.6f} "
          f"{tpm.fr_estimate(qmc_def, jd).value:13.10f}")
