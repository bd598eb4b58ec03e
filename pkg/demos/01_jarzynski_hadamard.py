"""A thermal qubit kicked by a Hadamard gate obeys <exp(-beta W)> = 1.

The qubit is prepared in a Gibbs state by entangling it with an ancilla.
Reading the ancilla at the end (AATPM) gives the same joint statistics as
measuring the system before the drive (TPM), so both columns agree.
"""
import numpy as np

from qflucts import ExperimentDef, QubitSpec, repeat_for_error
from qflucts import oracles, tpm

print(f"{'beta*omega':>10} {'P+':>7} {'P-':>7} {'P0':>7} {'AATPM':>16} {'TPM':>16}")
for bw in np.linspace(-2, 2, 9):
    spec = (QubitSpec.from_beta_omega(bw),)
    values = []
    for protocol in ("aatpm", "tpm"):
        est = repeat_for_error(ExperimentDef("jarzynski", protocol, spec, seed=7), k=25)
        values.append(f"{est.value:.4f} +/- {est.std_error:.4f}")
    pp, pm, p0 = oracles.hadamard_work_statistics(bw)
    print(f"{bw:10.2f} {pp:7.4f} {pm:7.4f} {p0:7.4f} {values[0]:>16} {values[1]:>16}")

# the exact density-matrix run has no sampling error at all
d = ExperimentDef("jarzynski", "aatpm", (QubitSpec.from_beta_omega(1.7),))
print("\nexact average at beta*omega = 1.7:", tpm.fr_estimate(d, tpm.exact_distribution(d)).value)
