"""Heating after the drive pulls the exponential average below one.

Amplitude damping toward |0> (the upper level) adds heat Q > 0 to every
realisation that ends in |1>.  An extra readout right after the gate
separates work from heat, and the first-order expansion
1 - beta <Q exp(-beta W)> tracks the drop while beta*Q stays small.
"""
from qflucts import ExperimentDef, NoiseConfig, QubitSpec, heat_leak_expansion, tpm

cfg = NoiseConfig(heating=0.05)
print(f"{'beta*omega':>10} {'<exp(-bW)>':>11} {'expansion':>10} {'beta<Q>':>8}")
for bw in (0.5, 1.0, 1.5, 2.0):
    d = ExperimentDef("jarzynski", "aatpm", (QubitSpec.from_beta_omega(bw),),
                      shots=200_000, seed=1, noise=cfg)
    samples = tpm.heat_work_samples(d)
    prediction = heat_leak_expansion(samples.beta_m, samples.mean_heat,
                                     samples.work, samples.heat)
    print(f"{bw:10.2f} {samples.exponential_average():11.4f} {prediction:10.4f} "
          f"{samples.beta_m * samples.mean_heat:8.4f}")
