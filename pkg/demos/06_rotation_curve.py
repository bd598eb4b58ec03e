"""<sigma_z> after R_Y(alpha): ideal, and with miscalibrated rotations.

A fixed 2% over-rotation alone barely shows at alpha = pi, where the
cosine is flat.  A 10% shot-to-shot jitter in the angle, proportional to
the angle itself, washes out the contrast more the larger the rotation,
so the deviation at pi clearly exceeds the one at pi/4.
"""
import numpy as np

from qflucts import NoiseConfig, rotation_fidelity_curve

angles = np.linspace(0, 2 * np.pi, 13)
ideal_shots, ideal = rotation_fidelity_curve(angles, shots=8192, seed=0)
noisy, _ = rotation_fidelity_curve(angles, NoiseConfig(over_rotation=0.02, rotation_jitter=0.1))
print(f"{'alpha/pi':>8} {'cos':>7} {'sampled':>8} {'noisy':>7}")
for a, c, s, n in zip(angles, ideal, ideal_shots, noisy):
    print(f"{a / np.pi:8.3f} {c:7.3f} {s:8.3f} {n:7.3f}")
