# Starting from |4,0>, the effective Hamiltonian mixes |4,0>, |2,2>, |0,4>.
# The 3x3 problem has a closed form (spectrum 0, 12, 16 in units of lam^2/delta);
# compare it to the full four-level atom simulation.

import numpy as np

from twocavity import runner
from twocavity.model import t0
from twocavity.oracle import schmidt_entropy, three_level

config = runner.builtin_scenario("fig3")
T0 = t0(config.params)
times = np.linspace(0, 2 * T0, 9)
closed = three_level(config.params, times).populations()

full_cfg = runner.config_from_mapping({"scenario": "fig3", "t_end": str(2 * T0), "n_points": "9"})
_, records = runner.simulate(full_cfg)

print("   t     |  closed form P40 P22 P04   |  full model P40 P22 P04")
for t, p, r in zip(times, closed, records):
    print(f"{t:8.1f} | {p[0]:.3f} {p[1]:.3f} {p[2]:.3f}          |"
          f" {r.pop[(4, 0)]:.3f} {r.pop[(2, 2)]:.3f} {r.pop[(0, 4)]:.3f}")

# At T0 the closed form is exactly (|4,0> + e^{i phi}|0,4>)/sqrt(2)
p = three_level(config.params, [T0]).populations()[0]
print(f"closed-form entropy at T0: {schmidt_entropy(p):.6f} bits")
