# Same initial state |g,0,2> under the three descriptions: full four-level
# atom, two-photon two-level atom, and the atom-free mode-mode Hamiltonian.

import numpy as np

from twocavity import runner
from twocavity.model import t0

T0 = t0(runner.builtin_scenario("fig2").params)
results = {}
for level in ("full", "two_photon", "effective"):
    config = runner.config_from_mapping({"scenario": "fig2", "hamiltonian": level})
    _, records = runner.simulate(config)
    results[level] = records

print("   t    " + "".join(f"{lvl:>14}" for lvl in results))
for k in range(0, 1600, 160):
    t = results["full"][k].t
    print(f"{t:7.1f} " + "".join(f"{results[l][k].pop[(0, 2)]:14.4f}" for l in results))

for level, records in results.items():
    fid = np.array([r.bell_fidelity for r in records])
    print(f"{level:>10}: first fidelity peak at t={records[fid.argmax()].t:.1f} (T0={T0:.1f})")
