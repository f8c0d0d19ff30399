# %% Optical nuclear spin polarization and readout at the anti-crossing
#
# At the anti-crossing the mixed electro-nuclear states open a nuclear
# spin-flip channel through the optical cycle. Pumping therefore polarizes
# the nucleus, and the nuclear state modulates the fluorescence because the
# two nuclear manifolds shelve differently. The ten-level rate model here
# predicts the polarization, the readout contrast, their product (the
# signal) and the pumping time needed to reach steady state.

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from st1sim import build_onp_model
from st1sim.onp import G_DN, G_UP, cycle_polarization, predictions, transient

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

model = build_onp_model(population_rate=1 / 170, decay_plus=1 / 200,
                        decay_zero=1 / 2500, decay_minus=1 / 1000,
                        alpha=2 ** -0.5, pump=0.1, radiative=0.1)
print("mixed-state lifetime:", round(model.mixed_lifetime, 1), "ns")

# %% Headline predictions.
res = predictions(model)
print(f"nuclear polarization: {res.polarization * 100:.1f}%")
print(f"readout contrast:     {res.readout_contrast * 100:.1f}%")
print(f"signal contrast:      {res.signal_contrast * 100:.1f}%")
print(f"settling time:        {res.settle_time_ns / 1000:.1f} us")

# %% Polarization builds up essentially within the first pump/decay cycle.
print("per-cycle polarization:", np.round(cycle_polarization(model, n_cycles=5), 4))

# %% Ground-doublet populations over a pump/dark/pump schedule.
times, rows = transient(model, [(30000.0, True), (20000.0, False),
                                (30000.0, True)], n_per_segment=300)
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(times / 1000, rows[:, G_UP], label="ground, m_I = +1/2")
ax.plot(times / 1000, rows[:, G_DN], label="ground, m_I = -1/2")
ax.set_xlabel("time (us)")
ax.set_ylabel("population")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "polarization_buildup.png", dpi=150)
np.savetxt(OUT / "polarization_buildup.csv",
           np.column_stack([times, rows[:, G_UP], rows[:, G_DN]]),
           delimiter=",", header="t_ns,g_up,g_dn", comments="")
print("wrote", OUT / "polarization_buildup.png")
