# %% Hyperfine structure, the level anti-crossing and spin-density analysis
#
# Coupling the triplet to a single spin-1/2 nucleus (axial tensor A_zz,
# A_perp) splits the spin resonances and produces a level anti-crossing
# where the |-1,+1/2> and |0,-1/2> levels meet. The transverse hyperfine
# coupling mixes that pair; the mixing weights feed the nuclear-polarization
# model. The tensor itself decomposes into Fermi-contact and dipolar parts
# that measure the orbital character of the local spin density.

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from st1sim import (HyperfineParams, TripletHamiltonianParams, fermi_dipolar,
                    hyperfine_resonances, lac_center, lac_map,
                    mixing_coefficients, spin_density)
from st1sim.hyperfine import lac_center_basic

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

base = TripletHamiltonianParams(1134.7, 139.0, 2.0)
params = HyperfineParams.axial(base, a_zz=-117.0, a_perp=-94.0)

# %% Level map across the anti-crossing region, branches tracked by
# eigenvector overlap.
fields = np.linspace(1.0, 60.0, 240)
lmap = lac_map(params, fields)
fig, ax = plt.subplots(figsize=(6, 4))
for k in range(6):
    ax.plot(lmap.fields_mt, lmap.energies[:, k])
ax.set_xlabel("B_z (mT)")
ax.set_ylabel("energy (MHz)")
fig.tight_layout()
fig.savefig(OUT / "level_map.png", dpi=150)
np.savetxt(OUT / "level_map.csv",
           np.column_stack([lmap.fields_mt, lmap.energies]), delimiter=",",
           header="Bz_mT,E1,E2,E3,E4,E5,E6", comments="")

center, gap = lac_center(params, 35.0, 50.0)
print(f"main anti-crossing: {center:.2f} mT, gap {gap:.1f} MHz "
      f"(sqrt(2) A_perp = {np.sqrt(2) * 94:.1f} MHz)")
minor_center, minor_gap = lac_center(params, 30.0, 45.0, pair="minor")
print(f"minor anti-crossing: {minor_center:.2f} mT, gap {minor_gap:.1f} MHz")

# %% Mixing weights of the anti-crossing pair in the basic two-level model.
bz_grid = np.linspace(20.0, 70.0, 200)
alphas = np.array([mixing_coefficients(params, bz).alpha for bz in bz_grid])
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(bz_grid, alphas**2, label="alpha^2")
ax.plot(bz_grid, 1 - alphas**2, label="beta^2")
ax.axvline(lac_center_basic(params), ls=":", c="k")
ax.set_xlabel("B_z (mT)")
ax.set_ylabel("mixing weight")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "mixing_weights.png", dpi=150)

# %% Resonance map: frequency and intensity of every visible line vs field.
rows = []
for bz in np.linspace(30.0, 50.0, 81):
    for f, inten in hyperfine_resonances(params.with_field((0, 0, bz)),
                                         (0.0, 3000.0), threshold=1e-3):
        rows.append((bz, f, inten))
rows = np.array(rows)
np.savetxt(OUT / "resonance_map.csv", rows, delimiter=",",
           header="Bz_mT,freq_MHz,intensity", comments="")
fig, ax = plt.subplots(figsize=(6, 4))
sc = ax.scatter(rows[:, 0], rows[:, 1], c=rows[:, 2], s=4, cmap="viridis")
fig.colorbar(sc, label="relative intensity")
ax.set_xlabel("B_z (mT)")
ax.set_ylabel("frequency (MHz)")
fig.tight_layout()
fig.savefig(OUT / "resonance_map.png", dpi=150)

# %% Contact/dipolar decomposition and the orbital picture of the local
# spin density.
f, d = fermi_dipolar(-117.0, -94.0)
res = spin_density(f, d)
print(f"f = {f:.2f} MHz, d = {d:.2f} MHz")
print(f"|c_s|^2 = {res.c_s_sq:.2f}, |c_p|^2 = {res.c_p_sq:.2f}, eta = {res.eta:.2f}")
print("(close to the 0.25/0.75 weights of an ideal sp3 orbital)")
