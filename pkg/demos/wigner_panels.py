"""Wigner functions of twisted and measured states, N = 20.

Top row: twisting at chi = 0, 0.1, 0.26. Bottom row: measurement at
chi = 0, 0.06, 0.5 with detector reading h = 7. Writes wigner_panels.png.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from spinsqueeze import MeasConfig, OATConfig, SphereGrid, coherent_state, kraus_apply, oat_apply, wigner_function

n = 20
grid = SphereGrid.uniform(91, 180)
start = coherent_state(n)
states = [[start, oat_apply(start, OATConfig(0.1)), oat_apply(start, OATConfig(0.26))],
          [start] + [kraus_apply(start, MeasConfig(c), 7.0).post_state for c in (0.06, 0.5)]]
titles = [["chi_int=0", "chi_int=0.1", "chi_int=0.26"], ["chi_meas=0", "chi_meas=0.06", "chi_meas=0.5"]]

fig, axes = plt.subplots(2, 3, figsize=(9, 5), sharex=True, sharey=True)
theta, phi = grid.mesh()
for row in range(2):
    for col in range(3):
        ax = axes[row, col]
        ax.pcolormesh(phi, theta, wigner_function(states[row][col], grid), shading="auto", cmap="RdBu_r")
        ax.set_title(titles[row][col], fontsize=9)
fig.supxlabel("phi")
fig.supylabel("theta")
fig.tight_layout()
fig.savefig("wigner_panels.png", dpi=150)
