"""Plot snzcal landscape/calibrate output: phase and leakage maps with the 180 deg contour.

usage: python3 scripts/plot_landscape.py OUT_DIR
"""
import sys

import matplotlib.pyplot as plt
import matplotlib.tri as mtri
import numpy as np


def load(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def main(out):
    ph = load(f"{out}/phase.csv")
    lk = load(f"{out}/leakage.csv")
    ct = load(f"{out}/contour.csv")
    x, y = ph.dtype.names[:2]
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    tri = mtri.Triangulation(ph[x], ph[y])
    im = axes[0].tripcolor(tri, np.degrees(np.mod(ph[ph.dtype.names[2]], 2 * np.pi)), cmap="twilight")
    fig.colorbar(im, ax=axes[0], label="phi2q (deg)")
    im = axes[1].tripcolor(mtri.Triangulation(lk[x], lk[y]), np.log10(np.maximum(lk[lk.dtype.names[2]], 1e-8)))
    fig.colorbar(im, ax=axes[1], label="log10 L1")
    for ax in axes:
        for line in np.unique(ct["polyline"]):
            sel = ct["polyline"] == line
            ax.plot(ct["x"][sel], ct["y"][sel], "k-", lw=1)
        ax.set_xlabel(x)
    axes[0].set_ylabel(y)
    fig.tight_layout()
    fig.savefig(f"{out}/landscape.png", dpi=150)


if __name__ == "__main__":
    main(sys.argv[1])
