#!/usr/bin/env python3
"""Plot the columns of a starflow trace.csv.

Usage: python3 docs/plot_trace.py out/trace.csv
"""
import sys

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else "out/trace.csv"
data = np.genfromtxt(path, delimiter=",", names=True)

fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
t = data["t"]

ax = axes[0][0]
ax.semilogy(t, data["area"], label="area")
ax.semilogy(t, data["area"][0] * np.exp(t), "k--", lw=0.8, label="A(0) e^t")
ax.set_ylabel("area")
ax.legend()

ax = axes[0][1]
ax.plot(t, data["m_h"], label="m_h")
ax.plot(t, data["m_h_star"], label="m_h*")
ax.set_ylabel("Hawking mass")
ax.legend()

ax = axes[1][0]
ax.plot(t, data["iso_ratio"])
ax.axhline((36 * np.pi) ** (1 / 3), color="k", ls="--", lw=0.8)
ax.set_ylabel("A / V^{2/3}")
ax.set_xlabel("t")

ax = axes[1][1]
ax.plot(t, data["h_min"], label="min H")
ax.plot(t, data["bnorm_sqrtA"], label="max |B| sqrt(A)")
ax.plot(t, data["star_margin"], label="star margin")
ax.set_xlabel("t")
ax.legend()

fig.tight_layout()
out = path.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(f"wrote {out}")
