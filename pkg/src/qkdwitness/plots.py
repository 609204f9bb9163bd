"""Figure rendering for scan reports.

Kept separate so the CLI only pays the matplotlib import when a figure
is actually requested.  The CSV stays the machine-readable contract;
the figure is a human-readable companion written next to it.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_sweep_figure(rows, path) -> None:
    """Render the rotation sweep: error rates on top, certificates below."""
    theta = np.array([r["theta"] for r in rows])
    qber4 = np.array([r["qber_4state"] for r in rows])
    qber6 = np.array([r["qber_6state"] for r in rows])
    value4 = np.array([r["witness_value_4state"] for r in rows])
    min_pt = np.array([r["min_pt_eigenvalue_6state"] for r in rows])

    fig, (ax_err, ax_wit) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)

    ax_err.plot(theta, qber4, label="QBER, 4-state", color="tab:blue")
    ax_err.plot(theta, qber6, label="QBER, 6-state", color="tab:green")
    ax_err.axhline(0.25, color="tab:blue", ls="--", lw=1, label="intercept-resend bound, 4-state")
    ax_err.axhline(1 / 3, color="tab:green", ls="--", lw=1, label="intercept-resend bound, 6-state")
    ax_err.set_ylabel("sifted-key error rate")
    ax_err.legend(fontsize=8, loc="upper left")
    ax_err.grid(True, alpha=0.4)

    ax_wit.plot(theta, value4, label="witness value, 4-state", color="tab:red")
    ax_wit.plot(theta, min_pt, label="min PT eigenvalue, 6-state", color="tab:purple")
    ax_wit.axhline(0.0, color="black", lw=1)
    ax_wit.set_xlabel("rotation angle (rad)")
    ax_wit.set_ylabel("entanglement certificate")
    ax_wit.legend(fontsize=8, loc="upper left")
    ax_wit.grid(True, alpha=0.4)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
