"""Figure rendering for the CLI report path.

Each sweep or demo writes one PNG next to its CSV.  Rendering stays out of
the scenario layer; this module only consumes finished result objects.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_bump_sweep(result, path):
    """Eigenvalue trajectory in the complex plane: exact points, first- and
    second-order curves."""
    rows = [r for r in result.rows if not r.missing]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    first = np.array([r.first for r in rows])
    second = np.array([r.second for r in rows])
    ax.plot(first.real, first.imag, "--", color="tab:orange", lw=1.2,
            label="first order")
    ax.plot(second.real, second.imag, "-", color="tab:blue", lw=1.4,
            label="second order")
    exact = np.array([r.exact for r in rows])
    ax.plot(exact.real, exact.imag, "o", ms=4, mfc="none", color="k",
            label="exact")
    ax.plot([result.omega0.real], [result.omega0.imag], "s", color="tab:red",
            label="unperturbed")
    ax.set_xlabel(r"Re $\omega$")
    ax.set_ylabel(r"Im $\omega$")
    m = result.metadata
    ax.set_title(f"bump sweep: v0={m['v0']}, mu={m['mu']}, w={m['w']}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_mu_scaling(result, path):
    """Remaining error of the order-n partial sums versus mu, log-log."""
    rows = [r for r in result.rows if not r.missing]
    mus = np.array([r.parameter for r in rows])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    styles = {"err0": ("-", "unperturbed"), "err1": ("--", "first order"),
              "err2": ("-.", "second order")}
    for key, (ls, label) in styles.items():
        errs = np.array([getattr(r, key) for r in rows])
        slope = (result.slopes or {}).get(key.replace("err", "order"))
        txt = f"{label}" + (f" (slope {slope:.2f})" if slope is not None else "")
        ax.loglog(mus, errs, ls, marker=".", label=txt)
    ax.set_xlabel(r"$\mu$")
    ax.set_ylabel(r"$|\omega_{exact} - \omega_{approx}|$")
    m = result.metadata
    ax.set_title(f"order scaling at x0={m['x0']}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_pt_demo(result, path):
    """Two panels: |omega1(L) - closed| over the matching-radius sweep, and
    digits lost before/after asymptotic subtraction."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.5, 3.8))
    ls = sorted(result.l_sweep)
    err = [abs(result.l_sweep[l]["omega1"] - result.omega1_closed)
           / abs(result.omega1_closed) for l in ls]
    ax1.semilogy(ls, err, "o-")
    ax1.set_xlabel("matching radius L")
    ax1.set_ylabel(r"relative $|\Delta\omega_1|$")
    ax1.set_title(f"L-independence (j={result.j})")
    ax1.grid(True, alpha=0.3)

    ax2.bar(["raw", "subtracted"],
            [result.digits_lost_raw, result.digits_lost_subtracted],
            color=["tab:red", "tab:green"])
    ax2.set_ylabel("digits lost to cancellation")
    ax2.set_title(f"norm at L={result.l_radius}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
