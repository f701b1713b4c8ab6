"""Plot emission: field profiles, diagnostic series and the expansion map."""

from __future__ import annotations

import os

import numpy as np

__all__ = ["expansion_map", "emit_plots"]


def expansion_map(sol) -> dict:
    """(u, v) arrays of the outgoing expansion and the trapped-region mask."""
    u = sol.u_levels
    v = sol.cones[0].v
    exp_out = np.stack([c.trchi / c.Omega for c in sol.cones])
    exp_in = np.stack([c.trchib * c.Omega for c in sol.cones])
    return {"u": u, "v": v, "exp_out": exp_out, "exp_in": exp_in,
            "trapped": (exp_out < 0) & (exp_in < 0)}


def emit_plots(sol, out_dir: str, which: tuple[str, ...] = ("profiles", "series", "map")) -> list[str]:
    """Write the selected figures as PNGs; returns the paths written."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    written = []

    if "profiles" in which:
        fig, axes = plt.subplots(2, 2, figsize=(9, 6), constrained_layout=True)
        picks = [0, len(sol.cones) // 2, len(sol.cones) - 1]
        for idx in picks:
            cone = sol.cones[idx]
            axes[0, 0].plot(cone.v, np.abs(cone.psi), label=f"u={cone.u:.4g}")
            axes[0, 1].plot(cone.v, cone.trchi / cone.Omega)
            axes[1, 0].plot(cone.v, cone.r ** 2 * cone.rhoF)
            axes[1, 1].plot(cone.v, 0.5 * cone.r * (1 + 0.25 * cone.r ** 2
                                                    * cone.trchi * cone.trchib))
        axes[0, 0].set_ylabel("|psi|")
        axes[0, 1].set_ylabel("outgoing expansion")
        axes[1, 0].set_ylabel("charge Q")
        axes[1, 1].set_ylabel("mass m")
        for ax in axes.flat:
            ax.set_xlabel("v")
        axes[0, 0].legend(fontsize=8)
        path = os.path.join(out_dir, "profiles.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    if "series" in which:
        fig, axes = plt.subplots(1, 3, figsize=(11, 3.2), constrained_layout=True)
        d = sol.diagnostics
        axes[0].plot(np.abs(d["u"]), d["Q_end"])
        axes[0].set_ylabel("Q(u, v_end)")
        axes[1].plot(np.abs(d["u"]), d["m_end"])
        axes[1].set_ylabel("m(u, v_end)")
        axes[2].plot(np.abs(d["u"]), d["min_exp_out"], label="min out")
        axes[2].plot(np.abs(d["u"]), d["min_exp_in"], label="min in")
        axes[2].axhline(0.0, color="k", lw=0.5)
        axes[2].set_ylabel("expansions")
        axes[2].legend(fontsize=8)
        for ax in axes:
            ax.set_xlabel("|u|")
            ax.set_xscale("log")
        path = os.path.join(out_dir, "series.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    if "map" in which:
        data = expansion_map(sol)
        fig, ax = plt.subplots(figsize=(6, 4.5), constrained_layout=True)
        extent = [data["v"][0], data["v"][-1], data["u"][0], data["u"][-1]]
        span = float(np.max(np.abs(data["exp_out"])))
        im = ax.imshow(data["exp_out"], origin="lower", aspect="auto",
                       extent=extent, cmap="RdBu", vmin=-span, vmax=span)
        if np.any(data["trapped"]):
            ax.contourf(data["v"], data["u"], data["trapped"].astype(float),
                        levels=[0.5, 1.5], colors="k", alpha=0.25)
        fig.colorbar(im, ax=ax, label="outgoing expansion")
        ax.set_xlabel("v")
        ax.set_ylabel("u")
        path = os.path.join(out_dir, "expansion_map.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    return written
