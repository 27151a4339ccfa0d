"""Deterministic SVG figures (fixed hash salt, no timestamp metadata)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {"svg.hashsalt": "cmm", "svg.fonttype": "none", "font.size": 9}


def _save(fig, path) -> None:
    with matplotlib.rc_context(STYLE):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def spectrum_svg(path, offsets_hz, heights, labels, title: str) -> None:
    with matplotlib.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3))
        x = np.asarray(offsets_hz) / 1e9
        ax.stem(x, heights, basefmt=" ")
        for xi, h, lab in zip(x, heights, labels):
            ax.annotate(lab, (xi, h), textcoords="offset points", xytext=(0, 3), ha="center", fontsize=5, rotation=90)
        ax.set_xlabel("offset within one FSR (GHz)")
        ax.set_ylabel("normalized peak cooperativity")
        ax.set_ylim(0, max(1.25 * max(heights, default=1.0), 0.1))
        ax.set_title(title)
        fig.tight_layout()
    _save(fig, path)


def coopmap_svg(path, positions, eta, title: str) -> None:
    with matplotlib.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        pos = np.asarray(positions)
        transverse = pos[:, 0] if np.ptp(pos[:, 0]) > 0 else pos[:, 1]
        sc = ax.scatter(pos[:, 2] * 1e6, transverse * 1e6, c=eta, s=4, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="cooperativity")
        ax.set_xlabel("z (um)")
        ax.set_ylabel("x (um)")
        ax.set_title(title)
        fig.tight_layout()
    _save(fig, path)


def scaling_svg(path, points) -> None:
    with matplotlib.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        variants = sorted({p.variant for p in points})
        for v in variants:
            pts = [p for p in points if p.variant == v]
            n = [p.n_atoms for p in pts]
            t = [p.mean_time * 1e3 for p in pts]
            if v.endswith("_mc"):
                ax.errorbar(n, t, yerr=[p.std_time * 1e3 for p in pts], fmt="o", ms=3, capsize=2, label=v)
            else:
                ax.plot(n, t, "-", label=v)
        ax.set_yscale("log")
        ax.set_xlabel("number of atoms")
        ax.set_ylabel("readout duration (ms)")
        ax.legend(fontsize=7)
        fig.tight_layout()
    _save(fig, path)


def trajectory_svg(path, trajectories, labels) -> None:
    """Photon flux (top) and drive Rabi frequency (bottom) for each ramp."""
    with matplotlib.rc_context(STYLE):
        fig, (a1, a2) = plt.subplots(2, 1, figsize=(5, 4.5), sharex=True)
        for tr, lab in zip(trajectories, labels):
            a1.plot(tr.times * 1e6, tr.photon_flux / 1e6, label=f"{lab} (P={tr.emission:.3f})")
            a2.plot(tr.times * 1e6, tr.drive / (2 * np.pi * 1e6), label=lab)
        a1.set_ylabel("flux (1/us)")
        a2.set_ylabel("drive / 2pi (MHz)")
        a2.set_xlabel("time (us)")
        a1.legend(fontsize=7)
        fig.tight_layout()
    _save(fig, path)
