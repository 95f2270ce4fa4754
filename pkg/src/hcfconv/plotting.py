"""Matplotlib rendering of CLI results to SVG files.

Figures are a display convenience next to the delimited data files, never
a data contract: every number in a plot is also in the corresponding
table. The Agg backend keeps rendering headless.
"""

from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    import matplotlib.pyplot as plt

    plt.close(fig)


def plot_sweep(result, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(result.pressures, result.efficiency, lw=1.0, color="tab:blue")
    ax.set_xlabel("pressure (bar)")
    ax.set_ylabel("relative conversion efficiency")
    title = "pressure sweep"
    if result.gradient_out_ratio is not None:
        title += f" (linear gradient, outlet/inlet = {result.gradient_out_ratio:g})"
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_dispersion(wavelengths_nm, n_eff, loss_db_m, resonances_nm, path):
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 5.5))
    ax1.plot(wavelengths_nm, n_eff, lw=1.0, color="tab:blue")
    ax1.set_ylabel("effective index")
    ax2.plot(wavelengths_nm, loss_db_m, lw=1.0, color="tab:red")
    ax2.set_yscale("log")
    ax2.set_ylabel("leakage loss (dB/m)")
    ax2.set_xlabel("wavelength (nm)")
    for lam in resonances_nm:
        if wavelengths_nm[0] <= lam <= wavelengths_nm[-1]:
            for ax in (ax1, ax2):
                ax.axvline(lam, color="gray", ls="--", lw=0.8)
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_linescan(scan, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(scan.detunings / 1e6, scan.conversion, lw=1.0, color="tab:blue")
    ax.set_xlabel("two-photon detuning (MHz)")
    ax.set_ylabel("relative conversion")
    ax.set_title(f"line scan at {scan.pressure:g} bar")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_projection_fit(dataset, fit, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.2))
    theta = np.linspace(0, 360, 721)
    x = np.radians(theta) * 2 * fit.harmonic
    for name, sfit, color in (("V", fit.v, "black"), ("H", fit.h, "tab:red")):
        ax.plot(
            dataset.angles_deg, dataset.rates(name), "o", ms=4, color=color, label=f"{name} data"
        )
        ax.plot(
            theta,
            sfit.offset + sfit.amplitude * np.sin(x + sfit.phase),
            "-",
            lw=1.0,
            color=color,
            label=f"{name} fit",
        )
    ax.set_xlabel("control angle (deg)")
    ax.set_ylabel("rate (counts/s)")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_scale_fit(fit, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(fit.pressures, fit.corrected_rates, "ko", ms=4, label="corrected data")
    ax.plot(fit.pressures, fit.model_rates, "b-", lw=1.0, label="scaled model")
    ax.axvline(fit.p_max_fit, color="gray", ls="--", lw=0.8, label="fit limit")
    ax.set_xlabel("pressure (bar)")
    ax.set_ylabel("rate (counts/s)")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    _save(fig, path)
