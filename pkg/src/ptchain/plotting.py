"""Figure rendering for the CLI report paths.

Each data command can drop a PNG next to its delimited output; the figures
are working plots (coupling sweeps of the spectrum, transport coefficients,
special-state counts, trajectory densities), not publication styling.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_spectrum_figure(path, etas, energies_per_eta, title=""):
    """Re and Im of all eigenvalues against the coupling."""
    fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(9, 3.6), sharex=True)
    for E in np.array(energies_per_eta).T:
        ax_re.plot(etas, E.real, lw=0.8, color="tab:blue")
        ax_im.plot(etas, E.imag, lw=0.8, color="tab:red")
    ax_re.set_xlabel(r"$\eta$")
    ax_re.set_ylabel(r"Re $E$")
    ax_im.set_xlabel(r"$\eta$")
    ax_im.set_ylabel(r"Im $E$")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_transport_figure(path, etas, xi_per_eta, title=""):
    """Transport coefficients against the coupling, log scale."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    for xi in np.array(xi_per_eta, dtype=float).T:
        ax.plot(etas, xi, lw=0.8)
    ax.set_yscale("log")
    ax.set_xlabel(r"$\eta$")
    ax.set_ylabel(r"$\xi$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_classification_figure(path, ks, n_opaque, n_transparent, title=""):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(ks, n_opaque, "o-", label="opaque", ms=4)
    ax.plot(ks, n_transparent, "s-", label="transparent", ms=4)
    ax.set_xlabel("k")
    ax.set_ylabel("count")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_ep_figure(path, records, title=""):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    if records:
        etas = [r.eta_c for r in records]
        thetas = [r.theta_c.real for r in records]
        ax.plot(etas, thetas, "x", ms=8, color="tab:purple")
    ax.set_xlabel(r"$\eta_c$")
    ax.set_ylabel(r"Re $\theta_c$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trajectory_figure(path, times, densities, title=""):
    """Site density heat map over time plus the total norm history."""
    fig, (ax_rho, ax_norm) = plt.subplots(
        2, 1, figsize=(6.0, 5.0), sharex=True,
        gridspec_kw={"height_ratios": [3, 1]})
    rho = np.asarray(densities)
    im = ax_rho.imshow(rho.T, origin="lower", aspect="auto",
                       extent=[times[0], times[-1], 1, rho.shape[1]],
                       cmap="magma")
    fig.colorbar(im, ax=ax_rho, label=r"$|c_n|^2$")
    ax_rho.set_ylabel("site")
    ax_norm.plot(times, rho.sum(axis=1), lw=1.0, color="tab:green")
    ax_norm.set_xlabel("t")
    ax_norm.set_ylabel(r"$\Vert c \Vert^2$")
    if title:
        ax_rho.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
