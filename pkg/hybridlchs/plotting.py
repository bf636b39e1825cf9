import logging

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger(__name__)

PARAM_LABELS = {"r": r"$r$", "r_prime": r"$r^\prime$", "beta": r"$\beta$", "n_trunc": r"$N$"}


def plot_sweep_marginals(marginals: pd.DataFrame, outpath: str, title: str = ""):
    """
    One panel per swept parameter: best infidelity with that parameter held fixed.

    Args
        marginals [DataFrame]: output of cli.sweep_marginals (parameter, value, best_infidelity, ...)
        outpath [str]: file to save the figure to (format from the suffix)
        title [str]: figure title
    """
    params = [p for p in PARAM_LABELS if p in set(marginals["parameter"])]
    if not params:
        logger.warning("no sweep marginals to plot")
        return None
    fig, axes = plt.subplots(1, len(params), figsize=(4 * len(params), 4), sharey=True, squeeze=False)
    for ax, name in zip(axes[0], params):
        df = marginals[marginals["parameter"] == name].sort_values("value")
        ax.semilogy(df["value"], df["best_infidelity"], "o-", color="tab:blue")
        ax.set_xlabel(PARAM_LABELS[name])
        ax.grid(alpha=0.3)
    axes[0][0].set_ylabel(r"best $1-F$")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(outpath, bbox_inches="tight")
    plt.close(fig)
    return outpath


def plot_truncation_curve(curve: pd.DataFrame, outpath: str, label: str = ""):
    """Projection error against the cutoff N on log-log axes, with the fitted slope in the legend."""
    fig, ax = plt.subplots(figsize=(6, 5))
    slope = curve.attrs.get("slope")
    legend = label or "projection error"
    if slope is not None and np.isfinite(slope):
        legend += f" (slope {slope:.2f})"
    ax.loglog(curve["n"], curve["error"], "o-", label=legend)
    ax.set_xlabel(r"$N$")
    ax.set_ylabel(r"$\|\psi - \Pi_N \psi\|$")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.savefig(outpath, bbox_inches="tight")
    plt.close(fig)
    return outpath
