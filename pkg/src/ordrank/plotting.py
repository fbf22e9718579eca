"""Matplotlib figures for benchmark reports and training logs."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import reference  # noqa: E402

COLORS = {"rank": "#1f77b4", "class": "#d62728"}
LABELS = {"rank": "NNRank", "class": "NNClass"}


def pretty_rc():
    plt.rcParams.update(
        {
            "font.size": 10,
            "axes.labelsize": 10,
            "axes.titlesize": 11,
            "legend.fontsize": 8,
            "xtick.labelsize": 8,
            "ytick.labelsize": 8,
            "axes.spines.top": False,
            "axes.spines.right": False,
            "savefig.dpi": 120,
        }
    )


def plot_benchmark(reports, path):
    """Grouped bars (mean with sample std) per dataset, one panel per metric.

    Published values are overlaid as black ticks where the dataset is known.
    """
    pretty_rc()
    names = sorted({n for n, _ in reports}, key=lambda n: (reference.DATASETS + (n,)).index(n))
    methods = [m for m in ("rank", "class") if any(k[1] == m for k in reports)]
    fig, axes = plt.subplots(1, 2, figsize=(max(6, 1.4 * len(names) + 3), 3.4))
    x = np.arange(len(names))
    width = 0.8 / max(len(methods), 1)
    for ax, metric, col, title in (
        (axes[0], "zero_one", 0, "zero-one error"),
        (axes[1], "mae", 2, "mean absolute error"),
    ):
        for j, m in enumerate(methods):
            means, stds, published = [], [], []
            for n in names:
                rep = reports.get((n, m))
                ok = rep is not None and rep.error is None and rep.trials > 0
                means.append(getattr(rep, f"{metric}_mean") if ok else np.nan)
                std = getattr(rep, f"{metric}_std") if ok else np.nan
                stds.append(0.0 if not np.isfinite(std) else std)
                ref = reference.NN_TABLE[m].get(n)
                published.append(ref[col] if ref else np.nan)
            xs = x + (j - (len(methods) - 1) / 2) * width
            ax.bar(xs, means, width, yerr=stds, color=COLORS[m], alpha=0.8, label=LABELS[m], capsize=2)
            ax.plot(xs, published, "k_", markersize=10, mew=2, label=f"{LABELS[m]} (published)" if j == 0 else None)
        ax.set_xticks(x)
        ax.set_xticklabels([reference.DISPLAY_NAMES.get(n, n) for n in names], rotation=30, ha="right")
        ax.set_title(title)
    axes[0].legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_training_log(tlog, path):
    """Mean training loss per epoch with the learning rate on a twin axis."""
    pretty_rc()
    fig, ax = plt.subplots(figsize=(5, 3.2))
    epochs = np.arange(1, tlog.epochs + 1)
    ax.plot(epochs, tlog.losses, color="k", lw=1)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean training loss")
    ax2 = ax.twinx()
    ax2.step(epochs, tlog.rates, where="post", color="#1f77b4", lw=1)
    ax2.set_ylabel("learning rate", color="#1f77b4")
    ax2.spines["right"].set_visible(True)
    for e in tlog.halvings:
        ax.axvline(e, color="#1f77b4", lw=0.5, ls=":")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
