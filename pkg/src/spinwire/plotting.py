"""Optional matplotlib rendering for CLI report paths.

Everything here draws to files via the Agg backend; no interactive
windows are ever opened.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_series_plot(series, path):
    """Render a transfer time series (fidelity, fluxes, bound residual)."""
    cols = series.columns()
    t = cols["time"]
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 8.0), sharex=True)
    axes[0].plot(t, cols["fidelity"], color="tab:blue")
    axes[0].set_ylabel("receiver fidelity")
    axes[1].plot(t, cols["info_flux"], color="tab:green", label="info flux")
    axes[1].plot(t, cols["energy_flux"], color="tab:orange", label="energy flux")
    axes[1].set_ylabel("flux")
    axes[1].legend(loc="best", frameon=False)
    axes[2].plot(t, cols["bound_residual"], color="tab:red")
    axes[2].axhline(0.0, color="black", lw=0.6)
    axes[2].set_ylabel("bound residual")
    axes[2].set_xlabel("time [1/J]")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_profile_plot(profiles, path):
    """Render one or more spatial OTOC profiles on shared axes."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for profile in profiles:
        ax.plot(profile.sites, profile.values, marker="o", ms=3,
                label=f"t = {profile.t:g}")
    ax.set_xlabel("probe site")
    ax.set_ylabel("squared commutator")
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_scan_plot(curve, path):
    """Render boost ratios against the correlation grid of a scan."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(curve.alphas, curve.flux_ratio, marker="o", ms=3,
            label="peak info-flux ratio")
    ax.plot(curve.alphas, curve.time_ratio, marker="s", ms=3,
            label="transfer-time ratio")
    ax.axhline(1.0, color="black", lw=0.6)
    ax.set_xlabel("correlation amplitude")
    ax.set_ylabel("ratio to uncorrelated")
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
