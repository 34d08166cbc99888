"""Figure rendering for the command-line reports.

Every renderer writes an SVG next to the delimited output.  The SVG hash
salt is pinned and the date metadata stripped so reruns of the same
configuration produce identical bytes.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "feslab"

_SVG_META = {"Date": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def render_building_day(log, comfort, path):
    """Room temperatures over one run with the comfort band shaded.

    Plots the five room traces, the ambient measurement as a dashed
    reference, and the admissible band as a horizontal span.
    """
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.axhspan(comfort[0], comfort[1], color="tab:green", alpha=0.12, lw=0)
    ax.axhline(comfort[0], color="tab:green", lw=0.8)
    ax.axhline(comfort[1], color="tab:green", lw=0.8)
    rooms = log.y[:, :5]
    for i in range(rooms.shape[1]):
        ax.plot(log.t, rooms[:, i], lw=1.2, label=f"room {i + 1}")
    ax.plot(log.t, log.y[:, 5], color="gray", ls="--", lw=1.0, label="ambient")
    ax.set_xlabel("time [h]")
    ax.set_ylabel("temperature [C]")
    ax.legend(loc="lower right", ncols=3, fontsize=8)
    ax.set_title("room temperatures and comfort band")
    fig.tight_layout()
    return _save(fig, path)


def render_robot_plane(log, targets, path, equilibrium=None):
    """Agent paths in the plane with signal sources and the equilibrium."""
    n = len(targets)
    pos = log.x.reshape(log.samples, n, 3)[:, :, :2]
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    for i in range(n):
        (line,) = ax.plot(pos[:, i, 0], pos[:, i, 1], lw=1.0, label=f"agent {i + 1}")
        ax.plot(pos[0, i, 0], pos[0, i, 1], "o", ms=4, color=line.get_color())
        ax.plot(targets[i][0], targets[i][1], "x", ms=8, color=line.get_color())
    if equilibrium is not None:
        eq = np.asarray(equilibrium, float).reshape(n, 2)
        ax.plot(eq[:, 0], eq[:, 1], "k*", ms=9, ls="none", label="equilibrium")
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    ax.set_aspect("equal")
    ax.legend(fontsize=8)
    ax.set_title("agent trajectories, sources (x), equilibrium (*)")
    fig.tight_layout()
    return _save(fig, path)


def render_error_series(log, path):
    """Distance to the tracked equilibrium and the applied inputs over time."""
    fig, (top, bot) = plt.subplots(2, 1, figsize=(8.0, 5.5), sharex=True)
    if log.du_norm is not None and np.any(log.du_norm > 0):
        top.semilogy(log.t, np.maximum(log.du_norm, 1e-300), lw=1.2,
                     label="input error")
    if log.dy_norm is not None and np.all(np.isfinite(log.dy_norm)):
        top.semilogy(log.t, np.maximum(log.dy_norm, 1e-300), lw=1.0,
                     label="output error")
    if log.envelope is not None and np.all(np.isfinite(log.envelope)):
        top.semilogy(log.t, np.maximum(log.envelope, 1e-300), "k--", lw=1.0,
                     label="certified envelope")
    top.set_ylabel("error")
    top.legend(fontsize=8)
    top.set_title("tracking errors and inputs")
    for j in range(log.u.shape[1]):
        bot.plot(log.t, log.u[:, j], lw=0.9, label=f"u{j + 1}")
    bot.set_xlabel("time")
    bot.set_ylabel("input")
    if log.u.shape[1] <= 8:
        bot.legend(fontsize=7, ncols=4)
    fig.tight_layout()
    return _save(fig, path)


def render_sweep_heatmap(taus, epss, rho, certified, path, diverged=None):
    """Heatmap of the contraction factor with the certified region outlined.

    ``rho`` and ``certified`` are (len(epss), len(taus)) grids.  Points that
    were simulated and found empirically unstable are overlaid as crosses.
    """
    taus = np.asarray(taus, float)
    epss = np.asarray(epss, float)
    rho = np.asarray(rho, float)
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    # cap the color range so unstable corners do not wash out the contrast
    # around the certification boundary at rho = 1
    mesh = ax.pcolormesh(taus, epss, np.minimum(rho, 2.0), cmap="viridis",
                         shading="nearest", vmin=0.0, vmax=2.0)
    fig.colorbar(mesh, ax=ax, label="spectral radius (capped at 2)")
    cert = np.asarray(certified, float)
    if cert.min() != cert.max():
        ax.contour(taus, epss, cert, levels=[0.5], colors="w", linewidths=1.5)
    if diverged is not None:
        div = np.asarray(diverged, bool)
        ii, jj = np.nonzero(div)
        if ii.size:
            ax.plot(taus[jj], epss[ii], "rx", ms=7, mew=2, ls="none",
                    label="empirically unstable")
            ax.legend(fontsize=8, loc="upper right")
    if taus.max() / max(taus.min(), 1e-300) > 30.0:
        ax.set_xscale("log")
    ax.set_xlabel("sampling period")
    ax.set_ylabel("relaxation gain")
    ax.set_title("certified region (white contour)")
    fig.tight_layout()
    return _save(fig, path)


def render_compare_rooms(logs, labels, comfort, path):
    """Min/max room-temperature envelope for several controllers on one axis."""
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.axhspan(comfort[0], comfort[1], color="tab:green", alpha=0.12, lw=0)
    ax.axhline(comfort[0], color="tab:green", lw=0.8)
    ax.axhline(comfort[1], color="tab:green", lw=0.8)
    for log, label in zip(logs, labels):
        rooms = log.y[:, :5]
        (line,) = ax.plot(log.t, rooms.mean(axis=1), lw=1.3, label=label)
        ax.fill_between(log.t, rooms.min(axis=1), rooms.max(axis=1),
                        color=line.get_color(), alpha=0.18, lw=0)
    ax.set_xlabel("time [h]")
    ax.set_ylabel("temperature [C]")
    ax.legend(loc="lower right", fontsize=8)
    ax.set_title("room-temperature envelope by controller")
    fig.tight_layout()
    return _save(fig, path)
