"""Render decile winner/loser figures from report series to image files.

The report's figure series is the canonical data product; this module turns
it into the matching charts (shares of winners and losers per decile, and
average gains/losses as a share of each group's baseline income) next to the
delimited output. Rendering is deterministic for fixed inputs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .report import Report  # noqa: E402

GAIN_COLOR = "#2a7f46"
LOSS_COLOR = "#b23b3b"


def render_figures(report: Report, destination) -> list[Path]:
    """Write figure_<scheme>.png under `destination`; returns written paths."""
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)

    rows = [r for r in report.figure_series if r.decile != "all"]
    deciles = [int(r.decile) for r in rows]
    winners = [r.winners_pct for r in rows]
    losers = [r.losers_pct for r in rows]
    gains = [r.gain_pct_of_baseline or 0.0 for r in rows]
    losses = [-(r.loss_pct_of_baseline or 0.0) for r in rows]

    fig, (ax_share, ax_change) = plt.subplots(2, 1, figsize=(7.5, 7.0), sharex=True)
    width = 0.4
    x = range(1, len(deciles) + 1)
    ax_share.bar([d - width / 2 for d in x], winners, width, color=GAIN_COLOR, label="winners")
    ax_share.bar([d + width / 2 for d in x], losers, width, color=LOSS_COLOR, label="losers")
    ax_share.set_ylabel("share of individuals (%)")
    ax_share.set_ylim(0, 105)
    ax_share.legend(frameon=False)
    ax_share.set_title(f"Winners and losers by baseline income decile ({report.scheme_name})")

    ax_change.bar([d - width / 2 for d in x], gains, width, color=GAIN_COLOR, label="avg gain")
    ax_change.bar([d + width / 2 for d in x], losses, width, color=LOSS_COLOR, label="avg loss")
    ax_change.axhline(0.0, color="black", linewidth=0.8)
    ax_change.set_ylabel("change vs baseline income (%)")
    ax_change.set_xlabel("decile of baseline per-capita disposable income")
    ax_change.set_xticks(list(x))
    ax_change.legend(frameon=False)

    fig.tight_layout()
    path = dest / f"figure_{report.scheme_name}.png"
    fig.savefig(path, dpi=150, metadata={"Software": "ubisim"})
    plt.close(fig)
    return [path]
