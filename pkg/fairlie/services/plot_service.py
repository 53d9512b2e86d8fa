import logging
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger(__name__)

DPI = 150


class PlotService:
    """PNG figures drawn from the same frames the CSV reports carry."""

    def _save(self, fig, path: str) -> str:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        try:
            fig.savefig(path, dpi=DPI, bbox_inches="tight")
        finally:
            plt.close(fig)
        logger.info(f"[Plot] Wrote {path}")
        return path

    def sweep(self, frame: pd.DataFrame, path: str, title: str = "") -> str:
        """Profit per lying level, one line per strategy."""
        fig, ax = plt.subplots(figsize=(8, 5))
        for strategy, group in frame.groupby("strategy", sort=True):
            ax.plot(group["level"], group["profit"], label=f"strategy {strategy}")
        ax.axhline(0.0, color="black", linewidth=0.8)
        ax.set_xlabel("lying level")
        ax.set_ylabel("profit")
        ax.set_title(title or "strategy sweep")
        ax.legend(fontsize="small", ncol=2)
        return self._save(fig, path)

    def robustness(self, curve: pd.DataFrame, path: str, title: str = "") -> str:
        fig, ax = plt.subplots(figsize=(8, 5))
        ax.plot(curve["sigma"], curve["mean_lying_utility"], marker="o", label="lying")
        ax.plot(curve["sigma"], curve["mean_truthful_utility"], marker="s", label="truthful")
        ax.set_xlabel("sigma")
        ax.set_ylabel("mean true utility")
        ax.set_title(title or "robustness")
        ax.legend()
        return self._save(fig, path)


plot_service = PlotService()
