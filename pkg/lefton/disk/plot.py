# -*- coding: utf-8 -*-
"""
Render series as deterministic SVG line plots.
Example usage:
>>> plot = PlotManager()
>>> plot.save(Path("./invariants.svg"), times, {"E": E, "F2": F2}, xlabel="t", ylabel="value")
"""
import logging

import matplotlib

matplotlib.use("Agg")  # non-interactive backend, set before importing pyplot
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())


class PlotManager:
    def __init__(self, salt: str = "lefton") -> None:
        """
        Fix the SVG id salt so identical data give identical files.

        Args:
            salt (str, optional): Value of 'svg.hashsalt'. Defaults to "lefton".
        """
        self.salt = salt
        return None

    def save(
        self,
        obj,
        x,
        series: dict,
        xlabel: str = "",
        ylabel: str = "",
        title: str = "",
        logy: bool = False,
    ) -> None:
        """
        Save one line per series entry as SVG.

        If failed, raise.

        Args:
            obj (obj): Path-like object.
            x (array-like): Shared abscissa.
            series (dict): Label -> values.
            xlabel (str, optional): Abscissa label. Defaults to "".
            ylabel (str, optional): Ordinate label. Defaults to "".
            title (str, optional): Title. Defaults to "".
            logy (bool, optional): Logarithmic ordinate (non-positive values are dropped). Defaults to False.
        """
        x = np.asarray(x, dtype=np.float64)
        with plt.rc_context({"svg.hashsalt": self.salt, "svg.fonttype": "none"}):
            fig, ax = plt.subplots(figsize=(7, 4))
            try:
                for label in sorted(series):
                    y = np.asarray(series[label], dtype=np.float64)
                    if logy:
                        y = np.where(y > 0, y, np.nan)
                    ax.plot(x, y, label=label, linewidth=1.2)
                if logy:
                    ax.set_yscale("log")
                ax.set_xlabel(xlabel)
                ax.set_ylabel(ylabel)
                ax.set_title(title)
                ax.grid(True, alpha=0.3)
                if series:
                    ax.legend(loc="best", fontsize="small")
                fig.tight_layout()
                fig.savefig(obj, format="svg", metadata={"Date": None})
            except Exception as e:
                logging.error(f"failed to save plot '{obj}' ({e})")
                raise
            finally:
                plt.close(fig)
        logging.debug(f"ok: saved plot '{obj}'")
        return None
