# -*- coding: utf-8 -*-
"""
Setup App class for importing within the command-line dispatcher.
"""
import logging
import re
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .disk.file import FileManager
from .disk.private._utils import Json, Npy
from .errors import ConfigError, LeftonError, ParameterError
from .numerics.conservation import ALPHA_CEILING
from .numerics.evolution import SimConfig, Trajectory, evolve
from .numerics.experiments import ExperimentReport, experiment_linearized, experiment_regimes, experiment_stability
from .numerics.grid import derivative, make_grid
from .numerics.linops import (
    assemble_H,
    coercivity_estimate,
    generalized_eigen_L,
    relaxed_coercivity,
    spectrum_H,
    verify_operator_identities,
)
from .numerics.modulation import decompose, modulation_series
from .numerics.profiles import LeftonParams, alpha_half_width, lefton_Q

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

# acceptance levels of the spectrum command
LOWEST_TOL: float = 1e-6
KERNEL_TOL: float = 1e-7
OVERLAP_TOL: float = 1e-6
CONTINUUM_TOL: float = 0.02


def _slug(key: str) -> str:
    return re.sub(r"[^A-Za-z0-9.+-]+", "_", key).strip("_")


class App:
    """
    Bind a loaded config and a FileManager to the numerical modules, one method per subcommand.
    Example usage:
    >>> app = App(FileManager(dir_out="./output/verify/"))
    >>> app.run("verify")
    0
    """

    def __init__(self, file_manager: FileManager) -> None:
        """
        Setup the app.

        Args:
            file_manager (FileManager): Output directory and config.
        """
        self.file_manager = file_manager
        self.config: dict = file_manager.config
        self.plots: bool = self.config["plots"]
        # verdict of the last command; None until a command ran
        self.passed: bool | None = None
        # grid and scheme echo for the manifest
        self.echo: dict = {"grid": {}, "scheme": ""}
        return None

    @property
    def params(self) -> LeftonParams:
        return LeftonParams(b=self.config["b"], A=self.config["A"], x_star=self.config["x_star"])

    @property
    def ceiling(self) -> float:
        return self.config.get("alpha_ceiling", ALPHA_CEILING)

    def _sim(self, **overrides) -> SimConfig:
        sim = SimConfig.from_config(self.config, **overrides)
        self.echo = {"grid": sim.grid.describe(), "scheme": sim.echo()["scheme"]}
        return sim

    def _grid(self):
        grid = make_grid(self.config["length"], self.config["count"])
        self.echo = {"grid": grid.describe(), "scheme": self.config["scheme"]}
        return grid

    def _save_series(self, name: str, header: list, rows: list) -> None:
        self.file_manager.save_csv(f"{name}.csv", header, rows)
        if self.plots and rows:
            x = [r[0] for r in rows]
            series = {}
            for j, column in enumerate(header[1:], start=1):
                values = [r[j] for r in rows]
                if all(isinstance(v, (int, float)) for v in values):
                    series[column] = values
            self.file_manager.save_plot(f"{name}.svg", x, series, xlabel=header[0], title=name)
        return None

    def _save_report(self, report: ExperimentReport) -> None:
        for key, (header, rows) in sorted(report.series.items()):
            name = f"{report.name}_{_slug(key)}"
            report.artifacts.append(f"{name}.csv")
            self._save_series(name, header, rows)
        self.file_manager.save_json(f"{report.name}.json", report.to_dict())
        self.passed = report.passed
        return None

    def evolve(self, reverse: bool = False) -> bool:
        """
        Run the configured flow and export the trajectory.

        Writes trajectory.csv (long format), invariants.csv (nonlinear forms), states.npy with
        its states.json sidecar and evolve.json.

        Args:
            reverse (bool, optional): Integrate backward in time. Defaults to False.

        Returns:
            bool: True if succeeded.
        """
        sim = self._sim()
        traj = evolve(sim, reverse=reverse)
        self.file_manager.save_csv("trajectory.csv", ["t", "diagnostic", "value"], traj.diagnostic_rows())
        report = {
            "config": traj.config,
            "snapshots": len(traj.times),
            "final_time": float(traj.times[-1]),
            "warnings": traj.warnings,
        }
        if traj.invariants is not None:
            self._save_series("invariants", traj.invariants.header(), traj.invariants.rows())
            report["max_drift_E"] = float(np.nanmax(traj.invariants.drift_E))
            report["max_drift_F2"] = None
            if np.any(np.isfinite(traj.invariants.F2)):
                report["max_drift_F2"] = float(np.nanmax(traj.invariants.drift_F2))
        p = sim.params
        if sim.form == "momentum" and p.b < -1.0 and sim.initial in ("lefton", "lefton+perturbation"):
            Q = lefton_Q(traj.grid, p)
            report["lefton_deviation"] = float(np.max(np.abs(traj.states[-1] - Q))) / p.peak_Q
        self.file_manager.save_state("states", traj.states, traj.sidecar())
        self.file_manager.save_json("evolve.json", report)
        self.passed = True
        return True

    def spectrum(self) -> bool:
        """
        Assemble H, compare its lowest eigenpairs with the closed forms and estimate coercivity.

        Returns:
            bool: True if succeeded.
        """
        p = self.params
        p.require_lefton()
        grid = self._grid()
        scheme = self.config["scheme"]
        report = spectrum_H(assemble_H(grid, p, scheme), p, self.config["eig_count"])
        half_width = min(self.config["window"], alpha_half_width(p, self.ceiling))
        both = coercivity_estimate(grid, p, half_width, scheme, "both")
        kernel_only = coercivity_estimate(grid, p, half_width, scheme, "kernel")
        relaxed = relaxed_coercivity(grid, p, self.config["theta"], half_width, scheme)
        general = generalized_eigen_L(grid, p, half_width, scheme)
        criteria = {
            "lowest": report.lowest_error <= LOWEST_TOL,
            "kernel": abs(report.kernel) <= KERNEL_TOL,
            "kernel_overlap": report.overlap_kernel >= 1.0 - OVERLAP_TOL,
            "continuum_edge": bool(
                np.isfinite(report.continuum_edge)
                and abs(report.continuum_edge - report.continuum_expected) <= CONTINUUM_TOL * report.continuum_expected
            ),
            "coercivity": both > 0.0,
            "coercivity_needs_SQ": kernel_only < 0.0,
        }
        for name, ok in criteria.items():
            if not ok:
                logging.warning(f"spectrum criterion '{name}' failed")
        self.passed = all(criteria.values())
        self.file_manager.save_csv(
            "eigenvalues.csv",
            ["index", "eigenvalue", "discrete", "residual"],
            [[i, v, d, r] for i, (v, d, r) in enumerate(zip(report.eigenvalues, report.discrete, report.residuals))],
        )
        self.file_manager.save_json(
            "spectrum.json",
            {
                "params": p.describe(),
                "eigen": report.to_dict(),
                "coercivity": {
                    "window": half_width,
                    "constrained": both,
                    "kernel_only": kernel_only,
                    "relaxed": asdict(relaxed),
                    "relaxed_passed": relaxed.passed,
                },
                "generalized": {
                    "eigenvalues": general.eigenvalues,
                    "h_eigenvalues": general.h_eigenvalues,
                    "overlaps": general.overlaps,
                },
                "criteria": criteria,
                "passed": self.passed,
            },
        )
        return True

    def verify(self, seed: int | None = None) -> bool:
        """
        Run the operator identity suite and write verify.json.

        Args:
            seed (int | None, optional): Seed of the random fields; config seed if None. Defaults to None.

        Returns:
            bool: True if succeeded.
        """
        seed = self.config["seed"] if seed is None else seed
        grid = self._grid()
        report = verify_operator_identities(grid, self.params, self.config["window"], seed=seed)
        content = report.to_dict()
        content["seed"] = seed
        self.file_manager.save_json("verify.json", content)
        self.passed = report.passed
        logging.info(f"identity suite {'passed' if report.passed else 'failed'} ({len(report.checks)} checks)")
        return True

    def _load_trajectory(self, path: Path) -> Trajectory:
        states = Npy.load_array(path)
        sidecar_path = path.with_suffix(".json")
        sidecar = Json.load_dict(sidecar_path) if sidecar_path.is_file() else {}
        if "grid" in sidecar and sidecar["grid"]:
            g = sidecar["grid"]
            grid = make_grid(g["length"], g["count"], g.get("center", 0.0))
        else:
            grid = make_grid(self.config["length"], self.config["count"])
        if states.ndim == 1:
            states = states[np.newaxis, :]
        if states.ndim != 2 or states.shape[1] != grid.count:
            raise ParameterError(f"state shape {states.shape} does not match the grid count '{grid.count}'")
        times = np.asarray(sidecar.get("times", np.arange(states.shape[0], dtype=np.float64)), dtype=np.float64)
        if times.size != states.shape[0]:
            raise ParameterError(f"sidecar lists {times.size} times for {states.shape[0]} states")
        return Trajectory(grid=grid, form=sidecar.get("form", "momentum"), times=times, states=states, config=sidecar.get("config", {}))

    def modulate(self, state: str | None = None) -> bool:
        """
        Decompose a stored state or trajectory, or a fresh run of the config, into modulation parameters.

        Args:
            state (str | None, optional): Path to a .npy dump (sidecar next to it). Defaults to None.

        Returns:
            bool: True if succeeded.
        """
        p = self.params
        p.require_lefton()
        if state is None:
            traj = evolve(self._sim())
        else:
            traj = self._load_trajectory(Path(state))
            self.echo = {"grid": traj.grid.describe(), "scheme": traj.config.get("scheme", "")}
        window, tol, max_iter = self.config["window"], self.config["newton_tol"], self.config["newton_max_iter"]
        if len(traj.times) == 1:
            m = traj.states[0]
            if traj.form == "velocity":
                m = m - derivative(traj.grid, m, 2)
            frame = decompose(traj.grid, m, p, float(traj.times[0]), window, self.ceiling, tol, max_iter)
            frames, rates, K1 = [frame], [0.0], None
        else:
            series = modulation_series(traj, p, window, self.ceiling, tol, max_iter)
            frames, rates, K1 = series.frames, series.rho_rate, series.K1
            self._save_series("modulation", series.header(), series.rows())
        last = frames[-1]
        self.file_manager.save_json(
            "modulation.json",
            {
                "params": p.describe(),
                "frames": len(frames),
                "rho": last.rho,
                "a": last.a,
                "eps_h1alpha": last.eps_h1alpha,
                "eps_kz": last.eps_kz,
                "max_orthogonality": max(max(f.orthogonality) for f in frames),
                "max_rho_rate": float(np.max(np.abs(rates))),
                "K1": K1,
                "source": state,
            },
        )
        self.passed = True
        return True

    def stability(self) -> bool:
        """
        Run the asymptotic stability experiment on the perturbed lefton.

        The trajectory diagnostics are written before the experiment, so a run whose
        modulation fails still leaves them next to the failed report.

        Returns:
            bool: True if succeeded.
        """
        sim = self._sim(T=self.config["stability_T"], form="momentum")
        traj = evolve(sim)
        self.file_manager.save_csv("trajectory.csv", ["t", "diagnostic", "value"], traj.diagnostic_rows())
        report = experiment_stability(
            sim,
            tuple(self.config["x0_values"]),
            self.config["beta"],
            self.config["orbital_constant"],
            self.config["window"],
            self.ceiling,
            trajectory=traj,
        )
        report.artifacts.append("trajectory.csv")
        self._save_report(report)
        return True

    def regimes(self) -> bool:
        """
        Run the Gaussian regime scan over b.

        Returns:
            bool: True if succeeded.
        """
        sim = self._sim(form="velocity", initial="gaussian")
        report = experiment_regimes(sim, tuple(self.config["regime_b"]), self.config["regime_T"], self.config["workers"])
        self._save_report(report)
        return True

    def linearized(self) -> bool:
        """
        Run the linearized-flow check around the lefton.

        Returns:
            bool: True if succeeded.
        """
        sim = self._sim(form="linearized", initial="span")
        report = experiment_linearized(sim)
        self._save_report(report)
        return True

    def run(self, command: str, **kwargs) -> int:
        """
        Run one command and map its outcome to an exit code.

        0 on success, 1 on criterion failure or numerical error, 2 on config or I/O error.

        Args:
            command (str): Method name (e.g., "verify").
            **kwargs: Method arguments.

        Returns:
            int: Exit code.
        """
        method = getattr(self, command, None)
        if method is None or command.startswith("_") or command == "run":
            logging.error(f"unknown command '{command}'")
            return 2
        logging.info(f"running command '{command}'")
        try:
            method(**kwargs)
        except ConfigError as e:
            logging.warning(f"failed to run '{command}' due to config error ({e})")
            return 2
        except LeftonError as e:
            # small log
            logging.warning(f"failed to run '{command}' ({e})")
            self.passed = False
            return 1
        except OSError as e:
            logging.error(f"failed to write outputs of '{command}' ({e})")
            return 2
        except Exception as e:
            # extremely verbose log
            logging.exception(f"failed to run '{command}' due to unknown error ({e})")
            self.passed = False
            return 1
        logging.info(f"command '{command}' {'passed' if self.passed else 'failed'}")
        return 0 if self.passed else 1
