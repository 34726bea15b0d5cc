# -*- coding: utf-8 -*-
"""
Get placeholders for files that are missing: config, manifest, state sidecar.
"""

# keys that also accept null (auto)
NULLABLE: tuple = ("positivity_guard",)


def config() -> dict:
    """
    Return the documented default config (flat key-value).

    Returns:
        dict: Placeholder config.
    """
    r: dict = {
        # physics
        "b": -3.0,
        "A": 1.0,
        "x_star": 0.0,
        # grid
        "length": 80.0,
        "count": 4096,
        # time stepping
        "dt": 1e-3,
        "T": 10.0,
        "stride": 10,
        "cfl": 0.5,
        "cfl_guard": True,
        "dealias": True,
        "positivity_guard": True,
        "blowup_ceiling": 1e3,
        # run selection
        "form": "momentum",
        "initial": "lefton+perturbation",
        # initial data
        "perturbation_amplitude": 0.01,
        "perturbation_center": 2.0,
        "perturbation_width": 1.0,
        "gaussian_amplitude": 1.0,
        "gaussian_width": 5.0,
        "peakon_speed": 1.0,
        "span": [1.0, 0.0],  # (a0, b0) of v0 = a0 Q' + b0 Q
        # weights and floors
        "window": 12.0,
        "alpha_ceiling": 1e16,
        "decay_floor": 1e-10,
        "density_floor": 1e-8,
        # diagnostics
        "beta": 1.0,
        "x0_values": [6.0, 9.0, 12.0, 15.0],
        "orbital_constant": 10.0,
        "stability_T": 40.0,
        "regime_T": 60.0,
        "regime_b": [2.0, 0.0, -3.0],
        # newton
        "newton_tol": 1e-12,
        "newton_max_iter": 50,
        # spectral operators
        "scheme": "spectral",
        "eig_count": 8,
        "theta": 0.1,
        # run control
        "workers": 1,
        "plots": False,
        "seed": 0,
    }
    return r


def manifest() -> dict:
    """
    Return an empty run manifest.

    Returns:
        dict: Placeholder manifest.
    """
    r: dict = {
        "command": "",
        "config_path": None,
        "output_dir": "",
        "seed": 0,
        "version": "",
        "grid": {},
        "scheme": "",
        "passed": None,
        "files": [],
    }
    return r


def sidecar() -> dict:
    """
    Return an empty sidecar of a binary state dump.

    Returns:
        dict: Placeholder sidecar.
    """
    r: dict = {
        "dtype": "float64",
        "order": "C",
        "shape": [],
        "times": [],
        "grid": {},
    }
    return r
