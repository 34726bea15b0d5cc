# -*- coding: utf-8 -*-
"""
Command-line dispatcher: parse flags, bind them over the config, run one command, write the manifest.
Example usage:
>>> code, manifest = dispatch(["verify", "--b", "-3", "--A", "1"])
>>> code
0
"""
import logging
import os
import sys
from argparse import ArgumentParser
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .disk.file import FileManager
from .errors import ConfigError
from .main import App

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

COMMANDS: tuple = ("evolve", "spectrum", "verify", "modulate", "stability", "regimes", "linearized")
DEFAULT_OUTPUT_ROOT: str = "./output"
# flag destination -> config key
OVERRIDES: dict = {
    "b": "b",
    "A": "A",
    "xstar": "x_star",
    "length": "length",
    "n": "count",
    "dt": "dt",
    "window": "window",
    "seed": "seed",
}
# --T sets the horizon of the command it is given to
HORIZONS: dict = {"stability": "stability_T", "regimes": "regime_T"}


@dataclass
class RunManifest:
    """
    What ran, with which config and seed, and every file it wrote.
    """

    command: str
    config_path: str | None
    output_dir: str
    seed: int
    version: str
    grid: dict = field(default_factory=dict)
    scheme: str = ""
    passed: bool | None = None
    files: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def build_parser() -> ArgumentParser:
    """
    Return the parser with one subcommand per App method.

    Returns:
        ArgumentParser: The parser.
    """
    common = ArgumentParser(add_help=False)
    common.add_argument("--b", type=float, help="value: b-family parameter (e.g., -3)")
    common.add_argument("--A", type=float, help="value: lefton amplitude parameter A > 0")
    common.add_argument("--xstar", type=float, help="value: lefton center x*")
    common.add_argument("--length", type=float, help="value: periodic domain length")
    common.add_argument("--n", type=int, help="value: number of grid points (even)")
    common.add_argument("--dt", type=float, help="value: RK4 time step")
    common.add_argument("--T", type=float, help="value: final time of the run (stability/regimes: their horizon)")
    common.add_argument("--window", type=float, help="value: half-width W of the weighted window")
    common.add_argument("--out", help="value: output root (default: $LEFTON_OUTPUT_ROOT or ./output)")
    common.add_argument("--config", help="value: path to the JSON config (defaults written if missing)")
    common.add_argument("--seed", type=int, help="value: seed of the randomized property suites")
    common.add_argument("--plots", action="store_true", help="flag: also write SVG plots")
    common.add_argument("--reset", action="store_true", help="flag: remove the command's output directory first")
    common.add_argument(
        "-v",
        "--verbose",
        help="flag: enable verbose, debug-level logging",
        action="store_true",  # doesn't take value, returns true if provided, otherwise false
    )
    parser = ArgumentParser(prog="lefton", description="b-family lefton simulation and verification toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    evolve = sub.add_parser("evolve", parents=[common], help="run the flow and export the trajectory")
    evolve.add_argument("--reverse", action="store_true", help="flag: integrate backward in time")
    sub.add_parser("spectrum", parents=[common], help="eigenreport of H and coercivity estimates")
    sub.add_parser("verify", parents=[common], help="operator identity suite")
    modulate = sub.add_parser("modulate", parents=[common], help="modulated decomposition of a state or run")
    modulate.add_argument("--state", help="value: path to a stored .npy state (sidecar next to it)")
    sub.add_parser("stability", parents=[common], help="asymptotic stability experiment")
    sub.add_parser("regimes", parents=[common], help="Gaussian regime scan over b")
    sub.add_parser("linearized", parents=[common], help="linearized-flow check around the lefton")
    return parser


def _overrides(args) -> dict:
    r = {}
    for flag, key in OVERRIDES.items():
        value = getattr(args, flag)
        if value is not None:
            r[key] = value
    if args.T is not None:
        r[HORIZONS.get(args.command, "T")] = args.T
    if args.plots:
        r["plots"] = True
    return r


def dispatch(argv: list) -> tuple[int, RunManifest | None]:
    """
    Parse argv, run the command, write the manifest.

    Exit codes: 0 success, 1 criterion failure or numerical error, 2 usage, config or I/O error.

    Args:
        argv (list): Arguments without the program name.

    Returns:
        tuple[int, RunManifest | None]: Exit code and the manifest (None if nothing ran).
    """
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2, None
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors, 0 on --help/--version
        return (2 if e.code else 0), None
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2, None
    if args.verbose:
        logging.info("found arg 'verbose' - enable verbose, debug-level logging")
        logging.getLogger().setLevel(logging.DEBUG)
    root = args.out or os.environ.get("LEFTON_OUTPUT_ROOT", DEFAULT_OUTPUT_ROOT)
    try:
        file_manager = FileManager(dir_out=str(Path(root, args.command)), path_config=args.config, reset=args.reset)
        file_manager.config = {**file_manager.config, **_overrides(args)}
    except ConfigError as e:
        logging.error(f"config error ({e})")
        return 2, None
    except OSError as e:
        logging.error(f"output directory is not writable ({e})")
        return 2, None
    app = App(file_manager)
    kwargs = {}
    if args.command == "evolve":
        kwargs["reverse"] = args.reverse
    elif args.command == "modulate":
        kwargs["state"] = args.state
    code = app.run(args.command, **kwargs)
    if code == 2:
        return code, None
    manifest = RunManifest(
        command=args.command,
        config_path=file_manager.config_path,
        output_dir=str(file_manager.dir_out),
        seed=file_manager.config["seed"],
        version=__version__,
        grid=app.echo["grid"],
        scheme=app.echo["scheme"],
        passed=app.passed,
    )
    try:
        file_manager.save_manifest(manifest.to_dict())
    except OSError as e:
        logging.error(f"failed to write the manifest ({e})")
        return 2, None
    manifest.files = [file_manager.relative(obj) for obj in file_manager.written]
    logging.info(f"'{args.command}' finished with exit code {code}, {len(manifest.files)} files in '{file_manager.dir_out}'")
    return code, manifest
