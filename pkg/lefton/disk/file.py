# -*- coding: utf-8 -*-
"""
Load the config and save run outputs on-demand: JSON reports, CSV series, state dumps, plots, manifest.
Example usage:
>>> f = FileManager(dir_out="./output/evolve/", path_config="./config.json")
>>> f.save_csv("modulation.csv", ["t", "rho"], [[0.0, 0.0]])
"""
import logging
from pathlib import Path

from .plot import PlotManager
from .private import _templates
from .private._utils import Csv, Directory, Json, LoadByType, Npy

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())


class FileManager:
    def __init__(
        self,
        dir_out: str = "./output/",
        path_config: str | None = None,
        reset: bool = False,
    ) -> None:
        """
        Create the output directory and remember where the config lives.

        If failed, raise.
        The config is loaded lazily on first access; without a config path the defaults are used.

        Args:
            dir_out (str, optional): Directory for all outputs of one run. Defaults to "./output/".
            path_config (str | None, optional): Path to the JSON config. Defaults to None.
            reset (bool, optional): If True, then delete the output directory first. Defaults to False.
        """
        try:
            self.dir_out = Path(dir_out).resolve()
            if reset:
                Directory.remove(self.dir_out)
            if self.dir_out.is_dir():
                logging.debug(f"ok: directory already exists '{self.dir_out}', ignoring")
            else:
                self.dir_out.mkdir(parents=True, exist_ok=False)
                logging.debug(f"ok: created directory '{self.dir_out}'")
        except Exception as e:
            logging.error(f"could not create output directory ({e})")
            raise
        self._filepath_config = None if path_config is None else Path(path_config).resolve()
        # cached variables, will be loaded only if requested
        self._config: dict = dict()
        # every file written through this instance, in order
        self.written: list = []
        self.plot_manager = PlotManager()
        return None

    @property
    def config_path(self) -> str | None:
        return None if self._filepath_config is None else str(self._filepath_config)

    @property
    def config(self) -> dict:
        """
        Load config file - if cache unavailable, load from disk, if cache available, load from RAM.
        If malformed, raise.

        Returns:
            dict: Contents of the file.
        """
        logging.debug("GET: CONFIG (try to load from cache, then from disk)")
        if not self._config:
            if self._filepath_config is None:
                logging.debug("no config path, using default values")
                self._config = _templates.config()
            else:
                logging.debug(f"config not cached, loading now '{self._filepath_config}'")
                self._config = LoadByType.config(self._filepath_config)
        else:
            logging.debug("ok: config was cached, returning from RAM")
        return self._config

    @config.setter
    def config(self, content: dict) -> None:
        """
        Validate and cache a config (e.g., file values with command-line overrides), do not write it.

        Args:
            content (dict): Partial or full config.
        """
        logging.debug("SET: CONFIG (validate & cache)")
        self._config = LoadByType.validate(content)
        return None

    def _path(self, name: str) -> Path:
        obj = Path(self.dir_out, name)
        obj.parent.mkdir(parents=True, exist_ok=True)
        return obj

    def _record(self, obj: Path) -> None:
        if obj not in self.written:
            self.written.append(obj)
        return None

    def save_json(self, name: str, value: dict) -> Path:
        obj = self._path(name)
        Json.save_dict(obj=obj, value=value)
        self._record(obj)
        return obj

    def save_csv(self, name: str, header: list, rows: list) -> Path:
        obj = self._path(name)
        Csv.save_rows(obj=obj, header=header, rows=rows)
        self._record(obj)
        return obj

    def save_state(self, name: str, array, sidecar: dict) -> tuple[Path, Path]:
        """
        Save a state dump as '<name>.npy' plus a '<name>.json' sidecar.

        Args:
            name (str): Base name without suffix.
            array (array-like): States.
            sidecar (dict): Shape, dtype, order, times and grid.

        Returns:
            tuple[Path, Path]: Paths of the dump and the sidecar.
        """
        obj_npy = self._path(f"{name}.npy")
        obj_json = self._path(f"{name}.json")
        Npy.save_array(obj=obj_npy, value=array)
        Json.save_dict(obj=obj_json, value={**_templates.sidecar(), **sidecar})
        self._record(obj_npy)
        self._record(obj_json)
        return obj_npy, obj_json

    def save_plot(
        self, name: str, x, series: dict, xlabel: str = "", ylabel: str = "", title: str = "", logy: bool = False
    ) -> Path:
        obj = self._path(name)
        self.plot_manager.save(obj, x, series, xlabel=xlabel, ylabel=ylabel, title=title, logy=logy)
        self._record(obj)
        return obj

    def relative(self, obj: Path) -> str:
        return Path(obj).relative_to(self.dir_out).as_posix()

    def save_manifest(self, manifest: dict, name: str = "manifest.json") -> Path:
        """
        Save the run manifest listing every file written so far (the manifest excluded).

        If a listed file is missing, raise.

        Args:
            manifest (dict): Manifest fields (see the manifest template).
            name (str, optional): File name. Defaults to "manifest.json".

        Returns:
            Path: Path of the manifest.
        """
        missing = [str(obj) for obj in self.written if not obj.is_file()]
        if missing:
            logging.error(f"manifest lists missing files: {missing}")
            raise FileNotFoundError(f"manifest lists missing files: {missing}")
        content = {**_templates.manifest(), **manifest}
        content["output_dir"] = str(self.dir_out)
        content["files"] = [self.relative(obj) for obj in self.written]
        obj = self._path(name)
        Json.save_dict(obj=obj, value=content)
        logging.debug(f"ok: manifest lists {len(self.written)} files")
        return obj
