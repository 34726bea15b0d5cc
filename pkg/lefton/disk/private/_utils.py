# -*- coding: utf-8 -*-
"""
Extra tools for input and output.
"""
import csv
import logging
import math
from json import JSONDecodeError, dump, load
from shutil import rmtree

import numpy as np

from ...errors import ConfigError
from . import _templates

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())


class Directory:
    @staticmethod
    def remove(path) -> None:
        """
        Remove a directory recursively.

        If doesn't exist, ignore, if failed, raise.

        Args:
            path (obj): Path-like object.
        """
        try:
            rmtree(path)
        except FileNotFoundError:
            logging.debug(f"directory doesn't exists, ignoring '{path}'")
        except Exception as e:
            logging.error(f"failed to remove directory '{path}' ({e})")
            raise
        else:
            logging.debug(f"ok: directory removed '{path}'")
        return None


def plain(value):
    """
    Convert numpy scalars and arrays to plain Python, non-finite floats to None.

    Args:
        value (obj): Nested dicts, lists, tuples, arrays and scalars.

    Returns:
        obj: JSON-ready value.
    """
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class Json:
    @staticmethod
    def load_dict(obj) -> dict:
        """
        Load a JSON file as a dictionary (e.g., './config.json').

        If failed, raise.

        Args:
            obj (obj): Path-like object.

        Returns:
            dict: Contents of the file.
        """
        try:
            with obj.open(mode="r", encoding="utf-8") as f:
                r: dict = load(f)
        except OSError as e:
            logging.debug(f"cannot open json file '{obj}' ({e})")
            raise
        except Exception as e:
            logging.debug(f"failed to load json file '{obj}' ({e})")
            raise
        else:
            logging.debug(f"ok: loaded json file '{obj}'")
            return r

    @staticmethod
    def save_dict(obj, value: dict) -> None:
        """
        Save dictionary as a JSON file (e.g., './report.json').

        Floats keep their shortest round-trip repr; NaN and infinities become null.
        If failed, raise.

        Args:
            obj (obj): Path-like object.
            value (dict): Contents to be written.
        """
        try:
            with obj.open(mode="w", encoding="utf-8") as f:
                dump(plain(value), f, indent=4, sort_keys=True, ensure_ascii=False, allow_nan=False)
                f.write("\n")
        except OSError as e:
            logging.error(f"cannot open json file '{obj}' ({e})")
            raise
        except (TypeError, ValueError) as e:
            logging.error(f"failed to save json because of type provided, '{obj}' ({e})")
            raise
        else:
            logging.debug(f"ok: saved json file '{obj}'")
            return None


class Csv:
    @staticmethod
    def cell(value) -> str:
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            return "%.17g" % float(value)
        if value is None:
            return ""
        return str(value)

    @staticmethod
    def save_rows(obj, header: list, rows: list) -> None:
        """
        Save a header row and data rows as CSV, floats with 17 significant digits.

        If failed, raise.

        Args:
            obj (obj): Path-like object.
            header (list): Column names.
            rows (list): Rows of equal length.
        """
        try:
            with obj.open(mode="w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    if len(row) != len(header):
                        raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
                    writer.writerow([Csv.cell(v) for v in row])
        except Exception as e:
            logging.error(f"failed to save csv file '{obj}' ({e})")
            raise
        else:
            logging.debug(f"ok: saved csv file '{obj}' ({len(rows)} rows)")
            return None


class Npy:
    @staticmethod
    def save_array(obj, value) -> None:
        """
        Save an array as float64, C order (.npy).

        If failed, raise.

        Args:
            obj (obj): Path-like object.
            value (array-like): Contents to be written.
        """
        try:
            np.save(obj, np.ascontiguousarray(value, dtype=np.float64), allow_pickle=False)
        except Exception as e:
            logging.error(f"failed to save npy file '{obj}' ({e})")
            raise
        else:
            logging.debug(f"ok: saved npy file '{obj}'")
            return None

    @staticmethod
    def load_array(obj) -> np.ndarray:
        try:
            r = np.load(obj, allow_pickle=False)
        except Exception as e:
            logging.error(f"failed to load npy file '{obj}' ({e})")
            raise
        return r


def _type_matches(default, value) -> bool:
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, str):
        return isinstance(value, str)
    if isinstance(default, list):
        return isinstance(value, list) and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        )
    return False


class LoadByType:
    @staticmethod
    def validate(config: dict) -> dict:
        """
        Check a flat config against the defaults and fill the missing keys.

        If a key is unknown or a value has the wrong type, raise.

        Args:
            config (dict): Partial or full config.

        Returns:
            dict: Full config.
        """
        config_default: dict = _templates.config()
        if not isinstance(config, dict):
            raise ConfigError(f"config must be a JSON object, got '{type(config).__name__}'")
        unknown = sorted(set(config) - set(config_default))
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        for key, value in config.items():
            if value is None and key in _templates.NULLABLE:
                continue
            if not _type_matches(config_default[key], value):
                expected = type(config_default[key]).__name__
                raise ConfigError(f"config key '{key}' expects {expected}, got '{value!r}'")
        r = {**config_default, **config}
        # numeric keys with a float default are floats from here on
        for key, value in config_default.items():
            if isinstance(value, float) and r[key] is not None:
                r[key] = float(r[key])
            elif isinstance(value, list):
                r[key] = [float(v) for v in r[key]]
        return r

    @staticmethod
    def config(path) -> dict:
        """
        Return dictionary containing user-defined config file.

        If the file is missing, write the defaults and return them.
        If the file is malformed, or has unknown keys or wrong types, raise.

        Args:
            path (obj): Path-like object.

        Returns:
            dict: Contents of the file, missing keys filled from the defaults.
        """
        if not path.is_file():
            config_default: dict = _templates.config()
            logging.warning(f"config file '{path}' not found, writing default values")
            Json.save_dict(obj=path, value=config_default)
            return config_default
        try:
            config: dict = Json.load_dict(obj=path)
        except JSONDecodeError as e:
            logging.error(f"malformed config file '{path}' ({e})")
            raise ConfigError(f"malformed config file '{path}': {e}")
        try:
            r = LoadByType.validate(config)
        except ConfigError as e:
            logging.error(f"invalid config file '{path}' ({e})")
            raise
        logging.debug(f"ok: loaded config file '{path}'")
        return r
