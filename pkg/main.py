# -*- coding: utf-8 -*-
"""
Main entry: setup rotating logger and run the dispatcher.
"""
import logging
import sys
from logging.handlers import RotatingFileHandler

from lefton.cli import dispatch


def main() -> None:
    """
    The main entry point to the application.

    Example usage:
    >>> python3 main.py verify --b -3 --A 1
    >>> python3 main.py spectrum --b -3
    >>> python3 main.py evolve --config ./config.json --T 10
    >>> python3 main.py stability --plots --verbose
    """
    # setup logger
    logging.basicConfig(
        datefmt="%G-%m-%d %T",
        format="%(asctime)s [%(levelname)s] %(filename)s : %(funcName)s() (%(lineno)d) - %(message)s",
        handlers=[
            # write to file, rotate after at least 2,500 lines
            RotatingFileHandler(
                "./app.log", maxBytes=350_000, backupCount=5, encoding="utf-8"
            ),
            # write to console
            logging.StreamHandler(sys.stdout),
        ],
        level=logging.INFO,
    )
    code, _ = dispatch(sys.argv[1:])
    raise SystemExit(code)


if __name__ == "__main__":
    main()
