#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : cleanup.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


import os
import shutil


def cleanup(
    files = [
        "s22_marginal.csv",
        "s22_marginal_grid.csv",
        "registry.json",
        "run.toml",
    ],
    directories = [
        "__pycache__",
        ".pytest_cache",
        "curves",
    ],
):
    '''Remove files and directories generated by running tests and the
    command-line examples.
    '''

    for f in files:
        if os.path.isfile(f):
            os.remove(f)

    for d in directories:
        if os.path.isdir(d):
            shutil.rmtree(d)


if __name__ == "__main__":
    cleanup()
