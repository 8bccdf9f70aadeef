#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : __version__.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


VERSION = (0, 1, 0)

__version__ = '.'.join(map(str, VERSION))
