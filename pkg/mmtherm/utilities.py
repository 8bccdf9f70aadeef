#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# File   : utilities.py
# License: GNU v3.0
# Author : the mmtherm developers
# Date   : 19.10.2026


import  os
import  sys
import  signal
import  textwrap
from    textwrap    import  indent

import  numpy       as      np


# Allow the code to function without numba; the decorated kernels then simply
# run as plain Python
try:
    from numba import njit
    GOT_NUMBA = True
except ImportError:
    def njit(*args, **kwargs):
        # Used both as `@njit` and as `@njit(cache = True)`
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def _identity(fn):
            return fn
        return _identity

    GOT_NUMBA = False




class UniversalSet:
    def __contains__(self, x):
        return True


universal_set = UniversalSet()




def _short_str(memb):
    # NumPy arrays are summarised by their shape unless tiny
    if isinstance(memb, np.ndarray) and memb.size > 16:
        return f"<ndarray shape={memb.shape} dtype={memb.dtype}>"
    return str(memb)




def autorepr(_c = None, *, short = {}, hide = {}):
    '''Automatically create a ``__repr__`` method for pretty-printing class
    attributes; they are discovered at runtime following some rules.

    1. Attribute names do not start with underscores and are not callable.
    2. The attributes given in ``short`` (set[str] | bool) are printed up to
       80 characters. If ``short == True``, then all attributes are shortened.
    3. The attributes given in ``hide`` (set[str]) are skipped.
    4. NumPy arrays with more than 16 elements are summarised by their shape.
    5. Multiline representations are printed on a separate line and indented
       with 2 spaces.

    Examples
    --------
    >>> from mmtherm.utilities import autorepr
    >>> @autorepr(hide = {"cache"})
    >>> class Interval:
    >>>     def __init__(self):
    >>>         self.a = -1.0
    >>>         self.b = 1.0
    >>>         self.cache = {}
    >>>
    >>> print(Interval())
    Interval
    --------
    a = -1.0
    b = 1.0
    '''

    def __repr__(self):
        _repr_hide = getattr(self, "_repr_hide", set())
        _repr_short = getattr(self, "_repr_short", set())

        docs = []
        for att in dir(self):
            if att.startswith("_") or att in _repr_hide:
                continue

            memb = getattr(self, att)
            if callable(memb):
                continue

            memb_str = _short_str(memb)
            if att not in _repr_short and "\n" in memb_str:
                memb_str = "\n" + indent(memb_str, "  ")

            docs.append(f"{att} = {memb_str}")
            if att in _repr_short and len(docs[-1]) > 80:
                docs[-1] = docs[-1].replace("\n", "\\n")[:67] + "..."

        name = self.__class__.__name__
        underline = "-" * len(name)
        return f"{name}\n{underline}\n" + "\n".join(docs)

    def setrepr(c):
        if isinstance(short, bool) and short is True:
            c._repr_short = universal_set
        elif len(short):
            c._repr_short = set(short)

        if len(hide):
            c._repr_hide = set(hide)

        c.__repr__ = __repr__
        return c

    if _c is None:
        return setrepr
    return setrepr(_c)




def banner(title, file = sys.stderr):
    '''Print an 80-character banner with a title, flushing immediately.
    '''
    line = "=" * 80
    print(f"{line}\n{title}\n{line}", flush = True, file = file)




def worker_count(env = "MMTHERM_THREADS", default = None):
    '''Number of worker processes allowed, read from the environment variable
    `env`; falls back to `default` or ``os.cpu_count()``.

    Raises
    ------
    ValueError
        If the environment variable is set but is not a positive integer.
    '''

    value = os.environ.get(env)
    if value is None or value.strip() == "":
        return default if default is not None else (os.cpu_count() or 1)

    try:
        nworkers = int(value)
    except ValueError:
        nworkers = 0

    if nworkers < 1:
        raise ValueError(textwrap.fill((
            f"The environment variable `{env}` must be a positive integer. "
            f"Received `{value}`."
        )))

    return nworkers




def interrupt_handler(signum, stackframe):
    li = "\n" + "*" * 80 + "\n"
    print(
        f"{li}Caught signal {signum} - cancelling pending jobs!{li}",
        flush = True, file = sys.stderr,
    )
    raise KeyboardInterrupt




class SignalHandlerKI:
    '''Handle typical OS termination signals by raising a ``KeyboardInterrupt``
    exception, so that worker pools can be shut down cleanly.

    If a signal is not found on a given platform (e.g. SIGBREAK only exists on
    Windows) it is simply skipped. Can be used as a context manager.
    '''

    def __init__(
        self,
        signals = (
            "SIGINT",
            "SIGTERM",
            "SIGBREAK",
            "SIGABRT",
        ),
    ):
        self.signals = list(signals)
        self.previous_handlers = {}


    def set(self):
        '''Set the signals' handlers. Save the previous handlers.
        '''
        for sig in self.signals:
            try:
                s = getattr(signal, sig)                       # AttributeError
                self.previous_handlers[sig] = signal.getsignal(s)
                signal.signal(s, interrupt_handler)            # Key|ValueError
            except (AttributeError, KeyError, ValueError):
                pass


    def unset(self):
        '''Unset the signals' handlers. Return to previous handlers.
        '''
        for sig in self.signals:
            try:
                s = getattr(signal, sig)                       # AttributeError
                signal.signal(s, self.previous_handlers[sig])  # Key|ValueError
            except (AttributeError, KeyError, ValueError, TypeError):
                pass


    def __enter__(self):
        self.set()
        return self


    def __exit__(self, *exc):
        self.unset()
        return False
