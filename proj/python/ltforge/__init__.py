"""Python access to ltforge. Every call returns plain dicts and lists."""

import json

from . import _ltforge
from ._ltforge import LtforgeError, preset_names

__all__ = [
    "LtforgeError",
    "a_series",
    "colmez_lift",
    "error_kind",
    "field",
    "group_law",
    "log_series",
    "pi_series",
    "planted_series",
    "preset_names",
    "recover_a",
    "run_checks",
]


def error_kind(exc):
    """The machine-readable kind carried by an LtforgeError, e.g. 'WrongValuation'."""
    return str(exc).split(":", 1)[0]


def _wrap(name):
    raw = getattr(_ltforge, name)

    def call(*args, **kwargs):
        return json.loads(raw(*args, **kwargs))

    call.__name__ = name
    call.__doc__ = raw.__doc__
    return call


def _series_arg(name):
    raw = getattr(_ltforge, name)

    def call(preset, u, *args, **kwargs):
        if not isinstance(u, str):
            u = json.dumps(u)
        return json.loads(raw(preset, u, *args, **kwargs))

    call.__name__ = name
    call.__doc__ = raw.__doc__
    return call


field = _wrap("field")
pi_series = _wrap("pi_series")
a_series = _wrap("a_series")
group_law = _wrap("group_law")
log_series = _wrap("log_series")
planted_series = _wrap("planted_series")
run_checks = _wrap("run_checks")
colmez_lift = _series_arg("colmez_lift")
recover_a = _series_arg("recover_a")
