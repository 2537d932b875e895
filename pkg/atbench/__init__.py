import logging
import math

logger = logging.getLogger(__name__)


def docstring_interpolate(name, values):
    """Interpolate a variable into a function's docstring.
    Use to prevent duplication of documentation between optimizer classes and their `run_*` helpers."""
    def _decorator(func):
        args = {name: values}
        if func.__doc__:
            func.__doc__ = func.__doc__.format(**args)
        return func

    return _decorator


def check_positive_args(**kwargs):
    for arg, val in kwargs.items():
        if val is None:
            raise ValueError(f"required argument '{arg}' must not be None")
        if not val > 0:
            raise ValueError(f"argument '{arg}' must be positive, got {val!r}")


def format_float(value) -> str:
    """Format a number with 17 significant digits so that re-parsing reproduces it exactly.
    NaN is written as ``nan``."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    return "{:.17g}".format(value)
