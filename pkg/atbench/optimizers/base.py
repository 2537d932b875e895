from typing import Any, Callable, Dict, Optional

import numpy as np

from atbench.exceptions import UnknownHyperparameterException
from atbench.space import Configuration, SearchSpace

Observer = Callable[..., None]


def coerce_hyperparameter(algorithm: str, name: str, default, value):
    """Convert value to the type of a hyperparameter's default. Values given as text come from the command line."""
    if isinstance(default, bool):
        if isinstance(value, str):
            lowered = value.strip().lower()
            if lowered not in ("true", "false", "1", "0"):
                raise ValueError(f"{algorithm}: '{name}' expects true or false, got {value!r}")
            return lowered in ("true", "1")
        return bool(value)
    # a None default stands for a value derived from other hyperparameters
    kind = int if default is None or isinstance(default, int) else type(default)
    try:
        if kind is int:
            number = float(value)
            if not number.is_integer():
                raise ValueError
            return int(number)
        return kind(value)
    except (TypeError, ValueError):
        raise ValueError(f"{algorithm}: '{name}' expects {kind.__name__}, got {value!r}")


class Optimizer:
    """Base of the optimizers.

    Subclasses set ``name`` and ``defaults`` and implement :meth:`run`. Hyperparameters given to the
    constructor override the defaults; unknown names are rejected.

    Arguments:
        observer: optional callable notified as ``observer(event, **data)`` while running
        hyperparameters: overrides of ``defaults``
    Raises:
        UnknownHyperparameterException: a hyperparameter name not in ``defaults``
    """
    name: str = None
    defaults: Dict[str, Any] = {}

    def __init__(self, observer: Optional[Observer] = None, **hyperparameters):
        for key in hyperparameters:
            if key not in self.defaults:
                raise UnknownHyperparameterException(self.name, key)
        self.hyperparameters = dict(self.defaults)
        for key, value in hyperparameters.items():
            self.hyperparameters[key] = coerce_hyperparameter(self.name, key, self.defaults[key], value)
        self.observer = observer
        self.validate()

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(f'{k}={v!r}' for k, v in self.hyperparameters.items())})"

    def validate(self):
        """Check hyperparameter values, raising ValueError"""

    def notify(self, event: str, **data):
        if self.observer is not None:
            self.observer(event, **data)

    def run(self, evaluator, space: SearchSpace, rng: np.random.Generator) -> Configuration:
        """Search until the evaluator is finished and return the best configuration evaluated.

        Only valid configurations are evaluated, and the result depends on nothing but the space, the
        cache, the budget, the state of rng and the hyperparameters.
        """
        raise NotImplementedError
