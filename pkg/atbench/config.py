import configparser
import logging
import os

import atbench
from atbench.constants import BaselineMode, DEFAULT_CUTOFF, DEFAULT_GRID_POINTS, DEFAULT_REPEATS, \
    DEFAULT_SIMULATIONS


class AtbenchConfig:
    config: configparser.ConfigParser = None

    # Number of seeded runs per (search space, algorithm) pair
    repeats: int = DEFAULT_REPEATS
    # Master seed, per-run seeds are derived from it
    seed: int = 0
    # Fraction of the median-optimum distance the baseline must cover to define the budget
    cutoff: float = DEFAULT_CUTOFF
    # Number of equidistant sampling points of the performance curves
    points: int = DEFAULT_GRID_POINTS
    # Worker processes for experiment runs
    workers: int = 1
    # How the random search baseline is computed
    baseline: BaselineMode = BaselineMode.analytic
    # Monte Carlo simulations when baseline = monte_carlo
    simulations: int = DEFAULT_SIMULATIONS

    def load(self, configfile: str = None):
        if configfile is None:
            configfile = os.getenv("ATBENCH_CONFIG")
            if not configfile:
                raise ValueError("called load() without a path and ATBENCH_CONFIG environment variable unset")
        if not os.path.exists(configfile):
            raise ValueError(f"No such config file '{configfile}'")

        self.config = configparser.ConfigParser()
        self.config.read(configfile)

        self._set_logging()
        self._set_experiment()

    def _set_logging(self):
        if "logging" not in self.config:
            return
        section_logging = self.config["logging"]
        level = section_logging.get("level", "info").upper()
        set_log_level(level)

    def _set_experiment(self):
        if "experiment" not in self.config:
            atbench.logger.debug("No [experiment] section, using defaults")
            return
        experiment = self.config["experiment"]

        self.repeats = experiment.getint("repeats", self.repeats)
        if self.repeats < 1:
            raise ValueError("experiment.repeats must be at least 1")
        self.seed = experiment.getint("seed", self.seed)
        self.cutoff = experiment.getfloat("cutoff", self.cutoff)
        if not 0 < self.cutoff <= 1:
            raise ValueError("experiment.cutoff must be in (0, 1]")
        self.points = experiment.getint("points", self.points)
        if self.points < 1:
            raise ValueError("experiment.points must be at least 1")
        self.workers = experiment.getint("workers", self.workers)
        if self.workers < 1:
            raise ValueError("experiment.workers must be at least 1")
        self.simulations = experiment.getint("simulations", self.simulations)
        if self.simulations < 1:
            raise ValueError("experiment.simulations must be at least 1")

        baseline = experiment.get("baseline", str(self.baseline))
        try:
            self.baseline = BaselineMode(baseline)
        except ValueError:
            raise ValueError(f"experiment.baseline '{baseline}' is not one of "
                             f"{', '.join(m.value for m in BaselineMode)}")


def set_log_level(level):
    handler = logging.StreamHandler()
    handler.setLevel(level)
    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    handler.setFormatter(formatter)
    atbench.logger.handlers = [handler]
    atbench.logger.setLevel(level)


config = AtbenchConfig()
