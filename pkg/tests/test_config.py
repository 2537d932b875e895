import configparser
import logging
import os
import tempfile
from unittest import mock

import pytest

import atbench
from atbench import config
from atbench.constants import BaselineMode, DEFAULT_CUTOFF, DEFAULT_REPEATS


def make_config(settings):
    c = config.AtbenchConfig()
    c.config = configparser.ConfigParser()
    c.config.read_dict(settings)
    return c


class TestConfig:

    def teardown_method(self):
        atbench.logger.handlers = []
        atbench.logger.setLevel(logging.NOTSET)

    def test_defaults(self):
        c = make_config({})
        c._set_experiment()
        assert c.repeats == DEFAULT_REPEATS
        assert c.cutoff == DEFAULT_CUTOFF
        assert c.baseline is BaselineMode.analytic
        assert c.workers == 1

    def test_set_experiment(self):
        settings = {"experiment": {"repeats": "20", "seed": "42", "cutoff": "0.9", "points": "25",
                                   "workers": "4", "baseline": "renewal", "simulations": "500"}}
        c = make_config(settings)
        c._set_experiment()
        assert c.repeats == 20
        assert c.seed == 42
        assert c.cutoff == 0.9
        assert c.points == 25
        assert c.workers == 4
        assert c.baseline is BaselineMode.renewal
        assert c.simulations == 500

    def test_set_experiment_partial(self):
        c = make_config({"experiment": {"seed": "3"}})
        c._set_experiment()
        assert c.seed == 3
        assert c.repeats == DEFAULT_REPEATS

    @pytest.mark.parametrize("key,value", [("repeats", "0"), ("cutoff", "0"), ("cutoff", "1.5"), ("points", "0"),
                                           ("workers", "0"), ("simulations", "0"), ("baseline", "exact")])
    def test_set_experiment_invalid(self, key, value):
        c = make_config({"experiment": {key: value}})
        with pytest.raises(ValueError):
            c._set_experiment()

    def test_set_logging(self):
        c = make_config({"logging": {"level": "debug"}})
        c._set_logging()
        assert atbench.logger.level == logging.DEBUG
        assert len(atbench.logger.handlers) == 1

    def test_no_logging_section(self):
        c = make_config({})
        c._set_logging()
        assert atbench.logger.handlers == []

    def test_load_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "atbench.ini")
            with open(path, "w") as fp:
                fp.write("[experiment]\nrepeats = 5\n\n[logging]\nlevel = warning\n")
            c = config.AtbenchConfig()
            c.load(path)
        assert c.repeats == 5
        assert atbench.logger.level == logging.WARNING

    def test_load_from_environment(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "atbench.ini")
            with open(path, "w") as fp:
                fp.write("[experiment]\nseed = 9\n")
            c = config.AtbenchConfig()
            with mock.patch.dict(os.environ, {"ATBENCH_CONFIG": path}):
                c.load()
        assert c.seed == 9

    def test_load_errors(self):
        c = config.AtbenchConfig()
        with mock.patch.dict(os.environ, {}, clear=True):
            with pytest.raises(ValueError):
                c.load()
        with pytest.raises(ValueError):
            c.load("/nonexistent/atbench.ini")
