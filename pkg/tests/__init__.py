import os
import unittest

import numpy as np

from atbench.cache import CacheEntry, CacheMetadata, TuningCache, load_cache
from atbench.constants import ObjectiveDirection
from atbench.space import enumerate_valid


class AtbenchTestCase(unittest.TestCase):

    @property
    def test_directory(self):
        return os.path.dirname(__file__)

    @property
    def data_dir(self):
        return os.path.join(self.test_directory, "data")

    def cache_path(self, filename):
        return os.path.join(self.data_dir, "caches", filename)

    def load_cache(self, filename):
        return load_cache(self.cache_path(filename))

    def read_file(self, filename):
        with open(os.path.join(self.data_dir, filename)) as fp:
            return fp.read()

    @staticmethod
    def single_configuration_cache():
        """x in {1, 2, 4} where only x == 2 is valid, objective 7.5"""
        space = enumerate_valid({"x": [1, 2, 4]}, ["x == 2"])
        entries = {(0,): CacheEntry((0,), False, None, 0.0),
                   (1,): CacheEntry((1,), True, 7.5, 1.0),
                   (2,): CacheEntry((2,), False, None, 0.0)}
        metadata = CacheMetadata("single", "testdevice", "one", "time", ObjectiveDirection.min, "ms")
        return TuningCache(metadata, space, entries)

    @staticmethod
    def rescaled_cache(cache, scale, shift):
        """The same cache with every objective replaced by scale * objective + shift"""
        entries = {}
        for config, entry in cache.entries.items():
            objective = scale * entry.objective + shift if entry.valid else None
            entries[config] = CacheEntry(config=config, valid=entry.valid, objective=objective,
                                         eval_cost_seconds=entry.eval_cost_seconds)
        return TuningCache(cache.metadata, cache.space, entries)

    def assert_trace_sound(self, trace, cache):
        """Valid configurations only, monotone clock and best-so-far, nothing below the optimum"""
        previous_time = 0.0
        for event in trace.events:
            assert cache.space.is_valid(event.config)
            assert event.completion_time >= previous_time
            if not event.fresh:
                assert event.completion_time == previous_time
            assert event.objective >= cache.stats.optimum
            previous_time = event.completion_time
        times = [e.completion_time for e in trace.events]
        best = [trace.best_so_far_at(t) for t in times]
        assert all(b1 >= b2 for b1, b2 in zip(best, best[1:]))
        fresh_costs = [cache.entry(e.config).eval_cost_seconds for e in trace.events if e.fresh]
        if fresh_costs:
            assert np.isclose(sum(fresh_costs), previous_time, rtol=0, atol=1e-9)
