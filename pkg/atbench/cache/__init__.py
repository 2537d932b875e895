from atbench.cache.cachefile import CacheEntry, CacheMetadata, TuningCache, load_cache, write_cache
from atbench.cache.stats import REFERENCE_SPACES, ExpectedCounts, SpaceStats, ValidationReport, space_stats, \
    validate_cache
from atbench.cache.synthetic import synth_cache
