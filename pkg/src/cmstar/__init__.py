"""Ray class groups, Shimura class groups and the (star_m) containment test for quartic CM fields."""

__version__ = "0.1.0"


def clear_caches() -> None:
    """Drop every memoised field, class group and type norm (used for cold timings)."""
    from . import classgroup, cm, ideals, rayclass, shimura, units
    for d in (classgroup._BASIS_VALUES, classgroup._CLASS_CACHE, cm._PRIME_TN, ideals._PRIME_CACHE,
              rayclass._RAY_CACHE, shimura._SHIMURA_CACHE, units._UNIT_CACHE):
        d.clear()
    units._real_quadratic_unit_cached.cache_clear()
