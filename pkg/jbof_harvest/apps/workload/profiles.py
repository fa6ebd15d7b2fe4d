"""
Synthetic stand-ins for the production and benchmark traces the platform is
evaluated on. Only read ratio and mean request sizes are known for them, so
streams drawn from these profiles share those statistics and nothing else
(burstiness in particular is not reproduced).
"""
from .data import SyntheticProfile
from .exceptions import UnknownProfileError

# name: (read ratio %, mean read KB, mean write KB)
_STATISTICS = {
    'src': (11.3, 8.1, 7.1),
    'DAP': (56.2, 62.1, 97.2),
    'MSNFS': (67.2, 9.6, 11.1),
    'mds': (92.8, 60.1, 13.8),
    'YCSB-A': (98.0, 9.5, 743.3),
    'Fuji-0': (82.7, 35.7, 10.7),
    'Fuji-1': (86.3, 32.7, 13.3),
    'Fuji-2': (87.6, 39.3, 6.7),
    'Tencent-0': (84.3, 31.2, 8.8),
    'Tencent-1': (2.0, 12.5, 289.5),
    'Tencent-2': (98.2, 47.0, 7.0),
    'Ali-0': (98.1, 37.0, 16.8),
    'Ali-1': (81.3, 370.4, 394.5),
    'Ali-2': (11.0, 26.0, 30.0),
}

PROFILES = {
    name: SyntheticProfile(name=name, read_ratio=read / 100, mean_read_kb=read_kb, mean_write_kb=write_kb)
    for name, (read, read_kb, write_kb) in _STATISTICS.items()
}


def get_profile(name, **overrides):
    """
    The named profile, with any field overridden (e.g. ``footprint``).
    """
    try:
        profile = PROFILES[name]
    except KeyError:
        raise UnknownProfileError(f'no workload profile named {name!r}') from None
    return profile.evolve(**overrides) if overrides else profile
