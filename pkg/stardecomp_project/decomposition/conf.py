"""
Engine settings lookup.

Values come from the ``STARDECOMP`` dict in Django settings; anything missing
falls back to the defaults below.
"""
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'ORACLE_WIRE_LIMIT': 22,
    'FULL_SIMPLIFY': False,
    'EXTRA_WEIGHT': 2,
    'EXPAND_JOBS': 1,
    'BENCH_SAMPLES': 50,
    'BENCH_TIMEOUT': 180.0,
    'BENCH_JOBS': 1,
    'BENCH_SEED_BASE': 0,
    'DISCOVERY_SNAP_MAX_K': 12,
    'DISCOVERY_RESIDUAL_TOL': 1e-10,
    'RULE_FIXTURE_DIR': None,
    'CIRCUIT_FIXTURE_DIR': None,
}


def engine_setting(name):
    """Return the configured value for ``name``, or its default."""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown engine setting: {name}")
    try:
        configured = getattr(settings, 'STARDECOMP', {})
    except ImproperlyConfigured:
        configured = {}
    return configured.get(name, DEFAULTS[name])
