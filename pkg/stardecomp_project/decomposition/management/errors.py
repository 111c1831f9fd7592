"""
Exit codes shared by the management commands.
"""
from contextlib import contextmanager

from django.core.management.base import CommandError

from ..exceptions import DecompositionError, FixtureFormatError

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_MALFORMED = 3
EXIT_CATALOG = 4


def usage_error(message):
    return CommandError(message, returncode=EXIT_USAGE)


@contextmanager
def engine_errors():
    """Turn engine exceptions into CommandError with the matching exit code."""
    try:
        yield
    except FixtureFormatError as exc:
        raise CommandError(str(exc), returncode=EXIT_MALFORMED) from exc
    except OSError as exc:
        raise CommandError(f"{exc.strerror or exc}: {exc.filename}", returncode=EXIT_MALFORMED) from exc
    except DecompositionError as exc:
        raise CommandError(f"{type(exc).__name__}: {exc}", returncode=EXIT_FAILURE) from exc
