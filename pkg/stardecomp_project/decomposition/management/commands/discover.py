"""
Anneal for a stabilizer decomposition of a star state and emit it as a rule fixture.
"""
from pathlib import Path

from django.core.management.base import BaseCommand

from ...discovery import (
    MAX_LIBRARY_QUBITS,
    AnnealSchedule,
    certificate,
    enumerate_stabilizers,
    load_schedule,
    run_chains,
    star_state_target,
)
from ..errors import engine_errors, usage_error


def parse_target(text):
    """``LEGS:PHASE`` with the phase in units of π/4, e.g. ``3:0`` or ``3:2``."""
    try:
        legs, phase = (int(part) for part in text.split(':'))
    except ValueError:
        raise usage_error(f"--target must look like LEGS:PHASE, got {text!r}") from None
    if not 1 <= legs <= MAX_LIBRARY_QUBITS:
        raise usage_error(f"--target legs must be in 1..{MAX_LIBRARY_QUBITS}")
    return legs, phase % 8


class Command(BaseCommand):
    help = "Search for a K-term stabilizer decomposition of a star state by simulated annealing."

    def add_arguments(self, parser):
        parser.add_argument('--target', required=True, help="Star state as LEGS:PHASE (phase in units of π/4)")
        parser.add_argument('--terms', type=int, required=True)
        parser.add_argument('--seed', type=int, help="Overrides the schedule seed")
        parser.add_argument('--schedule', help="YAML annealing schedule")
        parser.add_argument('--chains', type=int, default=1, help="Independent chains with consecutive seeds")
        parser.add_argument('--jobs', type=int, default=1)
        parser.add_argument('--real-only', action='store_true', help="Search the real stabilizer states only")
        parser.add_argument('--out', help="Certificate file (rule fixture format)")

    def handle(self, *args, **options):
        legs, phase = parse_target(options['target'])
        if options['terms'] < 1 or options['chains'] < 1 or options['jobs'] < 1:
            raise usage_error("--terms, --chains and --jobs must be positive")
        with engine_errors():
            schedule = load_schedule(options['schedule']) if options['schedule'] else AnnealSchedule()
            if options['seed'] is not None:
                schedule = schedule.with_seed(options['seed'])
            library = enumerate_stabilizers(legs, options['real_only'])
            target = star_state_target(legs, phase)
            found = run_chains(target, options['terms'], schedule, library, options['chains'], options['jobs'])
            if found is None:
                self.stdout.write('none')
                return
            rule_id = f"discovered_{legs}_{phase}_{found.terms}"
            text = certificate(rule_id, legs, phase, library, found)
        coefficients = ', '.join(str(c) for c in found.coefficients)
        self.stdout.write(f"found {found.terms} terms (seed {found.seed}): {coefficients}")
        if options['out']:
            Path(options['out']).write_text(text)
            self.stdout.write(self.style.SUCCESS(f"Certificate written to {options['out']}"))
        else:
            self.stdout.write(text)
