"""
Write a seeded random MCT-dense circuit as JSON.
"""
from django.core.management.base import BaseCommand

from ...circuits import random_mct_dense, write_circuit
from ..errors import engine_errors


class Command(BaseCommand):
    help = "Generate a random MCT-dense circuit; the same arguments give byte-identical output."

    def add_arguments(self, parser):
        parser.add_argument('--qubits', type=int, required=True)
        parser.add_argument('--nots', type=int, default=0)
        parser.add_argument('--cnots', type=int, default=0)
        parser.add_argument('--mcts', type=int, default=0)
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--out', required=True, help="Output JSON file")

    def handle(self, *args, **options):
        with engine_errors():
            circuit = random_mct_dense(
                options['qubits'], options['nots'], options['cnots'], options['mcts'], options['seed']
            )
            write_circuit(circuit, options['out'])
        self.stdout.write(self.style.SUCCESS(f"Wrote {circuit} to {options['out']}"))
