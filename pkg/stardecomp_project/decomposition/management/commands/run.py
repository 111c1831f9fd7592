"""
Run the two-stage pipeline on a circuit and write its amplitudes and peaks.
"""
import csv
import json
import time
from pathlib import Path

from django.core.management.base import BaseCommand

from ...circuits import load_fixture
from ...exceptions import DecompositionError, DecompositionTimeout
from ...strategy import DIFFUSION_MODES, DRIVERS, run_pipeline
from ..errors import engine_errors, usage_error

EMIT_CHOICES = ('statevector', 'peaks', 'terms')
HISTOGRAM_WIDTH = 40


def bitstring(index, qubits):
    return format(index, f'0{qubits}b')


def write_statevector(result, qubits, path):
    amplitudes = result.statevector.to_complex()
    with path.open('w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['index', 'bitstring', 're', 'im', 'prob'])
        for index, (amplitude, prob) in enumerate(zip(amplitudes, result.probabilities)):
            writer.writerow([
                index, bitstring(index, qubits),
                f"{amplitude.real:.12g}", f"{amplitude.imag:.12g}", f"{prob:.12g}",
            ])


def peaks_document(result, qubits):
    return {
        'threshold': float(f"{result.threshold:.12g}"),
        'peaks': [
            {'bitstring': bitstring(i, qubits), 'prob': float(f"{result.probabilities[i]:.12g}")}
            for i in result.peaks
        ],
    }


def terms_lines(result):
    lines = [f"strategy: {result.strategy}", f"terminal_terms: {result.terminal_terms}"]
    lines += [f"{key}: {value}" for key, value in result.stats.items() if key != 'terms']
    lines += [f"time_{phase}: {seconds:.6f}" for phase, seconds in result.timings.items()]
    return lines


def histogram(result, qubits, top=10):
    order = sorted(range(len(result.probabilities)), key=lambda i: (-result.probabilities[i], i))[:top]
    largest = result.probabilities[order[0]] if order else 0.0
    lines = []
    for i in order:
        prob = result.probabilities[i]
        bar = '#' * (round(HISTOGRAM_WIDTH * prob / largest) if largest else 0)
        marker = '*' if i in result.peaks else ' '
        lines.append(f"{bitstring(i, qubits)} {marker} {prob:.12g} {bar}")
    return lines


class Command(BaseCommand):
    help = "Decompose a circuit (fixture name or JSON path), append the diffusion stage and report peaks."

    def add_arguments(self, parser):
        parser.add_argument('--circuit', required=True, help="Fixture name or path to a circuit JSON file")
        parser.add_argument('--strategy', choices=sorted(DRIVERS), default='weighted')
        parser.add_argument('--diffusion', choices=DIFFUSION_MODES, default='auto')
        parser.add_argument('--out', help="Directory for statevector.csv, peaks.json and terms.txt")
        parser.add_argument('--emit', default=','.join(EMIT_CHOICES), help="Comma-separated subset of outputs")
        parser.add_argument('--timeout', type=float, help="Seconds before the run is abandoned")
        parser.add_argument('--top', type=int, default=10, help="Rows in the printed histogram")
        parser.add_argument('--jobs', type=int, help="Processes for term expansion (default: EXPAND_JOBS)")
        parser.add_argument('--record', action='store_true', help="Store the outcome as a RunRecord")

    def handle(self, *args, **options):
        emit = [e.strip() for e in options['emit'].split(',') if e.strip()]
        unknown = sorted(set(emit) - set(EMIT_CHOICES))
        if unknown:
            raise usage_error(f"Unknown --emit values {unknown}; choose from {list(EMIT_CHOICES)}")
        if options['jobs'] is not None and options['jobs'] < 1:
            raise usage_error("--jobs must be at least 1")

        with engine_errors():
            circuit = load_fixture(options['circuit'])
        record = None
        if options['record']:
            from ...models import RunRecord

            record = RunRecord.objects.create(
                circuit_name=circuit.name or options['circuit'],
                qubits=circuit.qubits,
                strategy=options['strategy'],
                diffusion=options['diffusion'],
            )
        deadline = time.monotonic() + options['timeout'] if options['timeout'] else None
        try:
            with engine_errors():
                result = run_pipeline(
                    circuit, options['strategy'], options['diffusion'], deadline, options['jobs']
                )
        except Exception as exc:
            if record is not None:
                cause = exc.__cause__ if isinstance(exc.__cause__, DecompositionError) else exc
                record.mark_failed(str(cause), timed_out=isinstance(cause, DecompositionTimeout))
            raise
        if record is not None:
            record.mark_finished(result)

        n = circuit.qubits
        if options['out']:
            out = Path(options['out'])
            out.mkdir(parents=True, exist_ok=True)
            if 'statevector' in emit:
                write_statevector(result, n, out / 'statevector.csv')
            if 'peaks' in emit:
                (out / 'peaks.json').write_text(json.dumps(peaks_document(result, n), indent=2) + '\n')
            if 'terms' in emit:
                (out / 'terms.txt').write_text('\n'.join(terms_lines(result)) + '\n')

        for line in histogram(result, n, options['top']):
            self.stdout.write(line)
        self.stdout.write(self.style.SUCCESS(
            f"{circuit}: {result.terminal_terms} terminal terms, {result.peak_count} peaks "
            f"above {result.threshold:.12g}"
        ))
