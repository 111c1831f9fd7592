"""
Run a benchmark grid and write bench.csv and aggregate.json.
"""
from pathlib import Path

from django.core.management.base import BaseCommand

from ...bench import (
    AGGREGATE_NAME,
    CSV_NAME,
    aggregate,
    bench_run,
    load_bench_config,
    read_rows,
    record_rows,
    write_aggregate,
    write_rows,
)
from ..errors import engine_errors, usage_error


class Command(BaseCommand):
    help = "Benchmark the decomposition strategies on random MCT-dense circuits."

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help="YAML bench config")
        parser.add_argument('--jobs', type=int, help="Worker processes (default: BENCH_JOBS)")
        parser.add_argument('--out', required=True, help="Output directory")
        parser.add_argument('--record', action='store_true', help="Also store rows as BenchRecord objects")

    def handle(self, *args, **options):
        if options['jobs'] is not None and options['jobs'] < 1:
            raise usage_error("--jobs must be at least 1")
        out = Path(options['out'])
        with engine_errors():
            cfg = load_bench_config(options['config'])
            out.mkdir(parents=True, exist_ok=True)
            rows = bench_run(cfg, jobs=options['jobs'])
            write_rows(rows, out / CSV_NAME)
            # the report covers every row in the file, earlier runs included
            report = aggregate(read_rows(out / CSV_NAME))
            write_aggregate(report, out / AGGREGATE_NAME)
        if options['record']:
            record_rows(rows)
        timeouts = sum(1 for r in rows if r.timed_out)
        self.stdout.write(self.style.SUCCESS(
            f"{len(rows)} attempts ({timeouts} timed out) over {len(report)} cells written to {out}"
        ))
