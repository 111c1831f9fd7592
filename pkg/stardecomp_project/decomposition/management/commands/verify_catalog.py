"""
Check every shipped and generated decomposition rule against the tensor oracle.
"""
from django.core.management.base import BaseCommand, CommandError

from ...catalog import catalog_verify_all, generated_rules, load_catalog
from ..errors import EXIT_CATALOG, engine_errors


class Command(BaseCommand):
    help = "Verify every fixture and generated rule exactly; exits with status 4 if any rule fails."

    def add_arguments(self, parser):
        parser.add_argument('--rules', help="Rule fixture directory (default: the configured one)")

    def handle(self, *args, **options):
        with engine_errors():
            rules = [*load_catalog(options['rules']).values(), *generated_rules()]
            reports = catalog_verify_all(rules)
        for report in reports:
            status = 'ok' if report.passed else f"FAILED {report.message}"
            self.stdout.write(f"{report.rule_id:<18} terms={report.branches:<3} beta={report.scaling:.3f}  {status}")
        failed = [r.rule_id for r in reports if not r.passed]
        if failed:
            raise CommandError(f"{len(failed)} rule(s) failed: {', '.join(failed)}", returncode=EXIT_CATALOG)
        self.stdout.write(self.style.SUCCESS(f"All {len(reports)} rules verified"))
