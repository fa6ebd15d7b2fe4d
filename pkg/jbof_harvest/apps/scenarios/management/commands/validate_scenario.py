"""
Management command to validate a scenario without running it.
"""
import json

from django.core.management.base import BaseCommand, CommandError

from jbof_harvest.apps.scenarios.api import (
    apply_overrides,
    effective_config,
    expand_sweep,
    read_document,
    validate_document
)
from jbof_harvest.apps.scenarios.exceptions import ScenarioConfigError


class Command(BaseCommand):
    """
    Management command for checking a scenario file or preset. Every point of a
    sweep is checked.

    ./manage.py validate_scenario --config lender-failure --print
    """
    help = 'Validate a scenario and report field-level errors.'

    def add_arguments(self, parser):
        parser.add_argument('--config', dest='config', required=True, help='Scenario YAML file or preset name.')
        parser.add_argument(
            '--set',
            action='append',
            dest='assignments',
            default=[],
            metavar='PATH=VALUE',
            help='Override one field by dotted path. Repeatable.',
        )
        parser.add_argument(
            '--print',
            action='store_true',
            dest='print',
            help='Print the effective configuration of each point as JSON.',
        )

    def handle(self, *args, **options):
        failed = 0
        try:
            points = expand_sweep(apply_overrides(read_document(options['config']), options['assignments']))
        except ScenarioConfigError as exc:
            points = []
            failed = self._errors(exc)
        for point in points:
            try:
                scenario = validate_document(point)
            except ScenarioConfigError as exc:
                failed += self._errors(exc, prefix=point.get('name', ''))
                continue
            if options['print']:
                self.stdout.write(json.dumps(effective_config(scenario), indent=2, sort_keys=True))
        if failed:
            raise CommandError(f'{options["config"]}: {failed} invalid field(s)')
        self.stdout.write(f'{options["config"]}: {len(points)} scenario(s) valid')

    def _errors(self, exc, prefix=''):
        for path, message in sorted(exc.errors.items()):
            self.stderr.write(f'{prefix}{" " if prefix else ""}{path}: {message}')
        return len(exc.errors)
