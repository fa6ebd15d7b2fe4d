"""
Management command to run every point of a sweep preset.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from jbof_harvest.apps.scenarios.api import (
    apply_overrides,
    apply_run_options,
    expand_sweep,
    read_document,
    validate_document
)
from jbof_harvest.apps.scenarios.constants import RunStatus
from jbof_harvest.apps.scenarios.exceptions import ScenarioConfigError
from jbof_harvest.apps.scenarios.runner import run_sweep

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    """
    Management command for running a sweep, several points in parallel.

    ./manage.py sweep_scenarios --preset cores-ratio --processes 8
    """
    help = 'Run every point of a sweep scenario and record each run.'

    def add_arguments(self, parser):
        parser.add_argument('--preset', dest='preset', required=True, help='Sweep YAML file or preset name.')
        parser.add_argument('--seed', dest='seed', type=int, help='Seed for every point.')
        parser.add_argument('--out', dest='out', help='Directory under which each point writes its reports.')
        parser.add_argument('--duration', dest='duration', help='Simulated time of every point.')
        parser.add_argument(
            '--processes',
            dest='processes',
            type=int,
            help='Worker processes; defaults to the SWEEP_PROCESSES setting.',
        )
        parser.add_argument(
            '--set',
            action='append',
            dest='assignments',
            default=[],
            metavar='PATH=VALUE',
            help='Override one field of every point by dotted path. Repeatable.',
        )

    def handle(self, *args, **options):
        try:
            document = apply_run_options(
                apply_overrides(read_document(options['preset']), options['assignments']),
                seed=options.get('seed'),
                out=options.get('out'),
                duration=options.get('duration'),
            )
            scenarios = [validate_document(point) for point in expand_sweep(document)]
        except ScenarioConfigError as exc:
            for path, message in sorted(exc.errors.items()):
                self.stderr.write(f'{path}: {message}')
            raise CommandError(f'{options["preset"]} does not validate') from exc

        logger.info(f'Sweeping {len(scenarios)} points of {options["preset"]}')
        runs = run_sweep(scenarios, processes=options.get('processes'))
        for run in runs:
            self.stdout.write(f'{run.status:10} {run.name} {run.output_dir}')
        failed = [run for run in runs if run.status == RunStatus.FAILED]
        if failed:
            raise CommandError(f'{len(failed)} of {len(runs)} sweep points failed')
