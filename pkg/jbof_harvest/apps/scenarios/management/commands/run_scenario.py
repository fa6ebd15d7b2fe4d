"""
Management command to run one simulation scenario.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from jbof_harvest.apps.core.constants import Variant
from jbof_harvest.apps.core.exceptions import SimulationError
from jbof_harvest.apps.scenarios.api import load_scenario
from jbof_harvest.apps.scenarios.exceptions import ScenarioConfigError
from jbof_harvest.apps.scenarios.runner import execute

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    """
    Management command for running a scenario file or preset and writing its reports.

    ./manage.py run_scenario --config micro-read-64k --variant conv --seed 3 --out runs/a
    """
    help = 'Run one simulation scenario and write report.json and summary.csv.'

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            dest='config',
            required=True,
            help='Scenario YAML file, or the name of a preset.',
        )
        parser.add_argument(
            '--variant',
            dest='variant',
            choices=Variant.ALL,
            help='Platform variant, replacing the one in the scenario.',
        )
        parser.add_argument('--seed', dest='seed', type=int, help='Seed, replacing the one in the scenario.')
        parser.add_argument('--out', dest='out', help='Directory for the reports.')
        parser.add_argument('--trace', dest='trace', help='Trace file to replay.')
        parser.add_argument(
            '--duration',
            dest='duration',
            help='Simulated time to run, e.g. 200ms or 1.5s; a bare number is milliseconds.',
        )
        parser.add_argument(
            '--event-trace',
            action='store_true',
            dest='event_trace',
            help='Also write every dispatched event to events.log.',
        )
        parser.add_argument(
            '--set',
            action='append',
            dest='assignments',
            default=[],
            metavar='PATH=VALUE',
            help='Override one field by dotted path, e.g. hardware.ssd.geometry.channels=4. Repeatable.',
        )

    def handle(self, *args, **options):
        try:
            scenario = load_scenario(
                options['config'],
                options['assignments'],
                variant=options.get('variant'),
                seed=options.get('seed'),
                out=options.get('out'),
                trace=options.get('trace'),
                duration=options.get('duration'),
                event_trace=options.get('event_trace'),
            )
        except ScenarioConfigError as exc:
            for path, message in sorted(exc.errors.items()):
                self.stderr.write(f'{path}: {message}')
            raise CommandError(f'{options["config"]} does not validate') from exc

        try:
            run, outcome = execute(scenario)
        except SimulationError as exc:
            raise CommandError(f'simulation failed: {exc}') from exc
        logger.info(f'Run {run.uuid} of {scenario["name"] or options["config"]} succeeded')
        self.stdout.write(outcome.report_path)
        self.stdout.write(outcome.summary_path)
