"""
Running one validated scenario: build the platform, bind the workloads, inject
failures, simulate and write the reports.
"""
import logging
import multiprocessing
import os

import attr
from django.conf import settings
from edx_django_utils.monitoring import function_trace, set_custom_attribute

from jbof_harvest.apps.core.constants import KB, MS
from jbof_harvest.apps.core.exceptions import SimulationError
from jbof_harvest.apps.metrics.collector import MetricsCollector
from jbof_harvest.apps.metrics.report import build_report, write_report
from jbof_harvest.apps.workload.drivers import MicrobenchDriver, ProfileDriver, TraceReplayDriver
from jbof_harvest.apps.workload.profiles import get_profile
from jbof_harvest.apps.workload.traces import load_trace

from .api import default_output_dir, effective_config
from .constants import FAILURE_ACTOR, REPORT_FILE, SUMMARY_FILE, TRACE_DRAIN_NS, TRACE_FILE, WorkloadMode
from .models import SimulationRun
from .platform import build_platform

logger = logging.getLogger(__name__)


def ms_to_ns(value):
    return int(round(value * MS))


@attr.s(frozen=True)
class ScenarioOutcome:
    """
    What a finished run left behind.
    """
    name = attr.ib(type=str)
    variant = attr.ib(type=str)
    seed = attr.ib(type=int)
    output_dir = attr.ib(type=str)
    report_path = attr.ib(type=str)
    summary_path = attr.ib(type=str)
    report = attr.ib(repr=False)

    @property
    def summary(self):
        """
        The headline numbers kept with the run record.
        """
        aggregate = self.report['aggregate']
        return {
            'completed': aggregate['completed'],
            'errors': aggregate['errors'],
            'throughput_bps': aggregate['throughput_bps'],
            'iops': aggregate['iops'],
            'mean_latency_ns': aggregate['latency']['mean_ns'],
            'p99_latency_ns': aggregate['latency']['p99_ns'],
            'processor_utilization': aggregate['processor_utilization'],
            'energy_j': aggregate['energy_j']['total'],
            'dispatched': self.report['dispatch']['dispatched'],
        }


class FailureInjector:
    """
    Fails SSDs at their scheduled simulated times.
    """

    def __init__(self, platform, failures):
        self.platform = platform
        self.id = FAILURE_ACTOR
        self.fired = []
        platform.engine.register(self.id, self)
        for failure in failures:
            platform.engine.schedule_at(
                ms_to_ns(failure['at_ms']), self.id, 'fail', failure['device'], failure['kind'],
            )

    def on_fail(self, device_id, kind):
        logger.info('[scenario] %s: failing %s at %s ns', kind, device_id, self.platform.engine.now)
        self.platform.fail(device_id)
        self.fired.append({'device': device_id, 'kind': kind, 'time_ns': self.platform.engine.now})


def bind_workloads(platform, workloads):
    """
    Create the drivers of every workload entry. Returns the drivers and the time
    the last trace record is due (0 without traces).
    """
    drivers = []
    trace_end = 0
    for index, workload in enumerate(workloads):
        name = workload['name'] or f'w{index}'
        window = {
            'start_ns': ms_to_ns(workload['start_ms']),
            'stop_ns': ms_to_ns(workload['stop_ms']) if workload['stop_ms'] is not None else None,
        }
        mode = workload['mode']
        if mode == WorkloadMode.TRACE:
            log = load_trace(workload['path'])
            driver = TraceReplayDriver(
                platform.engine, platform.host, log, devices=workload['device_map'], name=name, **window,
            )
            drivers.append(driver)
            if log.records:
                trace_end = max(trace_end, driver.start_ns + log.records[-1].timestamp_ns)
            continue
        for device_id in workload['devices']:
            driver_name = f'{name}.{device_id}'
            if mode == WorkloadMode.MICROBENCH:
                driver = MicrobenchDriver(
                    platform.engine, platform.host, device_id, workload['pattern'], workload['op'],
                    workload['size_kb'] * KB, iodepth=workload['iodepth'], name=driver_name, **window,
                )
            else:
                profile = get_profile(workload['profile'], **workload['profile_overrides'])
                driver = ProfileDriver(
                    platform.engine, platform.host, device_id, profile, iodepth=workload['iodepth'],
                    name=driver_name, **window,
                )
            drivers.append(driver)
    return drivers, trace_end


def simulate(scenario, output_dir=None):
    """
    Run ``scenario`` (validated) to completion and write its reports.

    ``InvariantViolation`` propagates: a run that broke an invariant leaves no
    report behind.
    """
    options = settings.JBOF_HARVEST
    hardware = scenario['hardware']
    output_dir = output_dir or scenario['output'] or default_output_dir(scenario)
    collector = MetricsCollector(sample_cap=options['LATENCY_SAMPLE_CAP'])
    platform = build_platform(
        scenario['variant'],
        ssd_count=scenario['ssd_count'],
        ssd_config=hardware['ssd'],
        host_config=hardware['host'],
        fabric_config=hardware['fabric'],
        policy=hardware['policy'],
        seed=scenario['seed'],
        collector=collector,
        device_configs=hardware['devices'],
    )
    drivers, trace_end = bind_workloads(platform, scenario['workloads'])
    injector = FailureInjector(platform, scenario['failures'])
    if scenario['duration_ms'] is not None:
        duration_ns = ms_to_ns(scenario['duration_ms'])
    else:
        duration_ns = trace_end + TRACE_DRAIN_NS

    os.makedirs(output_dir, exist_ok=True)
    events = open(os.path.join(output_dir, TRACE_FILE), 'w', encoding='utf-8') if scenario['event_trace'] else None
    logger.info(
        '[scenario] running %s: %s, %s SSDs, seed %s, %s ns',
        scenario['name'] or '(unnamed)', scenario['variant'], scenario['ssd_count'], scenario['seed'], duration_ns,
    )
    try:
        if events is not None:
            platform.engine.trace_to(events)
        platform.start()
        for driver in drivers:
            driver.start()
        with function_trace('jbof_harvest.simulate'):
            platform.engine.run_until(duration_ns)
    finally:
        if events is not None:
            events.close()
    platform.engine.check_conservation()

    report = build_report(
        platform, collector, duration_ns,
        name=scenario['name'],
        seed=scenario['seed'],
        config=effective_config(scenario),
        drivers=drivers,
        failures=injector.fired,
        schema_version=options['REPORT_SCHEMA_VERSION'],
    )
    report_path, summary_path = write_report(report, output_dir, REPORT_FILE, SUMMARY_FILE)
    set_custom_attribute('jbof_variant', scenario['variant'])
    set_custom_attribute('jbof_seed', scenario['seed'])
    set_custom_attribute('jbof_dispatched', report['dispatch']['dispatched'])
    logger.info('[scenario] run %s finished, reports in %s', scenario['name'] or '(unnamed)', output_dir)
    return ScenarioOutcome(
        name=scenario['name'],
        variant=scenario['variant'],
        seed=scenario['seed'],
        output_dir=output_dir,
        report_path=report_path,
        summary_path=summary_path,
        report=report,
    )


def execute(scenario, output_dir=None):
    """
    Simulate ``scenario`` and keep a ``SimulationRun`` record of it. Returns the
    record and the outcome; simulation errors are recorded, then re-raised.
    """
    run = SimulationRun.objects.create(
        name=scenario['name'],
        variant=scenario['variant'],
        seed=scenario['seed'],
        config=effective_config(scenario),
    )
    run.mark_running()
    try:
        outcome = simulate(scenario, output_dir=output_dir)
    except SimulationError as exc:
        logger.exception('[scenario] run %s failed', run.uuid)
        run.mark_failed(exc)
        raise
    run.mark_succeeded(outcome)
    return run, outcome


def _simulate_point(scenario):
    try:
        return simulate(scenario), None
    except SimulationError as exc:
        logger.exception('[scenario] sweep point %s failed', scenario['name'])
        return None, f'{type(exc).__name__}: {exc}'


def run_sweep(scenarios, processes=None):
    """
    Simulate every scenario of a sweep, ``processes`` at a time. Worker
    processes only simulate; this process keeps the run records.

    Returns the ``SimulationRun`` records in sweep order.
    """
    processes = processes or settings.JBOF_HARVEST['SWEEP_PROCESSES'] or os.cpu_count() or 1
    runs = [
        SimulationRun.objects.create(
            name=scenario['name'], variant=scenario['variant'], seed=scenario['seed'],
            config=effective_config(scenario),
        )
        for scenario in scenarios
    ]
    for run in runs:
        run.mark_running()
    logger.info('[scenario] sweeping %s points over %s processes', len(scenarios), processes)
    if processes == 1 or len(scenarios) == 1:
        results = map(_simulate_point, scenarios)
        _record(runs, results)
    else:
        with multiprocessing.Pool(min(processes, len(scenarios))) as pool:
            _record(runs, pool.imap(_simulate_point, scenarios))
    return runs


def _record(runs, results):
    for run, (outcome, error) in zip(runs, results):
        if outcome is None:
            run.mark_failed(error)
        else:
            run.mark_succeeded(outcome)
