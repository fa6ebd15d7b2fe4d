"""
Models for the scenarios app.
"""
from uuid import uuid4

from django.db import models
from model_utils.models import TimeStampedModel

from jbof_harvest.apps.core.constants import Variant

from .constants import RunStatus


class SimulationRun(TimeStampedModel):
    """
    One simulation run: what was asked for and how it ended.

    .. no_pii:
    """
    uuid = models.UUIDField(primary_key=True, default=uuid4, editable=False)
    name = models.CharField(max_length=255, blank=True, help_text='Scenario name, with the sweep point if any.')
    variant = models.CharField(max_length=16, choices=Variant.CHOICES)
    seed = models.PositiveIntegerField(default=0)
    status = models.CharField(max_length=16, choices=RunStatus.CHOICES, default=RunStatus.PENDING, db_index=True)
    config = models.JSONField(default=dict, help_text='Effective scenario configuration, defaults resolved.')
    summary = models.JSONField(default=dict, blank=True, help_text='Headline metrics of a finished run.')
    output_dir = models.CharField(max_length=1024, blank=True)
    error = models.TextField(blank=True)

    class Meta:
        """
        Metaclass for SimulationRun.
        """
        ordering = ['-created']

    def __str__(self):
        return f'<SimulationRun {self.name or self.uuid} {self.variant} seed={self.seed} {self.status}>'

    def mark_running(self):
        self.status = RunStatus.RUNNING
        self.save(update_fields=['status', 'modified'])

    def mark_succeeded(self, outcome):
        self.status = RunStatus.SUCCEEDED
        self.summary = outcome.summary
        self.output_dir = outcome.output_dir
        self.save(update_fields=['status', 'summary', 'output_dir', 'modified'])

    def mark_failed(self, error):
        self.status = RunStatus.FAILED
        self.error = str(error)
        self.save(update_fields=['status', 'error', 'modified'])
