"""
Initialization app for jbof_harvest.apps.metrics.
"""
from django.apps import AppConfig


class MetricsConfig(AppConfig):
    name = 'jbof_harvest.apps.metrics'
