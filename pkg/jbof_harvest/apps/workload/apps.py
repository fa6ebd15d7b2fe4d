"""
Initialization app for jbof_harvest.apps.workload.
"""
from django.apps import AppConfig


class WorkloadConfig(AppConfig):
    name = 'jbof_harvest.apps.workload'
