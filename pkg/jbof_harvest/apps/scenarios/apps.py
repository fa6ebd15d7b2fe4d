"""
Initialization app for jbof_harvest.apps.scenarios.
"""
from django.apps import AppConfig


class ScenariosConfig(AppConfig):
    name = 'jbof_harvest.apps.scenarios'
    verbose_name = 'Simulation scenarios'
