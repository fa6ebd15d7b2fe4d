"""
Initialization app for jbof_harvest.apps.harvest.
"""
from django.apps import AppConfig


class HarvestConfig(AppConfig):
    name = 'jbof_harvest.apps.harvest'
