"""
Initialization app for jbof_harvest.apps.ssd.
"""
from django.apps import AppConfig


class SsdConfig(AppConfig):
    name = 'jbof_harvest.apps.ssd'
