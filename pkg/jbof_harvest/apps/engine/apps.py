"""
Initialization app for jbof_harvest.apps.engine.
"""
from django.apps import AppConfig


class EngineConfig(AppConfig):
    name = 'jbof_harvest.apps.engine'
