"""
Initialization app for jbof_harvest.apps.fabric.
"""
from django.apps import AppConfig


class FabricConfig(AppConfig):
    name = 'jbof_harvest.apps.fabric'
