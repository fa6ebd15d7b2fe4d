"""
Initialization app for jbof_harvest.apps.core.
"""
from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = 'jbof_harvest.apps.core'
