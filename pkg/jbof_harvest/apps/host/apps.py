"""
Initialization app for jbof_harvest.apps.host.
"""
from django.apps import AppConfig


class HostConfig(AppConfig):
    name = 'jbof_harvest.apps.host'
