"""
Initialization app for jbof_harvest.apps.flash.
"""
from django.apps import AppConfig


class FlashConfig(AppConfig):
    name = 'jbof_harvest.apps.flash'
