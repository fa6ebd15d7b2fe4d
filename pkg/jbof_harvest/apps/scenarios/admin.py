"""
Admin configuration for scenarios models.
"""
from django.contrib import admin

from .models import SimulationRun


@admin.register(SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    """
    Read-only browsing of recorded runs.
    """
    list_display = ('name', 'variant', 'seed', 'status', 'created')
    list_filter = ('variant', 'status')
    search_fields = ('name', 'uuid')
    readonly_fields = [field.name for field in SimulationRun._meta.fields]

    def has_add_permission(self, request):
        return False

    def has_change_permission(self, request, obj=None):
        return False
