"""
jbof_harvest URL Configuration.

The simulator has no HTTP API; only the admin is routed, for browsing recorded runs.
"""
from django.contrib import admin
from django.urls import path

admin.autodiscover()

urlpatterns = [
    path('admin/', admin.site.urls),
]
