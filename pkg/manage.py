#!/usr/bin/env python
"""
Runs jbof_harvest management commands, e.g. ``run_scenario`` and ``sweep_scenarios``.
"""
import os
import sys

PWD = os.path.abspath(os.path.dirname(__file__))

if __name__ == '__main__':
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'jbof_harvest.settings.local')
    sys.path.append(PWD)
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError('Django is not installed; run `pip install -r requirements.txt` first.') from exc
    execute_from_command_line(sys.argv)
