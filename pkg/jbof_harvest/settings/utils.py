import sys
from os import environ

from django.core.exceptions import ImproperlyConfigured

# Apps that log once per event or command at DEBUG.
CHATTY_LOGGERS = (
    'jbof_harvest.apps.engine',
    'jbof_harvest.apps.flash',
    'jbof_harvest.apps.ssd',
    'jbof_harvest.apps.host',
)


def get_env_setting(setting):
    """ Get the environment setting or raise exception """
    try:
        return environ[setting]
    except KeyError as exc:
        raise ImproperlyConfigured(f'Set the [{setting}] env variable!') from exc


def get_logger_config(debug=False, log_file=None, trace_events=False):
    """
    Return the logging config dictionary for the LOGGING setting.

    ``debug`` lowers the simulator loggers to DEBUG, except the per-event ones
    named in ``CHATTY_LOGGERS``, which also need ``trace_events``. ``log_file``
    adds a file handler next to the console one.
    """
    level = 'DEBUG' if debug else 'INFO'
    handlers = {
        'console': {
            'level': level,
            'class': 'logging.StreamHandler',
            'formatter': 'standard',
            'stream': sys.stderr,
        },
    }
    if log_file:
        handlers['file'] = {
            'level': level,
            'class': 'logging.FileHandler',
            'formatter': 'standard',
            'filename': log_file,
            'encoding': 'utf-8',
        }
    names = list(handlers)

    loggers = {
        'django': {'handlers': names, 'propagate': False, 'level': 'INFO'},
        'factory': {'handlers': names, 'propagate': False, 'level': 'WARNING'},
        'jbof_harvest': {'handlers': names, 'propagate': False, 'level': level},
        '': {'handlers': names, 'level': 'WARNING'},
    }
    chatty_level = 'DEBUG' if debug and trace_events else 'INFO'
    for name in CHATTY_LOGGERS:
        loggers[name] = {'handlers': names, 'propagate': False, 'level': chatty_level}

    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'standard': {
                'format': '%(asctime)s %(levelname)s %(process)d [%(name)s] %(message)s',
            },
        },
        'handlers': handlers,
        'loggers': loggers,
    }
