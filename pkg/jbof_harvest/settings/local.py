from jbof_harvest.settings.base import *

DEBUG = True

ALLOWED_HOSTS = ['localhost', '127.0.0.1']

# Recorded runs of local experiments.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': join(REPO_ROOT, 'runs.db'),
    }
}

# JBOF_HARVEST_DEBUG_LOGS=1 for app debug logs; add JBOF_HARVEST_TRACE_LOGS=1 for per-event ones.
LOGGING = get_logger_config(
    debug=bool(os.environ.get('JBOF_HARVEST_DEBUG_LOGS')),
    log_file=os.environ.get('JBOF_HARVEST_LOG_FILE'),
    trace_events=bool(os.environ.get('JBOF_HARVEST_TRACE_LOGS')),
)

JBOF_HARVEST = dict(JBOF_HARVEST)
JBOF_HARVEST.update({
    'SWEEP_PROCESSES': int(os.environ.get('JBOF_HARVEST_SWEEP_PROCESSES', 0)),
})
