import os
from os.path import abspath, dirname, join

from jbof_harvest.settings.utils import get_logger_config

# PATH vars
PROJECT_ROOT = join(abspath(dirname(__file__)), "..")
REPO_ROOT = join(PROJECT_ROOT, "..")


def root(*path_fragments):
    return join(abspath(PROJECT_ROOT), *path_fragments)


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('JBOF_HARVEST_SECRET_KEY', 'insecure-secret-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = False

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = (
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
)

THIRD_PARTY_APPS = (
    'rest_framework',
)

PROJECT_APPS = (
    'jbof_harvest.apps.core',
    'jbof_harvest.apps.engine',
    'jbof_harvest.apps.flash',
    'jbof_harvest.apps.fabric',
    'jbof_harvest.apps.ssd',
    'jbof_harvest.apps.harvest',
    'jbof_harvest.apps.host',
    'jbof_harvest.apps.workload',
    'jbof_harvest.apps.metrics',
    'jbof_harvest.apps.scenarios',
)

INSTALLED_APPS += THIRD_PARTY_APPS
INSTALLED_APPS += PROJECT_APPS

MIDDLEWARE = (
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
)

ROOT_URLCONF = 'jbof_harvest.urls'

# Database
# Set this value in the environment-specific files (e.g. local.py, production.py, test.py)
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.',
        'NAME': '',
        'USER': '',
        'PASSWORD': '',
        'HOST': '',  # Empty for localhost through domain sockets or '127.0.0.1' for localhost through TCP.
        'PORT': '',  # Set to empty string for default.
    }
}

# New DB primary keys default to an IntegerField.
DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

STATIC_ROOT = root('assets')
STATIC_URL = '/static/'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': (
                'django.contrib.auth.context_processors.auth',
                'django.template.context_processors.request',
                'django.contrib.messages.context_processors.messages',
            ),
        }
    },
]

# Set up logging for development use (logging to stdout)
LOGGING = get_logger_config(debug=DEBUG)


# Application settings
# .. setting_name: JBOF_HARVEST
# .. setting_description: Process-level knobs of the simulator. Experiment parameters live in scenario
#    YAML files, not here.
#    * `OUTPUT_ROOT`: directory under which runs write report.json / summary.csv when no --out is given.
#    * `PRESET_DIR`: directory holding the scenario preset YAML files.
#    * `LATENCY_SAMPLE_CAP`: per-device latency samples kept exactly before switching to a histogram.
#    * `SWEEP_PROCESSES`: worker processes used by sweep_scenarios; 0 means os.cpu_count().
#    * `REPORT_SCHEMA_VERSION`: version string stamped into every report.
JBOF_HARVEST = {
    'OUTPUT_ROOT': join(REPO_ROOT, 'runs'),
    'PRESET_DIR': join(REPO_ROOT, 'scenarios'),
    'LATENCY_SAMPLE_CAP': 2_000_000,
    'SWEEP_PROCESSES': 0,
    'REPORT_SCHEMA_VERSION': '1.0',
}
