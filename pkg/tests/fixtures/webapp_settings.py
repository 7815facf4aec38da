"""Deployment settings for the sample web application.

Values mirror a typical small deployment: one SQLite database, local cache,
console logging.  Secrets are read from the environment so this file can be
committed.
"""

import os

# ---------------------------------------------------------------------------
# Core paths and secrets
# ---------------------------------------------------------------------------

BASE_DIR = os.path.dirname(os.path.abspath(__file__))

SECRET_KEY = os.environ.get("APP_SECRET_KEY", "insecure-dev-key")

WSGI_APPLICATION = "webapp.wsgi.application"

ROOT_URLCONF = "webapp.urls"

# Hosts allowed to reach the application in production deployments; extend
# through the APP_ALLOWED_HOSTS environment variable when fronting a proxy.

ALLOWED_HOSTS = os.environ.get("APP_ALLOWED_HOSTS", "localhost").split(",")

DEBUG = bool(os.environ.get("APP_DEBUG", ""))

# ---------------------------------------------------------------------------
# Applications and middleware
# ---------------------------------------------------------------------------

INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    "webapp.accounts",
    "webapp.billing",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

TEMPLATE_DIRS = [os.path.join(BASE_DIR, "templates")]

STATIC_URL = "/static/"

STATIC_ROOT = os.path.join(BASE_DIR, "staticfiles")

# ---------------------------------------------------------------------------
# Database
# ---------------------------------------------------------------------------

DB_ENGINE = "django.db.backends.sqlite3"

DB_NAME = os.path.join(BASE_DIR, "app.db")

# Credentials only matter for the postgres deployment profile.
DB_USER = os.environ.get("APP_DB_USER", "webapp")

DATABASES = {
    "default": {
        "ENGINE": DB_ENGINE,
        "NAME": DB_NAME,
    }
}

DATABASE_ROUTERS = [
    "webapp.routing.PrimaryReplicaRouter",
]

# ---------------------------------------------------------------------------
# Internationalization
# ---------------------------------------------------------------------------

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True

# ---------------------------------------------------------------------------
# Caching and sessions
# ---------------------------------------------------------------------------

CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "TIMEOUT": 300,
    }
}

SESSION_ENGINE = "django.contrib.sessions.backends.cached_db"

SESSION_COOKIE_AGE = 1209600

CSRF_COOKIE_SECURE = True

SESSION_COOKIE_SECURE = True

# ---------------------------------------------------------------------------
# Email
# ---------------------------------------------------------------------------

EMAIL_BACKEND = "django.core.mail.backends.console.EmailBackend"

DEFAULT_FROM_EMAIL = "webapp@example.com"

SERVER_EMAIL = "errors@example.com"

EMAIL_TIMEOUT = 10

# ---------------------------------------------------------------------------
# Logging
# ---------------------------------------------------------------------------

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "INFO",
    },
}
