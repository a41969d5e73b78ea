# apps/removal/__init__.py

default_app_config = 'apps.removal.apps.RemovalConfig'
