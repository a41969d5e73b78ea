# apps/cli/__init__.py

default_app_config = 'apps.cli.apps.CliConfig'
