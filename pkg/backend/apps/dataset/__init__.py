# apps/dataset/__init__.py

default_app_config = 'apps.dataset.apps.DatasetConfig'
