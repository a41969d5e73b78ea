# apps/inference/__init__.py

default_app_config = 'apps.inference.apps.InferenceConfig'
