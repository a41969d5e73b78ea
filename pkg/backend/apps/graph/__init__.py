# apps/graph/__init__.py

default_app_config = 'apps.graph.apps.GraphConfig'
