# apps/glasso/__init__.py

default_app_config = 'apps.glasso.apps.GlassoConfig'
