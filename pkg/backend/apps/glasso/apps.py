# apps/glasso/apps.py

from django.apps import AppConfig


class GlassoConfig(AppConfig):
    name = 'apps.glasso'
    verbose_name = 'Lasso gráfico'
