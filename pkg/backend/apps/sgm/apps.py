# apps/sgm/apps.py

from django.apps import AppConfig


class SgmAppConfig(AppConfig):
    name = 'apps.sgm'
    verbose_name = 'Seleção multiobjetivo do grafo'
