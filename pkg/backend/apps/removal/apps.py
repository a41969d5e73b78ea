# apps/removal/apps.py

from django.apps import AppConfig


class RemovalConfig(AppConfig):
    name = 'apps.removal'
    verbose_name = 'Remoção de postos'
