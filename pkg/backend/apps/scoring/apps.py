# apps/scoring/apps.py

from django.apps import AppConfig


class ScoringConfig(AppConfig):
    name = 'apps.scoring'
    verbose_name = 'Métricas de ajuste'
