# apps/scoring/__init__.py

default_app_config = 'apps.scoring.apps.ScoringConfig'
