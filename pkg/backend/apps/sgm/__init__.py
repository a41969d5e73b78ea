# apps/sgm/__init__.py

default_app_config = 'apps.sgm.apps.SgmAppConfig'
