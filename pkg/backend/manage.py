#!/usr/bin/env python
"""
Ponto de entrada do gaugenet

    python manage.py synthesize_panel --p 6 --n 1200 --seed 1
    python manage.py select_graph --panel panel.csv --policy edges=8
    python manage.py help   # lista os demais comandos
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Django não encontrado. Instale as dependências de backend/requirements.txt "
            "no ambiente virtual ativo."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
