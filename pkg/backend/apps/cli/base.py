# apps/cli/base.py
"""
Base dos comandos de gerenciamento

Converte erros de domínio em CommandError com o código de saída:
2 para entrada inválida, 1 para falha de computação
"""

import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from apps.cli.runconfig import RunConfig, build_run_config
from apps.core.exceptions import GaugeNetworkError, GraphError, InputError
from apps.core.files import OutputSet, read_json, validated
from apps.dataset.panel import load_panel, split
from apps.graph.serializers import GaugeGraphSerializer

logger = logging.getLogger(__name__)

# flags que sobrescrevem campos do RunConfig
CONFIG_FLAGS = {
    'lambda_min': float,
    'lambda_max': float,
    'k_min': int,
    'k_max': int,
    'res': int,
    'gamma': float,
    'delta': float,
    'seed': int,
    'train_fraction_of_early': float,
    'approach': int,
    'policy': str,
    'on_missing': str,
    'log_offset': float,
    'workers': int,
    'panel': str,
    'coords': str,
    'output_dir': str,
}


class GaugeCommand(BaseCommand):
    """
    Subclasses declaram config_flags (os campos do RunConfig que aceitam)
    e implementam run(run_config, outputs, **options)
    """
    config_flags = ()

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Arquivo JSON de configuração')
        for name in self.config_flags:
            flag = '--' + name.replace('_', '-')
            parser.add_argument(flag, dest=name, type=CONFIG_FLAGS[name], default=None)
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def overrides(self, options) -> dict:
        return {name: options.get(name) for name in self.config_flags}

    def handle(self, *args, **options):
        try:
            run_config = build_run_config(options.get('config'), self.overrides(options))
            with OutputSet() as outputs:
                self.run(run_config, outputs, **options)
        except (InputError, serializers.ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
            raise CommandError(self._describe(exc), returncode=2)
        except GaugeNetworkError as exc:
            raise CommandError(str(exc), returncode=1)

    def run(self, run_config: RunConfig, outputs: OutputSet, **options):
        raise NotImplementedError

    @staticmethod
    def _describe(exc) -> str:
        if isinstance(exc, serializers.ValidationError):
            return f"Configuração inválida: {exc.detail}"
        if isinstance(exc, FileNotFoundError):
            return f"Arquivo não encontrado: {exc.filename}"
        return str(exc)

    # --------------------------------------------------------------
    # utilitários compartilhados
    # --------------------------------------------------------------

    def load_panel(self, run_config: RunConfig):
        if not run_config.panel:
            raise InputError("Informe o painel (--panel ou 'panel' no arquivo de configuração)")
        return load_panel(run_config.panel, on_missing=run_config.on_missing)

    def load_splits(self, run_config: RunConfig):
        panel = self.load_panel(run_config)
        return panel, split(panel, run_config.seed, run_config.train_fraction_of_early)

    def output_path(self, run_config: RunConfig, explicit, default_name: str) -> Path:
        if explicit:
            return Path(explicit)
        return Path(run_config.output_dir) / default_name

    def success(self, message: str):
        self.stdout.write(self.style.SUCCESS(message))

    def load_graph(self, path, panel=None):
        if not path:
            raise InputError("Informe o grafo (--graph)")
        graph = validated(GaugeGraphSerializer, read_json(path))
        if panel is not None and tuple(graph.gauge_ids) != tuple(panel.gauge_ids):
            raise GraphError(f"Postos do grafo {path} não coincidem com as colunas do painel")
        return graph
