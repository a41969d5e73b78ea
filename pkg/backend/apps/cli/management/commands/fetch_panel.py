# apps/cli/management/commands/fetch_panel.py

from dateutil import parser as date_parser

from apps.cli.base import GaugeCommand
from apps.cli.nwis import NwisClient, panel_frame_csv
from apps.core.exceptions import InputError
from apps.dataset.panel import load_panel


def _date(text):
    return date_parser.isoparse(text).date()


class Command(GaugeCommand):
    help = 'Baixa vazões médias diárias do NWIS e grava o CSV do painel'
    config_flags = ('on_missing', 'output_dir')

    def add_command_arguments(self, parser):
        parser.add_argument('--sites', default='', help='Códigos dos postos, separados por vírgula')
        parser.add_argument('--sites-file', help='Arquivo com um código de posto por linha')
        parser.add_argument('--start', type=_date, required=True, help='Data inicial (AAAA-MM-DD)')
        parser.add_argument('--end', type=_date, required=True, help='Data final (AAAA-MM-DD)')
        parser.add_argument('--endpoint', help='URL do serviço de valores diários')
        parser.add_argument('--out', help='CSV do painel (padrão: panel.csv)')

    def run(self, run_config, outputs, **options):
        sites = [s.strip() for s in options['sites'].split(',') if s.strip()]
        if options.get('sites_file'):
            with open(options['sites_file'], encoding='utf-8') as handle:
                sites += [line.strip() for line in handle if line.strip() and not line.startswith('#')]
        if not sites:
            raise InputError("Nenhum posto informado (--sites ou --sites-file)")

        client = NwisClient(endpoint=options.get('endpoint'))
        frame = client.fetch_panel(sites, options['start'], options['end'])
        path = outputs.write_text(
            self.output_path(run_config, options.get('out'), 'panel.csv'),
            panel_frame_csv(frame),
            check=lambda written: load_panel(written, on_missing=run_config.on_missing),
        )
        self.success(f"Painel {frame.shape[0]}×{frame.shape[1]} gravado em {path}")
