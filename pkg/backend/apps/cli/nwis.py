# apps/cli/nwis.py
"""
Cliente de valores diários do NWIS (formato RDB, separado por tabulação)

Linhas de comentário começam com '#'; depois vêm o cabeçalho e uma linha de
formato (ex.: 5s 15s 20d 14n 10s), que é descartada. As colunas usadas são
agency_cd, site_no, datetime, valor e qualificador.
"""

import io
import logging
from datetime import date
from typing import Dict, Optional, Sequence

import pandas as pd
import requests
from django.conf import settings

from apps.core.exceptions import FetchError, InputError

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT = 'https://waterservices.usgs.gov/nwis/dv/'
DISCHARGE_PARAMETER = '00060'
MEAN_STATISTIC = '00003'
CFS_TO_CMS = 0.028316846592
PROVISIONAL_QUALIFIERS = ('P',)


def _options() -> Dict:
    return getattr(settings, 'GAUGENET', {})


def parse_rdb(text: str, site: str) -> pd.DataFrame:
    """
    Converte a resposta RDB num DataFrame com colunas
    agency, site, datetime, value, qualifier
    """
    lines = [line for line in text.splitlines() if line and not line.startswith('#')]
    if len(lines) < 2:
        raise FetchError(f"Resposta sem dados para o posto {site}")
    header = lines[0].split('\t')
    # segunda linha é o formato das colunas
    body = '\n'.join(lines[2:])
    if not body:
        raise FetchError(f"Posto {site} sem valores no período")
    frame = pd.read_csv(io.StringIO(body), sep='\t', header=None, names=header, dtype=str,
                        keep_default_na=False)
    value_columns = [c for c in header if DISCHARGE_PARAMETER in c and not c.endswith('_cd')]
    if len(header) < 5 or not value_columns:
        raise FetchError(f"Colunas inesperadas na resposta do posto {site}: {header}")
    value_col = value_columns[0]
    qualifier_col = f"{value_col}_cd" if f"{value_col}_cd" in header else header[4]
    frame = pd.DataFrame({
        'agency': frame[header[0]],
        'site': frame[header[1]],
        'datetime': pd.to_datetime(frame[header[2]], format='%Y-%m-%d', errors='coerce'),
        'value': pd.to_numeric(frame[value_col], errors='coerce'),
        'qualifier': frame[qualifier_col],
    })
    if frame['datetime'].isna().any():
        raise FetchError(f"Data inválida na resposta do posto {site}")
    provisional = frame['qualifier'].str.split(':').apply(
        lambda codes: any(code in PROVISIONAL_QUALIFIERS for code in codes)
    )
    if provisional.any():
        logger.warning(f"Posto {site}: {int(provisional.sum())} valores provisórios aceitos")
    return frame


class NwisClient:
    """Busca sequencial, um posto por requisição"""

    def __init__(self, endpoint: Optional[str] = None, timeout: Optional[float] = None,
                 session: Optional[requests.Session] = None):
        options = _options()
        self.endpoint = endpoint or options.get('NWIS_ENDPOINT') or DEFAULT_ENDPOINT
        self.timeout = timeout or options.get('HTTP_TIMEOUT', 60)
        self.session = session or requests.Session()

    def fetch_site(self, site: str, start: date, end: date) -> pd.DataFrame:
        params = {
            'format': 'rdb',
            'sites': site,
            'startDT': start.isoformat(),
            'endDT': end.isoformat(),
            'parameterCd': DISCHARGE_PARAMETER,
            'statCd': MEAN_STATISTIC,
            'siteStatus': 'all',
        }
        logger.info(f"Buscando posto {site} ({start} a {end})")
        try:
            response = self.session.get(self.endpoint, params=params, timeout=self.timeout)
            response.raise_for_status()
        except requests.RequestException as exc:
            raise FetchError(f"Falha HTTP ao buscar o posto {site}: {exc}")
        frame = parse_rdb(response.text, site)
        mask = (frame['datetime'].dt.date >= start) & (frame['datetime'].dt.date <= end)
        frame = frame[mask]
        if frame.empty:
            raise FetchError(f"Posto {site} sem valores entre {start} e {end}")
        return frame

    def fetch_panel(self, sites: Sequence[str], start: date, end: date) -> pd.DataFrame:
        """
        Painel em m³/s indexado por data, uma coluna por posto
        Valores ausentes ficam como NaN
        """
        if not sites:
            raise InputError("Lista de postos vazia")
        if end < start:
            raise InputError(f"Data final {end} anterior à inicial {start}")
        series = {}
        spans = {}
        for site in sites:
            frame = self.fetch_site(site, start, end)
            values = frame.set_index(frame['datetime'].dt.date)['value'] * CFS_TO_CMS
            series[site] = values[~values.index.duplicated(keep='first')]
            spans[site] = (values.index.min(), values.index.max())
        if len(set(spans.values())) > 1:
            detail = ', '.join(f"{s}: {a}..{b}" for s, (a, b) in spans.items())
            raise FetchError(f"Períodos desalinhados entre postos: {detail}")
        first, last = next(iter(spans.values()))
        index = pd.Index(pd.date_range(first, last, freq='D').date, name='date')
        panel = pd.DataFrame({site: series[site].reindex(index) for site in sites}, index=index)
        missing = int(panel.isna().sum().sum())
        if missing:
            logger.warning(f"{missing} valores ausentes no painel baixado")
        return panel


def panel_frame_csv(panel: pd.DataFrame) -> str:
    """CSV do painel; ausentes como células vazias"""
    frame = panel.copy()
    frame.index = [d.isoformat() for d in frame.index]
    frame.index.name = 'date'
    buffer = io.StringIO()
    frame.to_csv(buffer, na_rep='', lineterminator='\n', float_format='%.6g')
    return buffer.getvalue()
