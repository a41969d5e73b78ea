# apps/sgm/plots.py
"""
Saídas gráficas da amostragem: CSV de dispersão e SVG simples
(arestas × erro de validação, frente destacada)
"""

import io
from typing import Sequence
from xml.etree import ElementTree
from xml.sax.saxutils import escape

import pandas as pd

from apps.core.exceptions import GaugeNetworkError
from apps.sgm.pareto import ParetoFront, dominated_flags
from apps.sgm.selection import CandidatePoint

SCATTER_COLUMNS = ['edge_count', 'error_val', 'lambda', 'tau', 'dominated']
SVG_ROOT = '{http://www.w3.org/2000/svg}svg'

WIDTH, HEIGHT = 640, 420
MARGIN = 56


def scatter_frame(points: Sequence[CandidatePoint], front: ParetoFront) -> pd.DataFrame:
    flags = dominated_flags(points, front)
    return pd.DataFrame(
        {
            'edge_count': [pt.edge_count for pt in points],
            'error_val': [pt.error_val for pt in points],
            'lambda': [pt.lam for pt in points],
            'tau': [pt.tau for pt in points],
            'dominated': [str(flag).lower() for flag in flags],
        },
        columns=SCATTER_COLUMNS,
    )


def scatter_csv(points: Sequence[CandidatePoint], front: ParetoFront) -> str:
    buffer = io.StringIO()
    scatter_frame(points, front).to_csv(buffer, index=False, lineterminator='\n', float_format='%.10g')
    return buffer.getvalue()


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def scatter_svg(points: Sequence[CandidatePoint], front: ParetoFront, title: str = 'Erro de validação') -> str:
    max_edges = max(max(pt.edge_count for pt in points), 1)
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN

    def x(edges):
        return MARGIN + plot_w * edges / max_edges

    def y(error):
        return HEIGHT - MARGIN - plot_h * error

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<title>{escape(title)}</title>',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
    ]
    for tick in range(0, 6):
        value = tick / 5
        parts.append(
            f'<text x="{MARGIN - 8}" y="{_fmt(y(value) + 4)}" font-size="11" text-anchor="end">{value:.1f}</text>'
        )
        edges = round(max_edges * value)
        parts.append(
            f'<text x="{_fmt(x(edges))}" y="{HEIGHT - MARGIN + 16}" font-size="11" text-anchor="middle">{edges}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" font-size="12" text-anchor="middle">Número de arestas</text>'
    )
    parts.append(
        f'<text x="16" y="{HEIGHT / 2:.0f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {HEIGHT / 2:.0f})">Erro de validação</text>'
    )
    for pt in points:
        parts.append(f'<circle cx="{_fmt(x(pt.edge_count))}" cy="{_fmt(y(pt.error_val))}" r="2" fill="#9e9e9e"/>')
    polyline = ' '.join(f'{_fmt(x(pt.edge_count))},{_fmt(y(pt.error_val))}' for pt in front.points)
    parts.append(f'<polyline points="{polyline}" fill="none" stroke="#d32f2f" stroke-width="1.5"/>')
    for pt in front.points:
        parts.append(f'<circle cx="{_fmt(x(pt.edge_count))}" cy="{_fmt(y(pt.error_val))}" r="3" fill="#d32f2f"/>')
    parts.append('</svg>')
    return '\n'.join(parts) + '\n'


def load_scatter_csv(path) -> pd.DataFrame:
    """Relê o CSV de dispersão e confere colunas e flags"""
    frame = pd.read_csv(path, dtype={'dominated': str})
    if list(frame.columns) != SCATTER_COLUMNS:
        raise GaugeNetworkError(f"Colunas inesperadas no CSV de dispersão: {list(frame.columns)}")
    if not frame['dominated'].isin(['true', 'false']).all():
        raise GaugeNetworkError("Coluna dominated deve conter apenas true/false")
    if frame[['edge_count', 'error_val', 'lambda', 'tau']].isna().any().any():
        raise GaugeNetworkError("Valor ausente no CSV de dispersão")
    return frame


def check_svg(path) -> ElementTree.Element:
    root = ElementTree.parse(path).getroot()
    if root.tag != SVG_ROOT:
        raise GaugeNetworkError(f"Raiz do SVG inesperada: {root.tag}")
    return root
