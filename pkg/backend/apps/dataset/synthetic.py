# apps/dataset/synthetic.py
"""
Redes sintéticas com grafo conhecido
Servem de oráculo para os testes de recuperação do grafo e de comparação
entre métodos de seleção de doadores
"""

import logging
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import linalg

from apps.core.exceptions import GraphError, InputError, NotPositiveDefiniteError
from apps.dataset.panel import StreamflowPanel, date_range
from apps.graph.network import GaugeCoords, GaugeGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticSpec:
    """
    Parâmetros da rede sintética

    true_edges: lista de pares (i, j); se None, cada par entra com
    probabilidade edge_probability
    """
    p: int
    n: int
    true_edges: Optional[Sequence[Tuple[int, int]]] = None
    edge_probability: float = 0.2
    precision_offdiag_magnitude: float = 1.0
    seed: int = 0
    mu_range: Tuple[float, float] = (4.0, 6.0)
    sigma_range: Tuple[float, float] = (0.3, 0.8)
    diagonal_margin: float = 0.1
    start: date = date(1951, 1, 1)

    def __post_init__(self):
        if self.p < 1 or self.n < 1:
            raise InputError(f"p e n devem ser positivos (p={self.p}, n={self.n})")
        if not self.diagonal_margin > 0:
            raise InputError(f"Margem da diagonal deve ser positiva (recebido {self.diagonal_margin})")
        if not self.precision_offdiag_magnitude >= 0:
            raise InputError(f"Magnitude deve ser não negativa (recebido {self.precision_offdiag_magnitude})")


def _draw_edges(spec: SyntheticSpec, rng) -> Tuple[Tuple[int, int], ...]:
    if spec.true_edges is not None:
        for i, j in spec.true_edges:
            if i == j or not (0 <= i < spec.p and 0 <= j < spec.p):
                raise GraphError(f"Aresta verdadeira inválida ({i},{j}) para p={spec.p}")
        return tuple(sorted({(min(i, j), max(i, j)) for i, j in spec.true_edges}))
    edges = []
    for i in range(spec.p):
        for j in range(i + 1, spec.p):
            if rng.random() < spec.edge_probability:
                edges.append((i, j))
    return tuple(edges)


def true_precision(spec: SyntheticSpec, edges) -> np.ndarray:
    """
    Θ com −magnitude nas arestas (correlação parcial positiva) e diagonal
    dominante: θ_ii = Σ_j |θ_ij| + margem
    """
    theta = np.zeros((spec.p, spec.p))
    for i, j in edges:
        theta[i, j] = theta[j, i] = -spec.precision_offdiag_magnitude
    theta[np.diag_indices(spec.p)] = np.abs(theta).sum(axis=1) + spec.diagonal_margin
    return theta


def generate_synthetic_panel(spec: SyntheticSpec):
    """
    Amostra n dias de N(0, Θ⁻¹) e leva para vazão por q = exp(z·σ + μ) − 1

    Returns:
        (StreamflowPanel, GaugeGraph verdadeiro)
    """
    rng = np.random.default_rng(spec.seed)
    edges = _draw_edges(spec, rng)
    theta = true_precision(spec, edges)
    try:
        covariance = linalg.inv(theta)
        factor = linalg.cholesky(covariance, lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"Θ sintética não é SPD: {exc}")

    z = rng.standard_normal((spec.n, spec.p)) @ factor.T
    mu = rng.uniform(*spec.mu_range, size=spec.p)
    sigma = rng.uniform(*spec.sigma_range, size=spec.p)
    q = np.maximum(np.exp(z * sigma + mu) - 1.0, 0.0)

    gauge_ids = tuple(f"G{j:03d}" for j in range(spec.p))
    dates = date_range(spec.start, spec.start + timedelta(days=spec.n - 1))
    panel = StreamflowPanel(dates=tuple(dates), gauge_ids=gauge_ids, q=q)
    graph = GaugeGraph(p=spec.p, edges=frozenset(edges), gauge_ids=gauge_ids)
    logger.info(f"Rede sintética: p={spec.p}, n={spec.n}, {graph.edge_count} arestas verdadeiras")
    return panel, graph


def generate_synthetic_coords(graph: GaugeGraph, seed: int = 0,
                              center: Tuple[float, float] = (38.5, -83.0),
                              span_degrees: float = 2.0) -> GaugeCoords:
    """
    Coordenadas plantadas: layout de molas do grafo verdadeiro, de modo que
    vizinhos no grafo tendem a ficar próximos no mapa
    """
    nx_graph = nx.Graph()
    nx_graph.add_nodes_from(range(graph.p))
    nx_graph.add_edges_from(graph.edges)
    layout = nx.spring_layout(nx_graph, seed=seed)
    xy = np.array([layout[j] for j in range(graph.p)], dtype=np.float64)
    xy -= xy.mean(axis=0)
    scale = np.abs(xy).max() or 1.0
    xy = xy / scale * (span_degrees / 2.0)
    lat = center[0] + xy[:, 1]
    lon = center[1] + xy[:, 0]
    return GaugeCoords(gauge_ids=graph.gauge_ids, lat=lat, lon=lon)
