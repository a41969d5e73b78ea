# apps/graph/network.py
"""
Grafos da rede de postos
Aresta (i, j) significa dependência condicional entre os dois postos;
os vizinhos de um posto são os seus doadores
"""

import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from apps.core.exceptions import GraphError, PanelFormatError
from apps.dataset.panel import pearson_matrix

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class GaugeGraph:
    """Grafo não direcionado sobre p postos, arestas como pares (i<j)"""
    p: int
    edges: FrozenSet[Tuple[int, int]]
    gauge_ids: Tuple[str, ...] = ()

    def __post_init__(self):
        gauge_ids = tuple(self.gauge_ids) or tuple(str(j) for j in range(self.p))
        if len(gauge_ids) != self.p:
            raise GraphError(f"{len(gauge_ids)} ids para {self.p} postos")
        normalized = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise GraphError(f"Laço no posto {i}")
            if not (0 <= i < self.p and 0 <= j < self.p):
                raise GraphError(f"Aresta ({i},{j}) fora de 0..{self.p - 1}")
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, 'edges', frozenset(normalized))
        object.__setattr__(self, 'gauge_ids', gauge_ids)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)

    def neighbors(self, j: int) -> List[int]:
        found = [b if a == j else a for a, b in self.edges if a == j or b == j]
        return sorted(found)

    def isolated(self) -> List[int]:
        touched = {i for edge in self.edges for i in edge}
        return [j for j in range(self.p) if j not in touched]

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.p, self.p), dtype=bool)
        for i, j in self.edges:
            adj[i, j] = adj[j, i] = True
        return adj

    def with_edges(self, edges: Iterable[Tuple[int, int]]) -> 'GaugeGraph':
        return GaugeGraph(p=self.p, edges=frozenset(edges), gauge_ids=self.gauge_ids)

    @classmethod
    def complete(cls, p: int, gauge_ids: Sequence[str] = ()) -> 'GaugeGraph':
        edges = frozenset((i, j) for i in range(p) for j in range(i + 1, p))
        return cls(p=p, edges=edges, gauge_ids=tuple(gauge_ids))


@dataclass(frozen=True, eq=False)
class GaugeCoords:
    """Latitude/longitude (graus) na ordem das colunas do painel"""
    gauge_ids: Tuple[str, ...]
    lat: np.ndarray
    lon: np.ndarray

    def __post_init__(self):
        lat = np.array(self.lat, dtype=np.float64)
        lon = np.array(self.lon, dtype=np.float64)
        gauge_ids = tuple(self.gauge_ids)
        if not (len(gauge_ids) == lat.shape[0] == lon.shape[0]):
            raise PanelFormatError("Coordenadas com tamanhos diferentes")
        if np.any(np.abs(lat) > 90) or np.any(np.abs(lon) > 180):
            raise PanelFormatError("Latitude/longitude fora do intervalo")
        object.__setattr__(self, 'gauge_ids', gauge_ids)
        object.__setattr__(self, 'lat', lat)
        object.__setattr__(self, 'lon', lon)

    def reordered(self, gauge_ids: Sequence[str]) -> 'GaugeCoords':
        """Mesmas coordenadas na ordem de outro painel"""
        lookup = {g: k for k, g in enumerate(self.gauge_ids)}
        missing = [g for g in gauge_ids if g not in lookup]
        if missing:
            raise PanelFormatError(f"Sem coordenadas para: {', '.join(missing)}")
        order = [lookup[g] for g in gauge_ids]
        return GaugeCoords(gauge_ids=tuple(gauge_ids), lat=self.lat[order], lon=self.lon[order])


def load_coords(path) -> GaugeCoords:
    """Lê o CSV `gauge_id,lat,lon`"""
    try:
        frame = pd.read_csv(path, dtype={'gauge_id': str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise PanelFormatError(f"CSV de coordenadas ilegível: {exc}")
    if list(frame.columns) != ['gauge_id', 'lat', 'lon']:
        raise PanelFormatError(f"Cabeçalho esperado gauge_id,lat,lon; recebido {','.join(map(str, frame.columns))}")
    if frame['gauge_id'].duplicated().any():
        raise PanelFormatError("gauge_id repetido no CSV de coordenadas")
    try:
        lat = frame['lat'].astype(float).to_numpy()
        lon = frame['lon'].astype(float).to_numpy()
    except ValueError as exc:
        raise PanelFormatError(f"Coordenada não numérica: {exc}")
    return GaugeCoords(gauge_ids=tuple(frame['gauge_id']), lat=lat, lon=lon)


def coords_csv(coords: GaugeCoords) -> str:
    lines = ['gauge_id,lat,lon']
    lines += [f"{g},{la:.6f},{lo:.6f}" for g, la, lo in zip(coords.gauge_ids, coords.lat, coords.lon)]
    return '\n'.join(lines) + '\n'


def haversine_matrix(coords: GaugeCoords) -> np.ndarray:
    """Distâncias de grande círculo (km) entre todos os pares"""
    lat = np.radians(coords.lat)
    lon = np.radians(coords.lon)
    dlat = lat[:, None] - lat[None, :]
    dlon = lon[:, None] - lon[None, :]
    a = np.sin(dlat / 2) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


# ------------------------------------------------------------------
# Grafo a partir da matriz de precisão
# ------------------------------------------------------------------

def _upper_magnitudes(theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise GraphError("Matriz de precisão deve ser quadrada")
    iu = np.triu_indices(theta.shape[0], k=1)
    return np.abs(theta[iu])


def graph_from_precision(theta: np.ndarray, tau: float = 0.0, gauge_ids: Sequence[str] = ()) -> GaugeGraph:
    """Aresta (i, j) se |θ_ij| > τ (estrito); τ = 0 é o grafo do suporte"""
    theta = np.asarray(theta, dtype=np.float64)
    p = theta.shape[0]
    magnitudes = _upper_magnitudes(theta)
    iu = np.triu_indices(p, k=1)
    keep = magnitudes > tau
    edges = frozenset(zip(iu[0][keep].tolist(), iu[1][keep].tolist()))
    return GaugeGraph(p=p, edges=edges, gauge_ids=tuple(gauge_ids))


def choose_tau_for_k(theta: np.ndarray, k: int) -> float:
    """
    Menor τ em {0} ∪ {|θ_ij| distintos} com no máximo k arestas
    Empates no corte saem juntos, então o grafo pode ficar com menos de k
    """
    if k < 0:
        raise GraphError("k deve ser >= 0")
    magnitudes = np.sort(_upper_magnitudes(theta))
    candidates = np.concatenate(([0.0], np.unique(magnitudes[magnitudes > 0])))
    # arestas sobreviventes para cada τ candidato: quantos |θ| > τ
    survivors = magnitudes.size - np.searchsorted(magnitudes, candidates, side='right')
    ok = np.nonzero(survivors <= k)[0]
    return float(candidates[ok[0]])


# ------------------------------------------------------------------
# Grafos de referência (Dist e Corr)
# ------------------------------------------------------------------

def _m_best_graph(score: np.ndarray, m: int, gauge_ids, descending: bool) -> GaugeGraph:
    p = score.shape[0]
    if m < 1:
        raise GraphError("m deve ser >= 1")
    if p < m + 1:
        raise GraphError(f"{p} postos não bastam para {m} doadores por alvo")
    edges = set()
    for j in range(p):
        others = [i for i in range(p) if i != j]
        # desempate pelo menor índice: sort estável sobre índices crescentes
        key = (lambda i: -score[j, i]) if descending else (lambda i: score[j, i])
        for i in sorted(others, key=key)[:m]:
            edges.add((min(i, j), max(i, j)))
    return GaugeGraph(p=p, edges=frozenset(edges), gauge_ids=tuple(gauge_ids))


def dist_graph(coords: GaugeCoords, m: int) -> GaugeGraph:
    """Cada posto ligado aos seus m vizinhos mais próximos (haversine)"""
    graph = _m_best_graph(haversine_matrix(coords), m, coords.gauge_ids, descending=False)
    logger.info(f"Grafo Dist(m={m}): {graph.edge_count} arestas")
    return graph


def corr_graph(z_train: np.ndarray, m: int, gauge_ids: Sequence[str] = ()) -> GaugeGraph:
    """Cada posto ligado aos m postos de maior correlação de Pearson no treino"""
    graph = _m_best_graph(pearson_matrix(z_train), m, gauge_ids, descending=True)
    logger.info(f"Grafo Corr(m={m}): {graph.edge_count} arestas")
    return graph


# ------------------------------------------------------------------
# Papéis e consultas
# ------------------------------------------------------------------

def _indices_for(graph: GaugeGraph, ids: Iterable[str]) -> set:
    lookup = {g: k for k, g in enumerate(graph.gauge_ids)}
    unknown = [g for g in ids if g not in lookup]
    if unknown:
        raise GraphError(f"Posto desconhecido: {', '.join(sorted(unknown))}")
    return {lookup[g] for g in ids}


def apply_role_constraints(graph: GaugeGraph, donors: Iterable[str] = (), targets: Iterable[str] = ()) -> GaugeGraph:
    """
    Remove arestas entre dois doadores conhecidos e entre dois alvos conhecidos
    """
    donor_idx = _indices_for(graph, donors)
    target_idx = _indices_for(graph, targets)
    if not donor_idx and not target_idx:
        return graph
    kept = {
        (i, j) for i, j in graph.edges
        if not (i in donor_idx and j in donor_idx)
        and not (i in target_idx and j in target_idx)
    }
    return graph.with_edges(kept)


def donors_of(graph: GaugeGraph, j: int) -> List[int]:
    """Vizinhos de j em ordem crescente de índice"""
    if not 0 <= j < graph.p:
        raise GraphError(f"Posto {j} fora de 0..{graph.p - 1}")
    return graph.neighbors(j)


def complete_edge_count(p: int) -> int:
    return math.comb(p, 2)
