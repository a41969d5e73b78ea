# apps/sgm/pareto.py
"""
Frente de Pareto (arestas × erro de validação) e escolha do grafo final
"""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from apps.core.exceptions import GraphError, InputError
from apps.graph.network import GaugeGraph
from apps.sgm.selection import CandidatePoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParetoFront:
    """Pontos não dominados em ordem crescente de arestas"""
    points: Tuple[CandidatePoint, ...]

    def __post_init__(self):
        object.__setattr__(self, 'points', tuple(self.points))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def distinct_graphs(self) -> int:
        return len({pt.graph.edges for pt in self.points})


def dominates(a: CandidatePoint, b: CandidatePoint) -> bool:
    """a domina b: não pior nos dois objetivos e melhor em pelo menos um"""
    return (a.edge_count <= b.edge_count and a.error_val <= b.error_val
            and (a.edge_count < b.edge_count or a.error_val < b.error_val))


def pareto_front(points: Sequence[CandidatePoint]) -> ParetoFront:
    """
    Subconjunto não dominado; em empate de arestas só o menor erro sobrevive
    e pontos idênticos ficam com o primeiro da lista
    """
    if not points:
        raise InputError("Lista de pontos vazia")
    order = sorted(range(len(points)), key=lambda i: (points[i].edge_count, points[i].error_val, i))
    front = []
    best_error = math.inf
    for i in order:
        point = points[i]
        if point.error_val < best_error:
            front.append(point)
            best_error = point.error_val
    logger.info(f"Frente de Pareto: {len(front)} de {len(points)} pontos")
    return ParetoFront(points=tuple(front))


def dominated_flags(points: Sequence[CandidatePoint], front: ParetoFront) -> List[bool]:
    members = {id(pt) for pt in front.points}
    return [id(pt) not in members for pt in points]


class SelectionPolicy(Enum):
    KNEE = 'knee'
    EDGES = 'edges'
    MIN_ERROR = 'min_error'


@dataclass(frozen=True)
class Policy:
    kind: SelectionPolicy
    k: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> 'Policy':
        """Aceita 'knee', 'min_error', 'edges=47' ou 'edges(47)'"""
        text = (text or '').strip()
        match = re.fullmatch(r'edges\s*(?:=|\()\s*(\d+)\s*\)?', text)
        if match:
            return cls(SelectionPolicy.EDGES, int(match.group(1)))
        try:
            kind = SelectionPolicy(text)
        except ValueError:
            raise InputError(f"Política desconhecida: {text!r} (use knee, min_error ou edges=K)")
        if kind is SelectionPolicy.EDGES:
            raise InputError("Política edges exige um orçamento: edges=K")
        return cls(kind)

    def __str__(self) -> str:
        if self.kind is SelectionPolicy.EDGES:
            return f"edges={self.k}"
        return self.kind.value


def knee_point(front: ParetoFront) -> CandidatePoint:
    """
    Ponto de maior distância perpendicular à corda entre os extremos da
    frente, no espaço (arestas, erro) normalizado para [0, 1]
    """
    points = front.points
    # sem ponto interior não há joelho; fica o de menor erro
    if len(points) <= 2:
        return points[-1]
    edges = [pt.edge_count for pt in points]
    errors = [pt.error_val for pt in points]
    e_lo, e_hi = min(edges), max(edges)
    r_lo, r_hi = min(errors), max(errors)
    e_span = (e_hi - e_lo) or 1.0
    r_span = (r_hi - r_lo) or 1.0
    xs = [(e - e_lo) / e_span for e in edges]
    ys = [(r - r_lo) / r_span for r in errors]
    x0, y0, x1, y1 = xs[0], ys[0], xs[-1], ys[-1]
    chord = math.hypot(x1 - x0, y1 - y0)
    best, best_distance = 0, -1.0
    for i, (x, y) in enumerate(zip(xs, ys)):
        distance = abs((y1 - y0) * x - (x1 - x0) * y + x1 * y0 - y1 * x0) / chord
        if distance > best_distance:
            best, best_distance = i, distance
    return points[best]


def select_point(front: ParetoFront, policy) -> CandidatePoint:
    if not front.points:
        raise InputError("Frente de Pareto vazia")
    if isinstance(policy, str):
        policy = Policy.parse(policy)
    if policy.kind is SelectionPolicy.MIN_ERROR:
        return front.points[-1]
    if policy.kind is SelectionPolicy.EDGES:
        eligible = [pt for pt in front.points if pt.edge_count <= policy.k]
        if not eligible:
            raise GraphError(
                f"Nenhum ponto da frente com no máximo {policy.k} arestas "
                f"(mínimo disponível: {front.points[0].edge_count})"
            )
        return eligible[-1]
    return knee_point(front)


def select_graph(front: ParetoFront, policy='knee') -> GaugeGraph:
    """Grafo escolhido na frente pela política: knee, edges(k) ou min_error"""
    point = select_point(front, policy)
    logger.info(
        f"Grafo escolhido ({policy}): {point.edge_count} arestas, erro {point.error_val:.4f}, "
        f"λ={point.lam:.4f}, τ={point.tau:.4g}"
    )
    return point.graph
