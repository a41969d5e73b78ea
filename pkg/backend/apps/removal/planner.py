# apps/removal/planner.py
"""
Planejamento guloso de remoção de postos

Postos em ordem decrescente de NSE; cada posto removido trava os seus
vizinhos no grafo, que passam a ser os seus doadores. Postos isolados
nunca são removidos.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple

from apps.core.exceptions import GraphError, InputError
from apps.graph.network import GaugeGraph

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 0.7


class NseBand(Enum):
    """Faixas de NSE com cor e limite inferior"""
    BLUE = ('blue', 0.9)
    GREEN = ('green', 0.8)
    YELLOW = ('yellow', 0.7)
    ORANGE = ('orange', 0.6)
    RED = ('red', -math.inf)

    @property
    def label(self) -> str:
        return self.value[0]

    @property
    def lower(self) -> float:
        return self.value[1]

    @classmethod
    def for_nse(cls, value: float) -> 'NseBand':
        for band in cls:
            if value >= band.lower:
                return band
        return cls.RED


class GaugeStatus(Enum):
    REMOVED = 'removed'
    ISOLATED = 'isolated'
    NEIGHBOR_OF_REMOVED = 'neighbor-of-removed'


@dataclass(frozen=True)
class QueueEntry:
    gauge: int
    nse: float
    donors: Tuple[int, ...]

    @property
    def band(self) -> NseBand:
        return NseBand.for_nse(self.nse)


@dataclass(frozen=True)
class RemovalPlan:
    """Fila ordenada de removíveis e o motivo de cada posto"""
    queue: Tuple[QueueEntry, ...]
    status: Dict[int, GaugeStatus]
    gauge_ids: Tuple[str, ...] = ()

    @property
    def max_rem_rank(self) -> int:
        return len(self.queue)

    @property
    def removed(self) -> List[int]:
        return [entry.gauge for entry in self.queue]


def _sort_key(item: Tuple[int, float]):
    j, value = item
    value = -math.inf if math.isnan(value) else value
    return -value, j


def run_rg(nse_values: Sequence[float], graph: GaugeGraph) -> RemovalPlan:
    """
    Laço guloso: percorre os postos por NSE decrescente (empate: menor índice);
    um posto não travado entra na fila e trava os vizinhos
    """
    if len(nse_values) != graph.p:
        raise GraphError(f"{len(nse_values)} valores de NSE para {graph.p} postos")

    status: Dict[int, GaugeStatus] = {}
    locked = set()
    for j in graph.isolated():
        locked.add(j)
        status[j] = GaugeStatus.ISOLATED

    queue = []
    for j, value in sorted(enumerate(float(v) for v in nse_values), key=_sort_key):
        if j in locked:
            continue
        neighbors = graph.neighbors(j)
        queue.append(QueueEntry(gauge=j, nse=value, donors=tuple(neighbors)))
        locked.add(j)
        status[j] = GaugeStatus.REMOVED
        for i in neighbors:
            if i not in locked:
                locked.add(i)
                status[i] = GaugeStatus.NEIGHBOR_OF_REMOVED

    plan = RemovalPlan(queue=tuple(queue), status=dict(sorted(status.items())), gauge_ids=graph.gauge_ids)
    logger.info(f"Remoção: {plan.max_rem_rank} postos removíveis de {graph.p}")
    return plan


def confident_removals(plan: RemovalPlan, delta: float = DEFAULT_DELTA) -> List[int]:
    """Postos da fila com NSE >= δ, na ordem da fila"""
    if not 0.0 <= delta <= 1.0:
        raise InputError("delta deve estar em [0, 1]")
    return [entry.gauge for entry in plan.queue if entry.nse >= delta]
