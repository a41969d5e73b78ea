# apps/dataset/panel.py
"""
Painéis de vazão diária: leitura, transformação log, padronização,
divisão treino/validação/teste e covariância amostral
"""

import logging
import math
from dataclasses import dataclass, field
from datetime import date, timedelta
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from apps.core.exceptions import PanelFormatError, TransformError

logger = logging.getLogger(__name__)

# ln(Q + 1): Q = 0 vira Y = 0
DEFAULT_LOG_OFFSET = 1.0

MISSING_TOKENS = ('', 'NaN', 'nan', 'NAN')


class MissingPolicy(Enum):
    """O que fazer com células vazias no CSV"""
    REJECT = 'reject'
    DROP_ROWS = 'drop_rows'


@dataclass(frozen=True, eq=False)
class StreamflowPanel:
    """
    Matriz n×p de vazões diárias (m³/s)
    Linhas são dias em ordem estritamente crescente, colunas são postos
    """
    dates: Tuple[date, ...]
    gauge_ids: Tuple[str, ...]
    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=np.float64)
        if q.ndim != 2:
            raise PanelFormatError("Matriz de vazões deve ser bidimensional")
        dates = tuple(self.dates)
        gauge_ids = tuple(str(g) for g in self.gauge_ids)
        if q.shape != (len(dates), len(gauge_ids)):
            raise PanelFormatError(
                f"Matriz {q.shape} não corresponde a {len(dates)} datas × {len(gauge_ids)} postos"
            )
        if len(set(gauge_ids)) != len(gauge_ids):
            raise PanelFormatError("Identificadores de posto duplicados")
        if not np.all(np.isfinite(q)):
            raise PanelFormatError("Vazões devem ser finitas")
        if np.any(q < 0):
            row, col = np.argwhere(q < 0)[0]
            raise PanelFormatError(f"Vazão negativa em ({row},{col})")
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise PanelFormatError("Datas devem ser estritamente crescentes")
        q.setflags(write=False)
        object.__setattr__(self, 'q', q)
        object.__setattr__(self, 'dates', dates)
        object.__setattr__(self, 'gauge_ids', gauge_ids)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def p(self) -> int:
        return self.q.shape[1]

    def rows(self, index: Sequence[int]) -> 'StreamflowPanel':
        """Sub-painel com as linhas dadas (mantidas em ordem cronológica)"""
        index = np.sort(np.asarray(index, dtype=int))
        return StreamflowPanel(
            dates=tuple(self.dates[i] for i in index),
            gauge_ids=self.gauge_ids,
            q=self.q[index],
        )

    def index_of(self, gauge_id: str) -> int:
        try:
            return self.gauge_ids.index(gauge_id)
        except ValueError:
            raise PanelFormatError(f"Posto desconhecido: {gauge_id}")

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.q, columns=list(self.gauge_ids))
        frame.insert(0, 'date', [d.isoformat() for d in self.dates])
        return frame


@dataclass(frozen=True, eq=False)
class TransformStats:
    """Média e desvio padrão por posto das vazões em espaço log"""
    mu: np.ndarray
    sigma: np.ndarray
    offset: float = DEFAULT_LOG_OFFSET

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64)
        sigma = np.array(self.sigma, dtype=np.float64)
        if mu.shape != sigma.shape or mu.ndim != 1:
            raise TransformError("mu e sigma devem ser vetores do mesmo tamanho")
        if np.any(sigma <= 0):
            raise TransformError("Desvio padrão não positivo em TransformStats")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'sigma', sigma)


@dataclass(frozen=True, eq=False)
class DataSplits:
    """
    Divisão do painel: teste é o último terço cronológico;
    os dois terços iniciais são sorteados entre treino e validação
    """
    train: StreamflowPanel
    val: StreamflowPanel
    test: StreamflowPanel
    seed: int
    train_fraction_of_early: float = 0.5
    train_rows: Tuple[int, ...] = field(default=())
    val_rows: Tuple[int, ...] = field(default=())
    test_rows: Tuple[int, ...] = field(default=())
    train_days: Optional[int] = None


# ------------------------------------------------------------------
# Leitura
# ------------------------------------------------------------------

def load_panel(path, on_missing='reject') -> StreamflowPanel:
    """
    Lê o CSV `date,<gauge_1>,...,<gauge_p>`

    Args:
        path: caminho do arquivo
        on_missing: 'reject' (erro na primeira célula vazia) ou
            'drop_rows' (remove linhas incompletas; aceita lacunas de datas)
    """
    policy = MissingPolicy(on_missing)
    try:
        table = pd.read_csv(
            path, dtype=str, keep_default_na=False, encoding='utf-8', header=None,
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise PanelFormatError(f"CSV ilegível: {exc}")

    # cabeçalho lido como linha comum: pandas renomearia ids duplicados
    columns = [str(c).strip() for c in table.iloc[0].tolist()] if len(table) else []
    raw = table.iloc[1:].reset_index(drop=True)
    if len(columns) < 2 or columns[0] != 'date':
        raise PanelFormatError("Cabeçalho deve ser 'date,<gauge_id_1>,...'")
    gauge_ids = columns[1:]
    if any(not g for g in gauge_ids):
        raise PanelFormatError("Cabeçalho com identificador de posto vazio")
    seen = set()
    for gauge_id in gauge_ids:
        if gauge_id in seen:
            raise PanelFormatError(f"Posto duplicado no cabeçalho: {gauge_id}")
        seen.add(gauge_id)
    if raw.empty:
        raise PanelFormatError("CSV sem linhas de dados")
    if raw.shape[1] != len(columns):
        raise PanelFormatError(
            f"Linhas com {raw.shape[1]} colunas, cabeçalho com {len(columns)}"
        )

    try:
        dates = [date.fromisoformat(str(v).strip()) for v in raw.iloc[:, 0]]
    except ValueError as exc:
        raise PanelFormatError(f"Data fora do formato YYYY-MM-DD: {exc}")

    cells = raw.iloc[:, 1:].apply(lambda col: col.str.strip())
    missing = cells.isin(MISSING_TOKENS).to_numpy()
    values = cells.apply(pd.to_numeric, errors='coerce').to_numpy(dtype=np.float64)
    bad = np.isnan(values) & ~missing
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise PanelFormatError(
            f"Valor não numérico em ({row},{col}): {cells.iat[row, col]!r}"
        )
    if missing.any():
        if policy is MissingPolicy.REJECT:
            row, col = np.argwhere(missing)[0]
            raise PanelFormatError(f"missing value at ({row},{col})")
        keep = ~missing.any(axis=1)
        logger.warning(f"{int((~keep).sum())} linhas com falhas removidas de {path}")
        values = values[keep]
        dates = [d for d, k in zip(dates, keep) if k]
    if not np.all(np.isfinite(values)):
        raise PanelFormatError("Valor não finito no painel")
    if np.any(values < 0):
        row, col = np.argwhere(values < 0)[0]
        raise PanelFormatError(f"Vazão negativa em ({row},{col})")

    if policy is MissingPolicy.REJECT:
        for i, (a, b) in enumerate(zip(dates, dates[1:])):
            if b - a != timedelta(days=1):
                raise PanelFormatError(f"Datas não consecutivas na linha {i + 1}: {a} -> {b}")

    if len(dates) >= 2:
        constant = np.all(values == values[0], axis=0)
        if constant.any():
            raise PanelFormatError(
                f"Posto com vazão constante: {gauge_ids[int(np.argmax(constant))]}"
            )

    panel = StreamflowPanel(dates=tuple(dates), gauge_ids=tuple(gauge_ids), q=values)
    logger.info(f"Painel carregado: n={panel.n}, p={panel.p} ({path})")
    return panel


def write_panel_csv(panel: StreamflowPanel) -> str:
    """Serializa o painel no mesmo formato lido por load_panel"""
    return panel.to_frame().to_csv(index=False, float_format='%.10g', lineterminator='\n')


# ------------------------------------------------------------------
# Transformações
# ------------------------------------------------------------------

def to_log(panel, offset: float = DEFAULT_LOG_OFFSET) -> np.ndarray:
    """Y = ln(Q + offset), elemento a elemento"""
    q = panel.q if isinstance(panel, StreamflowPanel) else np.asarray(panel, dtype=np.float64)
    if np.any(q < 0):
        raise TransformError("Vazões negativas não têm transformação log")
    return np.log(q + offset)


def standardize(y: np.ndarray, offset: float = DEFAULT_LOG_OFFSET):
    """
    Forma gaussiana padrão de Y, coluna a coluna

    Returns:
        (Z, TransformStats) com desvio amostral (ddof=1)
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] < 2:
        raise TransformError("Padronização exige pelo menos duas linhas")
    mu = y.mean(axis=0)
    sigma = y.std(axis=0, ddof=1)
    if np.any(sigma <= 0):
        col = int(np.argmin(sigma))
        raise TransformError(f"Coluna {col} com variância zero")
    z = (y - mu) / sigma
    return z, TransformStats(mu=mu, sigma=sigma, offset=offset)


def apply_standardization(y: np.ndarray, stats: TransformStats) -> np.ndarray:
    """Padroniza com estatísticas já conhecidas (ex: do treino)"""
    y = np.asarray(y, dtype=np.float64)
    if y.shape[1] != stats.mu.shape[0]:
        raise TransformError("Dimensão de TransformStats não corresponde às colunas")
    return (y - stats.mu) / stats.sigma


def invert_transform(z_hat: np.ndarray, stats: TransformStats, with_clamp_count: bool = False):
    """
    Q̂ = exp(ẑ·σ + μ) − offset, com corte em zero

    Estouro em exp é erro; valores negativos são cortados e contados.
    """
    z_hat = np.asarray(z_hat, dtype=np.float64)
    if z_hat.ndim != 2 or z_hat.shape[1] != stats.mu.shape[0]:
        raise TransformError(
            f"Estimativas {z_hat.shape} não correspondem a {stats.mu.shape[0]} postos"
        )
    y_hat = z_hat * stats.sigma + stats.mu
    try:
        with np.errstate(over='raise'):
            q_hat = np.exp(y_hat) - stats.offset
    except FloatingPointError:
        raise TransformError("Estouro em exp() na transformação inversa")
    negative = q_hat < 0
    clamped = int(negative.sum())
    if clamped:
        logger.debug(f"{clamped} estimativas negativas cortadas em zero")
        q_hat = np.where(negative, 0.0, q_hat)
    if with_clamp_count:
        return q_hat, clamped
    return q_hat


# ------------------------------------------------------------------
# Divisão e covariância
# ------------------------------------------------------------------

def train_capacity(n: int, train_fraction_of_early: float = 0.5) -> int:
    """Dias de treino da divisão padrão de um painel com n dias"""
    n_early = n - math.ceil(n / 3)
    n_train = int(math.floor(n_early * train_fraction_of_early + 0.5))
    return min(max(n_train, 1), n_early - 1)


def split(panel: StreamflowPanel, seed: int, train_fraction_of_early: float = 0.5,
          train_days: Optional[int] = None) -> DataSplits:
    """
    Último ⌈n/3⌉ dias vão para teste; os ⌊2n/3⌋ iniciais são embaralhados
    com a semente e divididos entre treino e validação

    Com train_days, o treino fica só com os primeiros train_days sorteados
    do treino padrão; validação e teste não mudam.
    """
    n = panel.n
    if n < 6:
        raise PanelFormatError(f"Painel com {n} dias é curto demais para dividir (mínimo 6)")
    if not 0.0 < train_fraction_of_early < 1.0:
        raise PanelFormatError("train_fraction_of_early deve estar em (0, 1)")
    n_early = n - math.ceil(n / 3)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n_early)
    n_train = train_capacity(n, train_fraction_of_early)
    if train_days is not None:
        if not 2 <= train_days <= n_train:
            raise PanelFormatError(f"train_days={train_days} fora de [2, {n_train}]")
        train_rows = np.sort(order[:train_days])
    else:
        train_rows = np.sort(order[:n_train])
    val_rows = np.sort(order[n_train:])
    test_rows = np.arange(n_early, n)
    return DataSplits(
        train=panel.rows(train_rows),
        val=panel.rows(val_rows),
        test=panel.rows(test_rows),
        seed=int(seed),
        train_fraction_of_early=train_fraction_of_early,
        train_rows=tuple(int(i) for i in train_rows),
        val_rows=tuple(int(i) for i in val_rows),
        test_rows=tuple(int(i) for i in test_rows),
        train_days=train_days,
    )


def sample_covariance(z: np.ndarray) -> np.ndarray:
    """S = Zᵀ·Z / (n − 1) sobre dados já padronizados"""
    z = np.asarray(z, dtype=np.float64)
    n = z.shape[0]
    if n < 2:
        raise TransformError("Covariância amostral exige n >= 2")
    s = z.T @ z / (n - 1)
    return (s + s.T) / 2.0


def pearson_matrix(z: np.ndarray) -> np.ndarray:
    """Correlação de Pearson entre colunas"""
    z = np.asarray(z, dtype=np.float64)
    centered = z - z.mean(axis=0)
    norms = np.sqrt((centered ** 2).sum(axis=0))
    if np.any(norms == 0):
        raise TransformError("Correlação indefinida para coluna constante")
    return (centered.T @ centered) / np.outer(norms, norms)


def standardized_subsets(splits: DataSplits, offset: float = DEFAULT_LOG_OFFSET):
    """
    Z e estatísticas de treino e de validação, cada subconjunto com as suas
    """
    z_train, stats_train = standardize(to_log(splits.train, offset), offset)
    z_val, stats_val = standardize(to_log(splits.val, offset), offset)
    return z_train, stats_train, z_val, stats_val


def date_range(start: date, end: date) -> List[date]:
    days = (end - start).days
    return [start + timedelta(days=i) for i in range(days + 1)]
