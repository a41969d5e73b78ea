# apps/core/exceptions.py
"""
Hierarquia de erros do gaugenet
InputError indica problema nos dados de entrada (exit code 2);
os demais indicam falha de computação (exit code 1)
"""


class GaugeNetworkError(Exception):
    """Erro base de todas as operações da rede de postos"""


class InputError(GaugeNetworkError):
    """Entrada inválida ou mal formatada"""


class PanelFormatError(InputError, ValueError):
    """CSV de vazões ou de coordenadas fora do contrato"""


class GraphError(InputError, ValueError):
    """Grafo inconsistente com a rede (índices, ids, papéis)"""


class TransformError(GaugeNetworkError, ArithmeticError):
    """Falha na transformação log/padronização ou na inversa"""


class NotPositiveDefiniteError(GaugeNetworkError, ValueError):
    """Matriz que deveria ser simétrica positiva definida não é"""


class ConvergenceError(GaugeNetworkError):
    """Solver atingiu o limite de iterações"""


class RankDeficientError(GaugeNetworkError):
    """Desenho de regressão com colunas linearmente dependentes"""

    def __init__(self, message, donors=None):
        super().__init__(message)
        self.donors = list(donors or [])


class ScoringError(GaugeNetworkError, ValueError):
    """Métrica indefinida para as séries fornecidas"""


class FetchError(GaugeNetworkError):
    """Falha ao baixar séries do NWIS"""
