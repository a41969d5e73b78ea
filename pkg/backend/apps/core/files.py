# apps/core/files.py
"""
Escrita de arquivos de saída dos comandos
Todas as saídas de um comando são registradas num OutputSet; se o comando
falhar, os arquivos já escritos são removidos
"""

import json
import logging
import os
from pathlib import Path
from typing import Callable, Optional

from apps.core.exceptions import GaugeNetworkError

logger = logging.getLogger(__name__)


def dumps(payload) -> str:
    """JSON determinístico (mesma entrada, mesmos bytes)"""
    return json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + '\n'


def read_json(path):
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)


class OutputSet:
    """
    Conjunto de arquivos produzidos por um comando

    Uso:
        with OutputSet() as outputs:
            outputs.write_json(path, payload, GaugeGraphSerializer)
    """

    def __init__(self):
        self.written = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            self.discard()
        return False

    def discard(self):
        for path in reversed(self.written):
            try:
                path.unlink()
                logger.warning(f"Saída parcial removida: {path}")
            except FileNotFoundError:
                pass
        self.written = []

    def _target(self, path) -> Path:
        path = Path(path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_text(self, path, text: str, check: Optional[Callable[[Path], object]] = None) -> Path:
        """
        Escreve de forma atômica; `check` relê o arquivo gravado e deve
        levantar exceção se ele não puder ser carregado de volta
        """
        path = self._target(path)
        tmp = path.with_name(path.name + '.tmp')
        with open(tmp, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        os.replace(tmp, path)
        self.written.append(path)
        if check is not None:
            try:
                check(path)
            except GaugeNetworkError:
                raise
            except Exception as exc:
                raise GaugeNetworkError(f"Saída {path} não passou na validação: {exc}") from exc
        return path

    def write_json(self, path, payload, serializer_class=None, many=False) -> Path:
        """
        Escreve JSON e valida o arquivo relendo-o com o serializer
        """
        path = self.write_text(path, dumps(payload))
        if serializer_class is not None:
            loaded = read_json(path)
            serializer = serializer_class(data=loaded, many=many)
            if not serializer.is_valid():
                raise GaugeNetworkError(
                    f"Saída {path} não passou na validação: {serializer.errors}"
                )
        return path


def validated(serializer_class, payload, many=False):
    """Valida um payload carregado de disco e devolve o objeto de domínio"""
    serializer = serializer_class(data=payload, many=many)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


__all__ = ['OutputSet', 'dumps', 'read_json', 'validated']
