# apps/cli/runconfig.py
"""
Configuração de execução dos comandos

Precedência: flags da linha de comando > arquivo JSON (--config) >
padrões do settings.GAUGENET > padrões do código
"""

import logging
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

from django.conf import settings
from rest_framework import serializers

from apps.core.exceptions import InputError
from apps.core.files import read_json
from apps.dataset.panel import DEFAULT_LOG_OFFSET, MissingPolicy
from apps.inference.regression import InferenceApproach
from apps.removal.planner import DEFAULT_DELTA
from apps.scoring.metrics import DEFAULT_GAMMA
from apps.sgm.pareto import Policy
from apps.sgm.selection import DEFAULT_K_MIN, DEFAULT_LAMBDA_MAX, DEFAULT_LAMBDA_MIN, DEFAULT_RES, SgmConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    lambda_min: float = DEFAULT_LAMBDA_MIN
    lambda_max: float = DEFAULT_LAMBDA_MAX
    k_min: int = DEFAULT_K_MIN
    k_max: Optional[int] = None
    res: int = DEFAULT_RES
    gamma: float = DEFAULT_GAMMA
    donor_group: Tuple[str, ...] = ()
    target_group: Tuple[str, ...] = ()
    delta: float = DEFAULT_DELTA
    seed: int = 0
    train_fraction_of_early: float = 0.5
    approach: int = InferenceApproach.LOG_MLR
    policy: str = 'knee'
    on_missing: str = MissingPolicy.REJECT.value
    log_offset: float = DEFAULT_LOG_OFFSET
    workers: int = 1
    panel: Optional[str] = None
    coords: Optional[str] = None
    output_dir: str = '.'

    def sgm_config(self) -> SgmConfig:
        return SgmConfig(
            lambda_min=self.lambda_min,
            lambda_max=self.lambda_max,
            k_min=self.k_min,
            k_max=self.k_max,
            res=self.res,
            gamma=self.gamma,
            donor_group=self.donor_group,
            target_group=self.target_group,
        )


class RunConfigSerializer(serializers.Serializer):
    """Valida o JSON de configuração; chaves desconhecidas são rejeitadas"""
    lambda_min = serializers.FloatField(min_value=0.0, required=False)
    lambda_max = serializers.FloatField(min_value=0.0, required=False)
    k_min = serializers.IntegerField(min_value=0, required=False)
    k_max = serializers.IntegerField(min_value=0, required=False, allow_null=True)
    res = serializers.IntegerField(min_value=1, required=False)
    gamma = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)
    donor_group = serializers.ListField(child=serializers.CharField(), required=False)
    target_group = serializers.ListField(child=serializers.CharField(), required=False)
    delta = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)
    seed = serializers.IntegerField(min_value=0, required=False)
    train_fraction_of_early = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)
    approach = serializers.ChoiceField(choices=[a.value for a in InferenceApproach], required=False)
    policy = serializers.CharField(required=False)
    on_missing = serializers.ChoiceField(choices=[m.value for m in MissingPolicy], required=False)
    log_offset = serializers.FloatField(min_value=0.0, required=False)
    workers = serializers.IntegerField(min_value=1, required=False)
    panel = serializers.CharField(required=False, allow_null=True)
    coords = serializers.CharField(required=False, allow_null=True)
    output_dir = serializers.CharField(required=False)

    def validate(self, attrs):
        unknown = sorted(set(self.initial_data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError(f"Chaves desconhecidas: {', '.join(unknown)}")
        lam_min = attrs.get('lambda_min', DEFAULT_LAMBDA_MIN)
        lam_max = attrs.get('lambda_max', DEFAULT_LAMBDA_MAX)
        if lam_min > lam_max:
            raise serializers.ValidationError("lambda_min deve ser <= lambda_max")
        if attrs.get('gamma', DEFAULT_GAMMA) >= 1.0:
            raise serializers.ValidationError("gamma deve estar em [0, 1)")
        k_max = attrs.get('k_max')
        if k_max is not None and attrs.get('k_min', DEFAULT_K_MIN) > k_max:
            raise serializers.ValidationError("k_min deve ser <= k_max")
        fraction = attrs.get('train_fraction_of_early')
        if fraction is not None and not 0.0 < fraction < 1.0:
            raise serializers.ValidationError("train_fraction_of_early deve estar em (0, 1)")
        if 'policy' in attrs:
            try:
                Policy.parse(attrs['policy'])
            except InputError as exc:
                raise serializers.ValidationError(str(exc))
        return attrs

    def create(self, validated_data):
        data = dict(validated_data)
        for key in ('donor_group', 'target_group'):
            if key in data:
                data[key] = tuple(data[key])
        return RunConfig(**data)


def settings_defaults() -> dict:
    options = getattr(settings, 'GAUGENET', {})
    defaults = {}
    if 'LOG_OFFSET' in options:
        defaults['log_offset'] = options['LOG_OFFSET']
    if 'WORKERS' in options:
        defaults['workers'] = options['WORKERS']
    return defaults


def build_run_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> RunConfig:
    """
    Junta padrões, arquivo e flags e valida o resultado

    Raises:
        serializers.ValidationError: chave desconhecida ou valor fora do domínio
        FileNotFoundError: --config inexistente
    """
    data = settings_defaults()
    if path:
        loaded = read_json(path)
        if not isinstance(loaded, dict):
            raise InputError(f"{path}: a configuração deve ser um objeto JSON")
        # chaves do arquivo são checadas antes da mistura com os padrões
        RunConfigSerializer(data=loaded).is_valid(raise_exception=True)
        data.update(loaded)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    serializer = RunConfigSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    run_config = serializer.save()
    logger.debug(f"Configuração efetiva: {asdict(run_config)}")
    return run_config
