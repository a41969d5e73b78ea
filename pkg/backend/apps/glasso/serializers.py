# apps/glasso/serializers.py
"""
JSON da estimativa de precisão: matrizes densas por linha e registro de convergência
"""

import numpy as np
from rest_framework import serializers

from apps.glasso.solver import PrecisionEstimate


class MatrixField(serializers.ListField):
    child = serializers.ListField(child=serializers.FloatField())


class PrecisionEstimateSerializer(serializers.Serializer):
    theta = MatrixField()
    w = MatrixField()
    # 'lambda' é palavra reservada; o campo é renomeado no JSON
    lam = serializers.FloatField(min_value=0.0)
    sweeps = serializers.IntegerField(min_value=0)
    converged = serializers.BooleanField()
    max_kkt_violation = serializers.FloatField(min_value=0.0)
    objective = serializers.FloatField(required=False, allow_null=True)
    penalize_diagonal = serializers.BooleanField(default=True)

    def to_internal_value(self, data):
        if isinstance(data, dict) and 'lambda' in data:
            data = {('lam' if key == 'lambda' else key): value for key, value in data.items()}
        return super().to_internal_value(data)

    def validate(self, attrs):
        p = len(attrs['theta'])
        for name in ('theta', 'w'):
            matrix = attrs[name]
            if len(matrix) != p or any(len(row) != p for row in matrix):
                raise serializers.ValidationError(f"{name} deve ser {p}×{p}")
            array = np.asarray(matrix)
            if not np.allclose(array, array.T, atol=1e-10):
                raise serializers.ValidationError(f"{name} não é simétrica")
        return attrs

    def create(self, validated_data):
        objective = validated_data.get('objective')
        return PrecisionEstimate(
            theta=np.asarray(validated_data['theta'], dtype=np.float64),
            w=np.asarray(validated_data['w'], dtype=np.float64),
            lam=validated_data['lam'],
            sweeps=validated_data['sweeps'],
            converged=validated_data['converged'],
            max_kkt_violation=validated_data['max_kkt_violation'],
            objective=float('nan') if objective is None else objective,
            penalize_diagonal=validated_data['penalize_diagonal'],
        )

    @staticmethod
    def payload(estimate: PrecisionEstimate) -> dict:
        objective = estimate.objective
        return {
            'theta': estimate.theta.tolist(),
            'w': estimate.w.tolist(),
            'lambda': estimate.lam,
            'sweeps': estimate.sweeps,
            'converged': estimate.converged,
            'max_kkt_violation': estimate.max_kkt_violation,
            'objective': objective if np.isfinite(objective) else None,
            'penalize_diagonal': estimate.penalize_diagonal,
        }
