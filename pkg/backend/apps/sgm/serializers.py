# apps/sgm/serializers.py
"""
JSON da frente: lista de CandidatePoint com o grafo embutido
"""

from rest_framework import serializers

from apps.graph.serializers import GaugeGraphSerializer
from apps.sgm.selection import CandidatePoint


class CandidatePointSerializer(serializers.Serializer):
    k_requested = serializers.IntegerField(min_value=0)
    edge_count = serializers.IntegerField(min_value=0)
    error_val = serializers.FloatField(min_value=0.0, max_value=1.0)
    # 'lambda' é palavra reservada; o campo é renomeado no JSON
    lam = serializers.FloatField(min_value=0.0)
    tau = serializers.FloatField(min_value=0.0)
    converged = serializers.BooleanField(default=True)
    lambda_index = serializers.IntegerField(min_value=0, default=0)
    graph = GaugeGraphSerializer()

    def to_internal_value(self, data):
        if isinstance(data, dict) and 'lambda' in data:
            data = {('lam' if key == 'lambda' else key): value for key, value in data.items()}
        return super().to_internal_value(data)

    def validate(self, attrs):
        if attrs['edge_count'] > attrs['k_requested']:
            raise serializers.ValidationError("edge_count maior que k_requested")
        if attrs['edge_count'] != len(attrs['graph']['edges']):
            raise serializers.ValidationError("edge_count difere do número de arestas do grafo")
        return attrs

    def create(self, validated_data):
        graph = GaugeGraphSerializer().create(validated_data.pop('graph'))
        return CandidatePoint(graph=graph, **validated_data)

    @staticmethod
    def payload(point: CandidatePoint) -> dict:
        return {
            'k_requested': point.k_requested,
            'edge_count': point.edge_count,
            'error_val': point.error_val,
            'lambda': point.lam,
            'tau': point.tau,
            'converged': point.converged,
            'lambda_index': point.lambda_index,
            'graph': GaugeGraphSerializer.payload(point.graph),
        }
