# apps/graph/serializers.py
"""
Formato JSON do grafo: {"gauge_ids": [...], "edges": [[i, j], ...]}
com i < j e arestas em ordem lexicográfica
"""

from rest_framework import serializers

from apps.graph.network import GaugeGraph


class EdgeField(serializers.ListField):
    child = serializers.IntegerField(min_value=0)

    def __init__(self, **kwargs):
        kwargs.setdefault('min_length', 2)
        kwargs.setdefault('max_length', 2)
        super().__init__(**kwargs)


class GaugeGraphSerializer(serializers.Serializer):
    gauge_ids = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    edges = serializers.ListField(child=EdgeField())

    def validate_gauge_ids(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError("gauge_ids repetidos")
        return value

    def validate(self, attrs):
        p = len(attrs['gauge_ids'])
        seen = set()
        for i, j in attrs['edges']:
            if i >= j:
                raise serializers.ValidationError(f"Aresta [{i}, {j}] deve ter i < j")
            if j >= p:
                raise serializers.ValidationError(f"Aresta [{i}, {j}] fora de 0..{p - 1}")
            if (i, j) in seen:
                raise serializers.ValidationError(f"Aresta [{i}, {j}] repetida")
            seen.add((i, j))
        return attrs

    def create(self, validated_data):
        ids = tuple(validated_data['gauge_ids'])
        return GaugeGraph(
            p=len(ids),
            edges=frozenset((i, j) for i, j in validated_data['edges']),
            gauge_ids=ids,
        )

    @staticmethod
    def payload(graph: GaugeGraph) -> dict:
        return {
            'gauge_ids': list(graph.gauge_ids),
            'edges': [[i, j] for i, j in graph.sorted_edges()],
        }
