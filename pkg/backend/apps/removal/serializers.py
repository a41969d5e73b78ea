# apps/removal/serializers.py

from rest_framework import serializers

from apps.removal.planner import GaugeStatus, NseBand, QueueEntry, RemovalPlan


class QueueEntrySerializer(serializers.Serializer):
    rank = serializers.IntegerField(min_value=1)
    index = serializers.IntegerField(min_value=0)
    gauge_id = serializers.CharField()
    nse = serializers.FloatField()
    band = serializers.ChoiceField(choices=[band.label for band in NseBand])
    donors = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    confident = serializers.BooleanField()


class RemovalPlanSerializer(serializers.Serializer):
    """Fila de remoção com faixas de NSE e o estado de todos os postos"""
    gauge_ids = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    delta = serializers.FloatField(min_value=0.0, max_value=1.0)
    max_rem_rank = serializers.IntegerField(min_value=0)
    confident_count = serializers.IntegerField(min_value=0)
    queue = QueueEntrySerializer(many=True)
    status = serializers.DictField(child=serializers.ChoiceField(choices=[s.value for s in GaugeStatus]))

    def validate(self, attrs):
        ids = attrs['gauge_ids']
        if attrs['max_rem_rank'] != len(attrs['queue']):
            raise serializers.ValidationError("max_rem_rank difere do tamanho da fila")
        if set(attrs['status']) != set(ids):
            raise serializers.ValidationError("status deve cobrir todos os postos")
        nse_values = [entry['nse'] for entry in attrs['queue']]
        if any(a < b for a, b in zip(nse_values, nse_values[1:])):
            raise serializers.ValidationError("NSE da fila deve ser não crescente")
        for entry in attrs['queue']:
            if entry['index'] >= len(ids) or ids[entry['index']] != entry['gauge_id']:
                raise serializers.ValidationError(f"Índice {entry['index']} não corresponde a {entry['gauge_id']}")
            unknown = [g for g in entry['donors'] if g not in set(ids)]
            if unknown:
                raise serializers.ValidationError(f"Doadores fora de gauge_ids: {', '.join(unknown)}")
            if NseBand.for_nse(entry['nse']).label != entry['band']:
                raise serializers.ValidationError(f"Faixa incorreta para {entry['gauge_id']}")
        return attrs

    def create(self, validated_data):
        ids = tuple(validated_data['gauge_ids'])
        lookup = {g: k for k, g in enumerate(ids)}
        queue = tuple(
            QueueEntry(gauge=entry['index'], nse=entry['nse'],
                       donors=tuple(lookup[g] for g in entry['donors']))
            for entry in validated_data['queue']
        )
        status = {lookup[g]: GaugeStatus(value) for g, value in validated_data['status'].items()}
        return RemovalPlan(queue=queue, status=dict(sorted(status.items())), gauge_ids=ids)

    @staticmethod
    def payload(plan: RemovalPlan, delta: float) -> dict:
        ids = plan.gauge_ids
        queue = [
            {
                'rank': rank,
                'index': entry.gauge,
                'gauge_id': ids[entry.gauge],
                'nse': entry.nse,
                'band': entry.band.label,
                'donors': [ids[i] for i in entry.donors],
                'confident': entry.nse >= delta,
            }
            for rank, entry in enumerate(plan.queue, start=1)
        ]
        return {
            'gauge_ids': list(ids),
            'delta': delta,
            'max_rem_rank': plan.max_rem_rank,
            'confident_count': sum(1 for item in queue if item['confident']),
            'queue': queue,
            'status': {ids[j]: status.value for j, status in plan.status.items()},
        }
