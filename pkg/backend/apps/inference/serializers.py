# apps/inference/serializers.py

from rest_framework import serializers

from apps.inference.regression import EvaluationReport, InferenceApproach


class GaugeResultSerializer(serializers.Serializer):
    index = serializers.IntegerField(min_value=0)
    gauge_id = serializers.CharField()
    nse = serializers.FloatField()
    r2 = serializers.FloatField(min_value=0.0, max_value=1.0)


class EvaluationReportSerializer(serializers.Serializer):
    """
    Relatório de teste: NSE/R² por posto, error_test e postos pulados
    As vazões estimadas vão para o CSV de predições, não para este JSON
    """
    approach = serializers.ChoiceField(choices=[a.value for a in InferenceApproach])
    gamma = serializers.FloatField(min_value=0.0, max_value=1.0)
    error_test = serializers.FloatField(min_value=0.0, max_value=1.0)
    gauge_ids = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    gauges = GaugeResultSerializer(many=True)
    skipped = serializers.ListField(child=serializers.CharField())
    clamped = serializers.IntegerField(min_value=0, default=0)

    def validate(self, attrs):
        known = set(attrs['gauge_ids'])
        for item in attrs['gauges']:
            if item['gauge_id'] not in known:
                raise serializers.ValidationError(f"Posto {item['gauge_id']} fora de gauge_ids")
            if item['index'] >= len(attrs['gauge_ids']) or attrs['gauge_ids'][item['index']] != item['gauge_id']:
                raise serializers.ValidationError(f"Índice {item['index']} não corresponde a {item['gauge_id']}")
        return attrs

    def create(self, validated_data):
        """Devolve (gauge_ids, NSE por posto com -inf nos pulados)"""
        ids = validated_data['gauge_ids']
        nse = [float('-inf')] * len(ids)
        for item in validated_data['gauges']:
            nse[item['index']] = item['nse']
        return ids, nse

    @staticmethod
    def payload(report: EvaluationReport, gauge_ids) -> dict:
        return {
            'approach': int(report.approach),
            'gamma': report.gamma,
            'error_test': report.error_test,
            'gauge_ids': list(gauge_ids),
            'gauges': [
                {'index': j, 'gauge_id': gauge_ids[j], 'nse': value, 'r2': r2_value}
                for j, value, r2_value in zip(report.target_indices, report.per_gauge_nse, report.per_gauge_r2)
            ],
            'skipped': [gauge_ids[j] for j in report.skipped],
            'clamped': report.clamped,
        }
