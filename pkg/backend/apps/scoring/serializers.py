# apps/scoring/serializers.py

from rest_framework import serializers

from apps.scoring.metrics import ScoreReport
from apps.scoring.resampling import ResampleSummary


class ScoreReportSerializer(serializers.Serializer):
    target_indices = serializers.ListField(child=serializers.IntegerField(min_value=0), allow_empty=False)
    per_gauge_r2 = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0))
    per_gauge_nse = serializers.ListField(child=serializers.FloatField())
    score_val = serializers.FloatField(min_value=0.0)
    error_val = serializers.FloatField(min_value=0.0, max_value=1.0)
    gamma = serializers.FloatField(min_value=0.0, max_value=1.0)

    def validate(self, attrs):
        q = len(attrs['target_indices'])
        if len(attrs['per_gauge_r2']) != q or len(attrs['per_gauge_nse']) != q:
            raise serializers.ValidationError("Listas por posto com tamanhos diferentes")
        return attrs

    def create(self, validated_data):
        return ScoreReport(**validated_data)

    @staticmethod
    def payload(report: ScoreReport) -> dict:
        return {
            'target_indices': list(report.target_indices),
            'per_gauge_r2': list(report.per_gauge_r2),
            'per_gauge_nse': list(report.per_gauge_nse),
            'score_val': report.score_val,
            'error_val': report.error_val,
            'gamma': report.gamma,
        }


class ResampleSummarySerializer(serializers.Serializer):
    mean = serializers.FloatField(min_value=0.0, max_value=1.0)
    stdev = serializers.FloatField(min_value=0.0)
    per_run = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0), allow_empty=False)
    seed = serializers.IntegerField(min_value=0)
    per_run_nse = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(allow_null=True)), required=False, default=list,
    )
    per_run_queue_nse = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField()), required=False, default=list,
    )
    train_days = serializers.IntegerField(min_value=2, required=False, allow_null=True, default=None)

    def validate(self, attrs):
        runs = len(attrs['per_run'])
        for key in ('per_run_nse', 'per_run_queue_nse'):
            if attrs[key] and len(attrs[key]) != runs:
                raise serializers.ValidationError(f"{key} com {len(attrs[key])} rodadas, per_run com {runs}")
        return attrs

    def create(self, validated_data):
        return ResampleSummary(**validated_data)

    @staticmethod
    def payload(summary: ResampleSummary) -> dict:
        return {
            'mean': summary.mean,
            'stdev': summary.stdev,
            'per_run': list(summary.per_run),
            'seed': summary.seed,
            'per_run_nse': [list(values) for values in summary.per_run_nse],
            'per_run_queue_nse': [list(values) for values in summary.per_run_queue_nse],
            'train_days': summary.train_days,
        }


class TrainingSweepSerializer(serializers.Serializer):
    """Saída de sweep_training_length: um resumo de reamostragem por comprimento"""
    seed = serializers.IntegerField(min_value=0)
    runs = serializers.IntegerField(min_value=1)
    summaries = ResampleSummarySerializer(many=True, allow_empty=False)

    def validate_summaries(self, value):
        days = [item['train_days'] for item in value]
        if None in days or days != sorted(set(days)):
            raise serializers.ValidationError("train_days ausente ou fora de ordem crescente")
        return value


class MethodScoreSerializer(serializers.Serializer):
    label = serializers.CharField()
    graph_score = serializers.FloatField()
    max_rem_rank = serializers.IntegerField(min_value=0)
    confident_count = serializers.IntegerField(min_value=0)
    mean_error = serializers.FloatField(required=False, allow_null=True)
    top_nse_mean = serializers.FloatField(required=False, allow_null=True)
    resample_graph_score = serializers.FloatField(required=False, allow_null=True)
    resample_top_nse_mean = serializers.FloatField(required=False, allow_null=True)


class ComparisonSerializer(serializers.Serializer):
    metric = serializers.ChoiceField(choices=['error', 'graph_score'], default='error')
    a = serializers.CharField()
    b = serializers.CharField()
    p_value = serializers.FloatField(min_value=0.0, max_value=1.0)
    significant = serializers.BooleanField()


class GraphComparisonSerializer(serializers.Serializer):
    """Saída de score_graphs: scores com M_rem compartilhado e testes t"""
    m_rem = serializers.IntegerField(min_value=1)
    top = serializers.IntegerField(min_value=1, required=False)
    delta = serializers.FloatField(min_value=0.0, max_value=1.0)
    alpha = serializers.FloatField(min_value=0.0, max_value=1.0)
    methods = MethodScoreSerializer(many=True)
    comparisons = ComparisonSerializer(many=True)
