from rest_framework import serializers

from .models import ExperimentRun


class ReportRowSerializer(serializers.Serializer):
    """Serializer for one (sizes, scenario) cell of an experiment report."""

    n = serializers.CharField()
    scenario = serializers.CharField()
    replications = serializers.IntegerField()
    hits = serializers.IntegerField()
    rate = serializers.FloatField()
    standard_error = serializers.FloatField()
    alpha = serializers.FloatField()
    d1_fraction = serializers.FloatField(allow_null=True)
    s1_fraction = serializers.FloatField(allow_null=True)
    mean_statistic = serializers.FloatField(allow_null=True)
    ks_distance = serializers.FloatField(allow_null=True)
    mean_clusters = serializers.FloatField(allow_null=True)
    cluster_counts = serializers.SerializerMethodField()

    def get_cluster_counts(self, obj):
        """Histogram keyed by cluster count, as JSON object keys."""
        return {str(count): total for count, total in sorted(obj.cluster_counts.items())}


class ExperimentReportSerializer(serializers.Serializer):
    """Serializer for ExperimentReport; runtime only when context['include_timing'] is set."""

    design_id = serializers.CharField()
    description = serializers.CharField()
    mode = serializers.CharField()
    seed = serializers.IntegerField()
    n_replications = serializers.IntegerField()
    level = serializers.FloatField()
    pairing = serializers.CharField()
    rows = ReportRowSerializer(many=True)
    runtime_seconds = serializers.FloatField(allow_null=True)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        if not self.context.get('include_timing'):
            data.pop('runtime_seconds')
        return data


class ExperimentRunSerializer(serializers.ModelSerializer):
    """Serializer for ExperimentRun model."""

    n_cells = serializers.SerializerMethodField()

    class Meta:
        model = ExperimentRun
        fields = [
            'id', 'design_id', 'mode', 'status', 'seed', 'n_replications',
            'config', 'report', 'runtime_seconds', 'error_message', 'n_cells',
            'created_at', 'completed_at'
        ]
        read_only_fields = ['id', 'created_at', 'completed_at']

    def get_n_cells(self, obj):
        """Number of report rows."""
        return len(obj.report.get('rows', []))
