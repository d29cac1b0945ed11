from rest_framework import serializers


def _label(labels, population: int) -> str:
    """1-based population index to its display label."""
    if labels:
        return str(labels[population - 1])
    return str(population)


class TestResultSerializer(serializers.Serializer):
    """Serializer for ksample_test results; context['labels'] names the populations."""

    __test__ = False

    V = serializers.FloatField(source='statistic')
    p_value = serializers.FloatField()
    reject = serializers.BooleanField()
    level = serializers.FloatField()
    s_selected = serializers.IntegerField()
    selected_pair = serializers.ListField(child=serializers.IntegerField())
    D_per_pair = serializers.SerializerMethodField()
    sigma2_hat = serializers.FloatField()
    raw_statistic = serializers.FloatField()
    selection_penalty = serializers.FloatField()
    cumulative = serializers.ListField(child=serializers.FloatField())
    pairing = serializers.CharField()
    alpha = serializers.FloatField(source='alpha_penalty')
    K = serializers.IntegerField()
    sizes = serializers.ListField(child=serializers.IntegerField())
    degenerate = serializers.BooleanField()
    labels = serializers.SerializerMethodField()

    def get_D_per_pair(self, obj):
        """Selected dimension of every pair, in pair-rank order."""
        return [
            {'pair': [ell, m], 'D': d}
            for (ell, m), d in sorted(obj.d_per_pair.items())
        ]

    def get_labels(self, obj):
        labels = self.context.get('labels')
        return [_label(labels, population) for population in range(1, obj.K + 1)]


class ClusterStepSerializer(serializers.Serializer):
    action = serializers.CharField()
    candidate = serializers.IntegerField()
    tested = serializers.ListField(child=serializers.IntegerField())
    statistic = serializers.FloatField()
    p_value = serializers.FloatField()
    accepted = serializers.BooleanField()


class ClusterPartitionSerializer(serializers.Serializer):
    """Serializer for cluster_copulas results."""

    clusters = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))
    cluster_labels = serializers.SerializerMethodField()
    stopped = serializers.BooleanField()
    trail = ClusterStepSerializer(many=True)

    def get_cluster_labels(self, obj):
        labels = self.context.get('labels')
        return [[_label(labels, population) for population in cluster] for cluster in obj.clusters]


class TuningResultSerializer(serializers.Serializer):
    """Serializer for tune_alpha results."""

    alpha_hat = serializers.FloatField()
    exhausted = serializers.BooleanField()
    unanimity = serializers.SerializerMethodField()
    n_reps = serializers.IntegerField()
    k_prime = serializers.IntegerField()
    seed = serializers.IntegerField()
    pool_size = serializers.IntegerField()
    part_size = serializers.IntegerField()
    dropped_rows = serializers.IntegerField()

    def get_unanimity(self, obj):
        """Number of unanimous splits per grid value of alpha."""
        return [{'alpha': alpha, 'count': count} for alpha, count in obj.unanimity.items()]


class AnovaSerializer(serializers.Serializer):
    """Serializer for a pairwise p-value matrix given as {'labels': [...], 'p_values': ndarray}."""

    labels = serializers.ListField(child=serializers.CharField())
    p_values = serializers.SerializerMethodField()

    def get_p_values(self, obj):
        return [[float(value) for value in row] for row in obj['p_values']]


class SpearmanSerializer(serializers.Serializer):
    label = serializers.CharField()
    n = serializers.IntegerField()
    columns = serializers.ListField(child=serializers.CharField())
    rho = serializers.FloatField()
