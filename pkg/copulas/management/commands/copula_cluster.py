from rest_framework.renderers import JSONRenderer

from copulas.clustering import cluster_copulas
from copulas.management.base import CopulaCommand
from copulas.serializers import ClusterPartitionSerializer


class Command(CopulaCommand):
    """Management command grouping populations that share a copula."""

    help = 'Cluster K samples by copula'
    output_formats = ('json',)

    def add_arguments(self, parser):
        self.add_sample_arguments(parser)
        self.add_test_arguments(parser)
        parser.add_argument(
            '--fallback-singletons',
            action='store_true',
            help='When the closest pair is already rejected, report one cluster per population'
        )
        self.add_output_arguments(parser)

    def run(self, **options):
        loaded = self.load(options)
        cfg = self.test_config(options, loaded.samples)
        partition = cluster_copulas(loaded.samples, cfg, fallback_singletons=options['fallback_singletons'])

        if partition.stopped:
            self.stderr.write(self.style.WARNING('Closest pair rejected; no cluster formed'))
        data = ClusterPartitionSerializer(partition, context={'labels': loaded.labels}).data
        return JSONRenderer().render(data, renderer_context={'indent': 2})
