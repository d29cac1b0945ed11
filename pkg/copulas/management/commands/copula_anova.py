import pandas as pd
from rest_framework.renderers import JSONRenderer

from copulas.ksample import pairwise_anova
from copulas.management.base import CopulaCommand
from copulas.serializers import AnovaSerializer


class Command(CopulaCommand):
    """Management command printing the matrix of pairwise two-sample p-values."""

    help = 'Pairwise copula equality p-values between K samples'

    def add_arguments(self, parser):
        self.add_sample_arguments(parser)
        self.add_test_arguments(parser)
        self.add_output_arguments(parser)

    def run(self, **options):
        loaded = self.load(options)
        cfg = self.test_config(options, loaded.samples)
        matrix = pairwise_anova(loaded.samples, cfg)

        if options['format'] == 'csv':
            frame = pd.DataFrame(matrix, index=loaded.labels, columns=loaded.labels)
            return frame.to_csv(index_label='population', float_format='%.4f', lineterminator='\n')
        data = AnovaSerializer({'labels': loaded.labels, 'p_values': matrix}).data
        return JSONRenderer().render(data, renderer_context={'indent': 2})
