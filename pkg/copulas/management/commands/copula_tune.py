from rest_framework.renderers import JSONRenderer

from copulas.management.base import CopulaCommand
from copulas.serializers import TuningResultSerializer
from copulas.tuning import tune_alpha


class Command(CopulaCommand):
    """Management command calibrating the penalty factor alpha."""

    help = 'Tune alpha by splitting the pooled samples at random'
    output_formats = ('json',)

    def add_arguments(self, parser):
        self.add_sample_arguments(parser)
        self.add_test_arguments(parser, allow_tune=False)
        self.add_output_arguments(parser)

    def run(self, **options):
        loaded = self.load(options)
        cfg = self.test_config(options, allow_tune=False)
        result = tune_alpha(loaded.samples, self.tuning_config(options), cfg)
        return JSONRenderer().render(TuningResultSerializer(result).data, renderer_context={'indent': 2})
