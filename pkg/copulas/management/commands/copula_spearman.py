import pandas as pd
from django.core.exceptions import ValidationError
from rest_framework.renderers import JSONRenderer

from copulas.coefficients import pseudo_observations, spearman_rho
from copulas.management.base import CopulaCommand
from copulas.serializers import SpearmanSerializer


class Command(CopulaCommand):
    """Management command printing Spearman's rho per population."""

    help = "Spearman's rho of a column pair, estimated from the (1, 1) Legendre coefficient"

    def add_arguments(self, parser):
        self.add_sample_arguments(parser)
        parser.add_argument('--pair', default='1,2', help='Two 1-based positions among the numeric columns')
        parser.add_argument('--ties', choices=('error', 'average'), default='error')
        self.add_output_arguments(parser)

    def run(self, **options):
        loaded = self.load(options)
        try:
            first, second = (int(position) for position in options['pair'].split(','))
        except ValueError:
            raise ValidationError(f"--pair must read i,j, got {options['pair']!r}")
        if not (1 <= first <= len(loaded.columns) and 1 <= second <= len(loaded.columns)) or first == second:
            raise ValidationError(f'--pair must name two distinct columns in 1..{len(loaded.columns)}')

        columns = [loaded.columns[first - 1], loaded.columns[second - 1]]
        rows = []
        for label, sample in zip(loaded.labels, loaded.samples):
            ps = pseudo_observations(sample[:, [first - 1, second - 1]], ties=options['ties'])
            rows.append({'label': label, 'n': ps.n, 'columns': columns, 'rho': spearman_rho(ps)})

        data = SpearmanSerializer(rows, many=True).data
        if options['format'] == 'csv':
            frame = pd.DataFrame(
                [{'label': row['label'], 'n': row['n'], 'columns': '/'.join(columns), 'rho': row['rho']} for row in data]
            )
            return frame.to_csv(index=False, float_format='%.6f', lineterminator='\n')
        return JSONRenderer().render(data, renderer_context={'indent': 2})
