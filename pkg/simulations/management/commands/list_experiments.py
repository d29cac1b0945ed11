from django.core.management.base import BaseCommand
from rest_framework.renderers import JSONRenderer

from simulations.designs import available_designs
from simulations.models import ExperimentRun
from simulations.serializers import ExperimentRunSerializer


class Command(BaseCommand):
    """Management command to list shipped designs and saved experiment runs."""

    help = 'List simulation designs and saved experiment runs'

    def add_arguments(self, parser):
        parser.add_argument('--design', help='Show only runs of this design')
        parser.add_argument('--status', choices=[choice for choice, _ in ExperimentRun.STATUS_CHOICES])
        parser.add_argument('--json', action='store_true', help='Print saved runs as JSON')

    def handle(self, *args, **options):
        queryset = ExperimentRun.objects.all()
        if options['design']:
            queryset = queryset.filter(design_id=options['design'])
        if options['status']:
            queryset = queryset.filter(status=options['status'])

        if options['json']:
            data = ExperimentRunSerializer(queryset, many=True).data
            self.stdout.write(JSONRenderer().render(data, renderer_context={'indent': 2}).decode('utf-8'))
            return

        self.stdout.write(self.style.SUCCESS(f"Designs: {', '.join(available_designs())}"))
        self.stdout.write(self.style.SUCCESS(f'Saved runs: {queryset.count()}\n'))

        for run in queryset:
            runtime = f'{run.runtime_seconds:.1f}s' if run.runtime_seconds is not None else '-'
            self.stdout.write(
                f'ID: {run.id}\n'
                f'Design: {run.design_id} ({run.mode})\n'
                f'Status: {run.status}\n'
                f'Seed: {run.seed}\n'
                f'Replications: {run.n_replications}\n'
                f'Cells: {len(run.report.get("rows", []))}\n'
                f'Runtime: {runtime}\n'
                f'Created: {run.created_at}\n'
                f'{"-" * 50}'
            )
            if run.status == 'failed':
                self.stdout.write(self.style.ERROR(f'Error: {run.error_message}'))
