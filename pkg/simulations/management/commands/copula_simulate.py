from django.core.exceptions import ValidationError

from copulas.management.base import CopulaCommand
from simulations.designs import load_design, parse_alpha
from simulations.harness import run_experiment
from simulations.models import ExperimentRun
from simulations.reports import FORMATS, emit_report
from simulations.serializers import ExperimentReportSerializer


class Command(CopulaCommand):
    """Management command running a Monte Carlo simulation design."""

    help = 'Run a simulation design (a shipped id such as alt1 or d1, or a design file path)'
    output_formats = FORMATS

    def add_arguments(self, parser):
        parser.add_argument('design', help='Design id or path to a KEY=VALUE design file')
        parser.add_argument('--replications', type=int, help='Override N_REPLICATIONS')
        parser.add_argument('--seed', type=int, help='Override SEED')
        parser.add_argument('--level', type=float, help='Override LEVEL')
        parser.add_argument('--alpha', help="Override ALPHA (a number or 'tune')")
        parser.add_argument('--dmax', type=int, help='Override D_MAX')
        parser.add_argument('--pairing', choices=('paired', 'independent'), help='Override PAIRING')
        parser.add_argument('--batch-size', type=int, help='Replications per Celery task')
        parser.add_argument('--save', action='store_true', help='Record the run as an ExperimentRun')
        parser.add_argument('--timing', action='store_true', help='Include the runtime in JSON reports')
        self.add_output_arguments(parser)

    def run(self, **options):
        overrides = {
            'n_replications': options['replications'],
            'seed': options['seed'],
            'level': options['level'],
            'd_max': options['dmax'],
            'pairing': options['pairing'],
        }
        overrides = {key: value for key, value in overrides.items() if value is not None}
        if options['alpha'] is not None:
            overrides['alpha'] = parse_alpha(options['alpha'])

        cfg = load_design(options['design']).with_overrides(**overrides)
        if options['batch_size'] is not None and options['batch_size'] < 1:
            raise ValidationError(f"--batch-size must be positive, got {options['batch_size']}")

        run = None
        if options['save']:
            run = ExperimentRun.objects.create(
                design_id=cfg.design_id,
                mode=cfg.mode,
                seed=cfg.seed,
                n_replications=cfg.n_replications,
                config=cfg.as_payload(),
            )
            run.mark_running()

        try:
            report = run_experiment(cfg, batch_size=options['batch_size'])
        except Exception as exc:
            if run is not None:
                run.mark_failed(exc)
            raise

        if run is not None:
            stored = ExperimentReportSerializer(report, context={'include_timing': True}).data
            run.mark_completed(stored, report.runtime_seconds)
            self.stderr.write(self.style.SUCCESS(f'Saved run {run.id}'))

        return emit_report(report, options['format'], include_timing=options['timing'])
