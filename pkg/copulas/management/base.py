"""Shared plumbing of the copula management commands."""
import logging
import sys
from functools import partial
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from copulas.exceptions import CopulaError, DegenerateVariance, UnsupportedFormat
from copulas.ksample import TestConfig
from copulas.loaders import load_samples
from copulas.tuning import TuningConfig, tune_alpha
from copulas.validators import PAIRING_MODES, TIES_POLICIES

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGENERATE = 3

TUNE = 'tune'


def _validation_message(exc: ValidationError) -> str:
    return '; '.join(exc.messages)


class CopulaCommand(BaseCommand):
    """
    Base class translating engine errors into exit codes.

    Subclasses implement run(**options) and return the text to print.
    Usage errors exit with 1, data errors with 2 and a degenerate variance
    with 3.
    """

    output_formats = ('json', 'csv')

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(self._usage_error, parser)
        return parser

    @staticmethod
    def _usage_error(parser, message):
        if parser.called_from_command_line:
            parser.print_usage(sys.stderr)
            parser.exit(EXIT_USAGE, f'{parser.prog}: error: {message}\n')
        raise CommandError(f'Error: {message}', returncode=EXIT_USAGE)

    def add_output_arguments(self, parser):
        parser.add_argument('--format', default='json', help=f"Output format ({', '.join(self.output_formats)})")
        parser.add_argument('--output', '-o', help='Write to this file instead of stdout')

    def add_sample_arguments(self, parser):
        parser.add_argument('files', nargs='+', help='One CSV per population, or one CSV with --group-col')
        parser.add_argument('--group-col', help='Column (name or 1-based position) splitting one file into populations')
        parser.add_argument('--no-header', action='store_true', help='The first line holds data, not names')
        parser.add_argument('--columns', help='Comma list of numeric columns to use (default: all)')

    def add_test_arguments(self, parser, allow_tune=True):
        parser.add_argument('--dmax', type=int, help='Highest coefficient shell d(n)')
        alpha_help = "Penalty factor alpha, or 'tune'" if allow_tune else 'Penalty factor alpha'
        parser.add_argument('--alpha', help=alpha_help)
        parser.add_argument('--pairing', choices=PAIRING_MODES, help='paired or independent samples')
        parser.add_argument('--level', type=float, help='Test level')
        parser.add_argument('--ties', choices=TIES_POLICIES, help='Reject ties (error) or use midranks (average)')
        parser.add_argument('--seed', type=int, help='Seed of the alpha tuning splits')
        parser.add_argument('--k-prime', type=int, help="Number of parts K' when tuning alpha")
        parser.add_argument('--tuning-reps', type=int, help='Number of tuning splits N')

    def load(self, options):
        columns = options['columns'].split(',') if options.get('columns') else None
        return load_samples(
            options['files'],
            header=not options['no_header'],
            group_col=options.get('group_col'),
            columns=columns,
        )

    def tuning_config(self, options) -> TuningConfig:
        return TuningConfig.from_settings(
            seed=options.get('seed'),
            k_prime=options.get('k_prime'),
            n_reps=options.get('tuning_reps'),
        )

    def test_config(self, options, samples=None, allow_tune=True) -> TestConfig:
        """TestConfig from settings and flags; --alpha tune calibrates on the samples."""
        alpha = options.get('alpha')
        tune = isinstance(alpha, str) and alpha.strip().lower() == TUNE
        if tune and not allow_tune:
            raise CommandError(f"--alpha {TUNE} is not available for this command", returncode=EXIT_USAGE)
        if alpha is not None and not tune:
            try:
                alpha = float(alpha)
            except ValueError:
                raise ValidationError(f"--alpha must be a positive number or '{TUNE}', got {alpha!r}")

        cfg = TestConfig.from_settings(
            d_max=options.get('dmax'),
            alpha_penalty=None if tune else alpha,
            pairing=options.get('pairing'),
            level=options.get('level'),
            ties=options.get('ties'),
        )
        if tune:
            tuned = tune_alpha(samples, self.tuning_config(options), cfg)
            self.stderr.write(f'Tuned alpha={tuned.alpha_hat}' + (' (grid exhausted)' if tuned.exhausted else ''))
            cfg = cfg.with_alpha(tuned.alpha_hat)
        return cfg

    def emit(self, content, options):
        if isinstance(content, bytes):
            content = content.decode('utf-8')
        if options.get('output'):
            Path(options['output']).write_text(content if content.endswith('\n') else content + '\n')
            self.stderr.write(self.style.SUCCESS(f"Wrote {options['output']}"))
        else:
            self.stdout.write(content.rstrip('\n'))

    def handle(self, *args, **options):
        if options['format'] not in self.output_formats:
            raise CommandError(
                f"Unsupported format {options['format']!r}; expected one of {', '.join(self.output_formats)}",
                returncode=EXIT_USAGE,
            )
        try:
            content = self.run(**options)
        except (ValidationError, UnsupportedFormat) as exc:
            message = _validation_message(exc) if isinstance(exc, ValidationError) else str(exc)
            raise CommandError(message, returncode=EXIT_USAGE)
        except DegenerateVariance as exc:
            logger.error(f'{self.__module__}: {exc}')
            raise CommandError(str(exc), returncode=EXIT_DEGENERATE)
        except CopulaError as exc:
            raise CommandError(str(exc), returncode=EXIT_DATA)
        self.emit(content, options)

    def run(self, **options):
        raise NotImplementedError('subclasses of CopulaCommand must provide a run() method')
