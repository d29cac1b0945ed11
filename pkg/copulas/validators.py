from typing import Optional, Sequence

from django.conf import settings
from django.core.exceptions import ValidationError

PAIRING_MODES = ('paired', 'independent')
PENALTY_KINDS = ('log_n',)
TIES_POLICIES = ('error', 'average')


class TestConfigValidator:
    """Validator class for K-sample test settings."""

    __test__ = False

    @staticmethod
    def validate_d_max(d_max: int, upper: Optional[int] = None) -> None:
        """
        Validate the highest coefficient shell.

        Args:
            d_max: Highest shell d(n)
            upper: Largest supported shell, settings.COPULA_TEST["MAX_D_MAX"] by default

        Raises:
            ValidationError: If d_max is not an integer in [2, upper]
        """
        if upper is None:
            upper = settings.COPULA_TEST['MAX_D_MAX']
        if int(d_max) != d_max or not 2 <= d_max <= upper:
            raise ValidationError(f'd_max must be an integer between 2 and {upper}, got {d_max}')

    @staticmethod
    def validate_alpha(alpha: float) -> None:
        if not alpha > 0:
            raise ValidationError(f'Penalty factor alpha must be positive, got {alpha}')

    @staticmethod
    def validate_level(level: float) -> None:
        if not 0.0 < level < 1.0:
            raise ValidationError(f'Test level must lie in (0, 1), got {level}')

    @staticmethod
    def validate_choice(name: str, value: str, choices: Sequence[str]) -> None:
        if value not in choices:
            raise ValidationError(f"{name} must be one of {', '.join(choices)}; got {value!r}")

    @classmethod
    def validate(cls, cfg) -> None:
        """Validate every field of a TestConfig."""
        cls.validate_d_max(cfg.d_max)
        cls.validate_alpha(cfg.alpha_penalty)
        cls.validate_level(cfg.level)
        cls.validate_choice('penalty_kind', cfg.penalty_kind, PENALTY_KINDS)
        cls.validate_choice('pairing', cfg.pairing, PAIRING_MODES)
        cls.validate_choice('ties', cfg.ties, TIES_POLICIES)


class TuningConfigValidator:
    """Validator class for penalty tuning settings."""

    @staticmethod
    def validate(tcfg) -> None:
        """
        Validate a TuningConfig.

        Raises:
            ValidationError: If K' < 2, N < 1 or the alpha grid is empty,
                unsorted or not positive
        """
        if tcfg.k_prime < 2:
            raise ValidationError(f'k_prime must be at least 2, got {tcfg.k_prime}')
        if tcfg.n_reps < 1:
            raise ValidationError(f'n_reps must be at least 1, got {tcfg.n_reps}')

        grid = list(tcfg.alpha_grid)
        if not grid:
            raise ValidationError('alpha_grid must not be empty')
        if any(alpha <= 0 for alpha in grid):
            raise ValidationError('alpha_grid values must be positive')
        if any(later <= earlier for earlier, later in zip(grid, grid[1:])):
            raise ValidationError('alpha_grid must be strictly ascending')
