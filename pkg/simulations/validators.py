from django.core.exceptions import ValidationError

from copulas.validators import PAIRING_MODES, TIES_POLICIES, TestConfigValidator

MODES = ('test', 'cluster')


class ExperimentConfigValidator:
    """Validator class for simulation designs."""

    @staticmethod
    def validate_sizes(sizes, K: int, pairing: str) -> None:
        """
        Validate the sample-size settings of a design.

        Args:
            sizes: One tuple of K population sizes per setting
            K: Number of populations
            pairing: 'paired' requires equal sizes within each setting

        Raises:
            ValidationError: If a setting has the wrong length, a size below 2,
                or unequal sizes in paired mode
        """
        if not sizes:
            raise ValidationError('A design needs at least one sample size')
        for setting in sizes:
            if len(setting) != K:
                raise ValidationError(f'Size setting {setting} does not list {K} populations')
            if min(setting) < 2:
                raise ValidationError(f'Sample sizes must be at least 2, got {setting}')
            if pairing == 'paired' and len(set(setting)) > 1:
                raise ValidationError(f'Paired designs need equal sample sizes, got {setting}')

    @staticmethod
    def validate_scenarios(scenarios, K: int, p: int) -> None:
        if not scenarios:
            raise ValidationError('A design needs at least one copula scenario')
        for scenario in scenarios:
            if len(scenario.specs) != K:
                raise ValidationError(
                    f'Scenario {scenario.name!r} has {len(scenario.specs)} copulas for {K} populations'
                )
            if any(spec.p != p for spec in scenario.specs):
                raise ValidationError(f'Scenario {scenario.name!r} mixes copula dimensions; expected p={p}')

    @staticmethod
    def validate_expected_clusters(expected, K: int) -> None:
        members = sorted(population for cluster in expected for population in cluster)
        if members != list(range(1, K + 1)):
            raise ValidationError(f'EXPECTED_CLUSTERS must partition populations 1..{K}, got {expected}')

    @classmethod
    def validate(cls, cfg) -> None:
        """Validate every field of an ExperimentConfig."""
        if cfg.mode not in MODES:
            raise ValidationError(f"Design mode must be one of {', '.join(MODES)}; got {cfg.mode!r}")
        if cfg.K < 2:
            raise ValidationError(f'A design needs at least two populations, got K={cfg.K}')
        if cfg.p < 2:
            raise ValidationError(f'Copula dimension must be at least 2, got p={cfg.p}')
        if cfg.n_replications < 1:
            raise ValidationError(f'n_replications must be at least 1, got {cfg.n_replications}')

        TestConfigValidator.validate_choice('pairing', cfg.pairing, PAIRING_MODES)
        TestConfigValidator.validate_choice('ties', cfg.ties, TIES_POLICIES)
        TestConfigValidator.validate_level(cfg.level)
        TestConfigValidator.validate_d_max(cfg.d_max)
        if cfg.alpha is not None:
            TestConfigValidator.validate_alpha(cfg.alpha)

        cls.validate_sizes(cfg.sizes, cfg.K, cfg.pairing)
        cls.validate_scenarios(cfg.scenarios, cfg.K, cfg.p)

        if cfg.mode == 'cluster':
            if cfg.expected_clusters is None:
                raise ValidationError('Cluster designs must declare EXPECTED_CLUSTERS')
            cls.validate_expected_clusters(cfg.expected_clusters, cfg.K)
