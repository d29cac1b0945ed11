"""
Simulation designs.

A design is a flat KEY=VALUE file read with python-decouple. Keys:

    DESIGN_ID, DESCRIPTION, MODE (test|cluster), K, P,
    SIZES              n;n;...  or  n1:...:nK;...
    FAMILIES, TAUS     one scenario per family and per tau vector
    POPULATIONS        family:tau,... (one mixed scenario, overrides FAMILIES/TAUS)
    STUDENT_DF, N_REPLICATIONS, LEVEL, SEED, PAIRING, TIES,
    ALPHA              number, or 'tune' for one tuning per cell on a pilot draw
    D_MAX, EXPECTED_CLUSTERS (cluster mode, e.g. 1|2,3|4,5,6)
"""
import logging
from dataclasses import asdict, dataclass, replace
from itertools import product
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from decouple import Config, Csv, RepositoryEnv, Undefined, UndefinedValueError, undefined
from django.conf import settings
from django.core.exceptions import ValidationError

from copulas.ksample import TestConfig

from .samplers import CopulaSpec, parse_family
from .validators import ExperimentConfigValidator

logger = logging.getLogger(__name__)

DESIGN_SUFFIX = '.env'
TUNE = 'tune'

Sizes = Tuple[int, ...]


class DesignFileConfig(Config):
    """decouple Config reading only the design file, never os.environ."""

    def get(self, option, default=undefined, cast=undefined):
        entries = self.repository.data
        if option in entries:
            value = entries[option]
        elif isinstance(default, Undefined):
            raise UndefinedValueError(f'{option} not found in design file')
        else:
            value = default

        if isinstance(cast, Undefined):
            return value
        if cast is bool:
            cast = self._cast_boolean
        return cast(value)


@dataclass(frozen=True)
class Scenario:
    """The copulas of the K populations in one column of a results table."""

    name: str
    specs: Tuple[CopulaSpec, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    design_id: str
    K: int
    p: int
    sizes: Tuple[Sizes, ...]
    scenarios: Tuple[Scenario, ...]
    n_replications: int = 500
    level: float = 0.05
    seed: int = 0
    pairing: str = 'paired'
    mode: str = 'test'
    # None means tuned once per cell
    alpha: Optional[float] = 1.0
    d_max: int = 3
    ties: str = 'error'
    expected_clusters: Optional[Tuple[Tuple[int, ...], ...]] = None
    description: str = ''

    def __post_init__(self):
        ExperimentConfigValidator.validate(self)

    @property
    def tunes_alpha(self) -> bool:
        return self.alpha is None

    def cells(self) -> List[Tuple[Sizes, Scenario]]:
        """(sizes, scenario) cells, sizes outermost."""
        return list(product(self.sizes, self.scenarios))

    def test_config(self, alpha: Optional[float] = None) -> TestConfig:
        return TestConfig(
            d_max=self.d_max,
            alpha_penalty=alpha if alpha is not None else (self.alpha or 1.0),
            pairing=self.pairing,
            level=self.level,
            ties=self.ties,
        )

    def with_overrides(self, **overrides) -> 'ExperimentConfig':
        """Copy with overridden fields; pass alpha=None explicitly to request tuning."""
        return replace(self, **overrides)

    def as_payload(self) -> Dict:
        """JSON-serialisable form sent to replication workers."""
        payload = asdict(self)
        payload['sizes'] = [list(setting) for setting in self.sizes]
        payload['scenarios'] = [
            {'name': scenario.name, 'specs': [asdict(spec) for spec in scenario.specs]}
            for scenario in self.scenarios
        ]
        if self.expected_clusters is not None:
            payload['expected_clusters'] = [list(cluster) for cluster in self.expected_clusters]
        return payload

    @classmethod
    def from_payload(cls, payload: Dict) -> 'ExperimentConfig':
        values = dict(payload)
        values['sizes'] = tuple(tuple(setting) for setting in payload['sizes'])
        values['scenarios'] = tuple(
            Scenario(item['name'], tuple(CopulaSpec(**spec) for spec in item['specs']))
            for item in payload['scenarios']
        )
        if payload.get('expected_clusters') is not None:
            values['expected_clusters'] = tuple(tuple(cluster) for cluster in payload['expected_clusters'])
        return cls(**values)


def size_label(sizes: Sizes) -> str:
    """'100' for equal sizes, '50:100' otherwise."""
    if len(set(sizes)) == 1:
        return str(sizes[0])
    return ':'.join(str(n) for n in sizes)


def parse_sizes(raw: str, K: int) -> Tuple[Sizes, ...]:
    settings_ = []
    for item in filter(None, (part.strip() for part in raw.split(';'))):
        try:
            values = tuple(int(value) for value in item.split(':'))
        except ValueError:
            raise ValidationError(f'SIZES entry {item!r} is not an integer list')
        settings_.append(values * K if len(values) == 1 else values)
    return tuple(settings_)


def parse_taus(raw: str, K: int) -> List[Tuple[float, ...]]:
    vectors = []
    for item in filter(None, (part.strip() for part in raw.split(';'))):
        taus = tuple(Csv(cast=float)(item))
        if len(taus) == 1:
            taus = taus * K
        if len(taus) != K:
            raise ValidationError(f'TAUS vector {item!r} must list 1 or {K} values')
        vectors.append(taus)
    return vectors


def parse_populations(raw: str, p: int, df: float) -> Tuple[CopulaSpec, ...]:
    specs = []
    for entry in Csv()(raw):
        family, sep, tau = entry.partition(':')
        if not sep:
            raise ValidationError(f'POPULATIONS entry {entry!r} must read family:tau')
        specs.append(CopulaSpec(family, float(tau), p=p, df=df))
    return tuple(specs)


def parse_expected_clusters(raw: str) -> Optional[Tuple[Tuple[int, ...], ...]]:
    if not raw.strip():
        return None
    return tuple(tuple(Csv(cast=int)(group)) for group in raw.split('|'))


def _scenario_name(family: str, taus: Tuple[float, ...], several: bool) -> str:
    if not several:
        return family
    if len(set(taus)) == 1:
        return f'{family}({taus[0]:g})'
    return f"{family}[{'/'.join(f'{tau:g}' for tau in taus)}]"


def build_scenarios(design: Config, K: int, p: int, df: float, design_id: str) -> Tuple[Scenario, ...]:
    populations = design('POPULATIONS', default='')
    if populations:
        return (Scenario(design('SCENARIO', default=design_id), parse_populations(populations, p, df)),)

    families = [parse_family(name) for name in design('FAMILIES', cast=Csv())]
    vectors = parse_taus(design('TAUS'), K)
    return tuple(
        Scenario(
            _scenario_name(family, taus, len(vectors) > 1),
            tuple(CopulaSpec(family, tau, p=p, df=df) for tau in taus),
        )
        for family in families
        for taus in vectors
    )


def resolve_design_path(design: Union[str, Path], designs_dir: Optional[Path] = None) -> Path:
    """A design given as a path, or as an id looked up in the designs directory."""
    path = Path(design)
    if path.is_file():
        return path
    directory = Path(designs_dir or settings.SIMULATION['DESIGNS_DIR'])
    candidate = directory / f'{design}{DESIGN_SUFFIX}'
    if candidate.is_file():
        return candidate
    raise ValidationError(f'Unknown design {design!r}; no such file and no {candidate.name} in {directory}')


def available_designs(designs_dir: Optional[Path] = None) -> List[str]:
    directory = Path(designs_dir or settings.SIMULATION['DESIGNS_DIR'])
    return sorted(path.stem for path in directory.glob(f'*{DESIGN_SUFFIX}'))


def parse_alpha(raw: Union[str, float, None]) -> Optional[float]:
    """A positive number, or None for 'tune'."""
    if raw is None or (isinstance(raw, str) and raw.strip().lower() == TUNE):
        return None
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"alpha must be a positive number or '{TUNE}', got {raw!r}")


def load_design(design: Union[str, Path], designs_dir: Optional[Path] = None) -> ExperimentConfig:
    """
    Read a design file into an ExperimentConfig.

    Args:
        design: Path to a design file, or the id of a shipped design
        designs_dir: Directory searched for ids (defaults to SIMULATION['DESIGNS_DIR'])

    Returns:
        ExperimentConfig: Validated design

    Raises:
        ValidationError: If a key is missing or a value is inconsistent
    """
    path = resolve_design_path(design, designs_dir)
    reader = DesignFileConfig(RepositoryEnv(str(path)))
    defaults = settings.SIMULATION

    try:
        design_id = reader('DESIGN_ID', default=path.stem)
        K = reader('K', cast=int)
        p = reader('P', cast=int)
        df = reader('STUDENT_DF', default=defaults['STUDENT_DF'], cast=float)
        cfg = ExperimentConfig(
            design_id=design_id,
            K=K,
            p=p,
            sizes=parse_sizes(reader('SIZES'), K),
            scenarios=build_scenarios(reader, K, p, df, design_id),
            n_replications=reader('N_REPLICATIONS', default=defaults['N_REPLICATIONS'], cast=int),
            level=reader('LEVEL', default=0.05, cast=float),
            seed=reader('SEED', default=0, cast=int),
            pairing=reader('PAIRING', default='paired'),
            mode=reader('MODE', default='test'),
            alpha=parse_alpha(reader('ALPHA', default='1.0')),
            d_max=reader('D_MAX', default=3, cast=int),
            ties=reader('TIES', default='error'),
            expected_clusters=parse_expected_clusters(reader('EXPECTED_CLUSTERS', default='')),
            description=reader('DESCRIPTION', default=''),
        )
    except UndefinedValueError as exc:
        raise ValidationError(f'{path.name}: {exc}')
    except ValueError as exc:
        raise ValidationError(f'{path.name}: {exc}')

    logger.debug(f'Loaded design {cfg.design_id} from {path}: {len(cfg.cells())} cells')
    return cfg
