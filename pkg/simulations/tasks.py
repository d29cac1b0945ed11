import logging
from typing import Dict, List, Optional

from celery import shared_task

from .designs import ExperimentConfig
from .harness import simulate_replication

logger = logging.getLogger(__name__)


@shared_task(bind=True, name='simulations.run_replication_batch')
def run_replication_batch(
    self,
    payload: Dict,
    cell: int,
    alpha: Optional[float],
    start: int,
    stop: int,
) -> List[Dict]:
    """
    Run replications [start, stop) of one (sizes, scenario) cell.

    Args:
        payload: ExperimentConfig.as_payload()
        cell: Index into cfg.cells()
        alpha: Penalty factor for this cell
        start: First replication index
        stop: One past the last replication index

    Returns:
        list: JSON-serialisable per-replication records
    """
    cfg = ExperimentConfig.from_payload(payload)
    logger.debug(f'{cfg.design_id}: cell {cell} replications {start}-{stop - 1} (task {self.request.id})')
    return [simulate_replication(cfg, cell, alpha, replication) for replication in range(start, stop)]
