# core/runner.py
import logging
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger(__name__)


class JobRunner:
    """Runs independent simulations, optionally on a thread pool.

    Results come back in submission order whatever the number of jobs, so
    output files do not depend on --jobs. numpy releases the GIL inside the
    matrix products that dominate a run.
    """

    def __init__(self, jobs=1):
        self.jobs = max(1, int(jobs))

    def run_all(self, fn, items):
        items = list(items)
        if self.jobs == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        logger.info("running %d jobs on %d threads", len(items), self.jobs)
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            return list(pool.map(fn, items))
