# gaudin/processors/chars_processor.py
import logging
from typing import Any, Dict, List, Sequence, Tuple

from gaudin.algebra.characters import compare_characters, partitions_up_to
from gaudin.core.config import RunConfig
from gaudin.core.errors import ConfigError
from gaudin.model.tensor_space import Partition, singular_dim, weyl_dimension
from gaudin.processors.base import EXIT_CHECK, EXIT_OK, BaseProcessor, Result
from gaudin.utils.serialization import qseries_to_json

logger = logging.getLogger(__name__)


def schur_weyl_rows(partitions: Sequence[Tuple[int, ...]], N: int) -> List[Dict[str, Any]]:
    """sum over lambda |- n of singular_dim * weyl_dimension against N^n, per size n in the sweep."""
    totals: Dict[int, int] = {}
    for parts in partitions:
        lam = Partition(parts)
        totals[lam.n] = totals.get(lam.n, 0) + singular_dim(lam) * weyl_dimension(lam)
    return [{"n": n, "total": total, "expected": N ** n, "match": total == N ** n}
            for n, total in sorted(totals.items())]


class CharsProcessor(BaseProcessor):
    """Graded characters of the Bethe algebra and of the singular subspace, with the generator oracle."""

    name = "chars"

    def process(self, run: RunConfig) -> Result:
        max_size = run.extras.get("max_size")
        schur_weyl: List[Dict[str, Any]] = []
        if max_size is not None:
            max_N = run.extras.get("max_N") or run.N
            if max_size < 0 or max_N < 1:
                raise ConfigError("--max-size must be >= 0 and --max-N >= 1")
            partitions = list(partitions_up_to(max_size, max_N))
            schur_weyl = schur_weyl_rows(partitions, max_N)
        else:
            partitions = [self.partition(run).parts]

        rows = []
        for parts in partitions:
            row = compare_characters(parts, run.truncation)
            for key in ("char_O", "char_V", "oracle"):
                row[key] = qseries_to_json(row[key])
            rows.append(row)
        passed = all(r["oracle_match"] and r["shift_match"] for r in rows)
        passed = passed and all(r["match"] for r in schur_weyl)
        logger.info("compared characters for %d partitions to order %d", len(rows), run.truncation)
        body: Dict[str, Any] = {"characters": rows, "passed": passed}
        if schur_weyl:
            body["schur_weyl"] = schur_weyl
        return self.envelope(run, None, body), EXIT_OK if passed else EXIT_CHECK
