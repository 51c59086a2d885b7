"""Molien block-size table use case."""

from __future__ import annotations

import logging
import time

from pydantic import BaseModel, ConfigDict, Field

from rieszbound.domain.sosmodel import family_molien_tables, sos_block_sizes, symmetric_block_sizes

logger = logging.getLogger(__name__)

#: Generator families shown in the table, in column order.
TABLE_FAMILIES = ('Q', 'minor2', 'minor3')


class BlockSizeRow(BaseModel):
    """Block sizes of the SOS multipliers at one SOS degree."""

    model_config = ConfigDict(frozen=True)

    delta: int
    plain: dict[str, int] = Field(..., description='Monomial-basis size per family')
    largest: dict[str, int] = Field(..., description='Largest isotypic block per family')
    isotypic: dict[str, dict[str, int]] = Field(default_factory=dict, description='Every nonzero isotypic block per family')


class MolienTableUseCase:
    """Use case for tabulating SOS block sizes with and without symmetry reduction."""

    async def execute(self, i: int, delta_min: int, delta_max: int, precision_bits: int) -> list[BlockSizeRow]:
        """Compute one row per SOS degree in ``[delta_min, delta_max]``.

        Args:
            i: Number of points of the constraint (3 or 4)
            delta_min: Smallest SOS degree
            delta_max: Largest SOS degree
            precision_bits: Working precision of the irreducible representations

        Raises:
            VariableCountError: If i is not 3 or 4
            ValueError: If the degree range is empty or negative

        """
        if not 0 <= delta_min <= delta_max:
            msg = f'Invalid degree range {delta_min}..{delta_max}'
            raise ValueError(msg)
        started = time.perf_counter()
        tables = family_molien_tables(i, delta_max, precision_bits)
        rows = []
        for delta in range(delta_min, delta_max + 1):
            plain = sos_block_sizes(i, delta, symmetry=False, precision_bits=precision_bits)
            isotypic = symmetric_block_sizes(tables, delta)
            rows.append(
                BlockSizeRow(
                    delta=delta,
                    plain={family: max(plain[family], default=0) for family in TABLE_FAMILIES},
                    largest={family: max(isotypic[family].values(), default=0) for family in TABLE_FAMILIES},
                    isotypic={family: isotypic[family] for family in TABLE_FAMILIES},
                )
            )
        logger.info('Block sizes for i=%d, delta %d..%d in %.2fs', i, delta_min, delta_max, time.perf_counter() - started)
        return rows
