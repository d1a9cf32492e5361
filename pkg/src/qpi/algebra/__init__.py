"""Exact arithmetic: binary fields in +-1 form, partitions, rational linear algebra."""

from .field import (
    IRREDUCIBLE,
    FieldError,
    GF2mElem,
    bit_to_pm1,
    columns_to_elems,
    elems_to_columns,
    f2_add,
    f2m_add,
    f2m_mul,
    from_bits,
    pm1_to_bit,
    to_bits,
)
from .linalg import LinalgError, RationalMatrix, inverse, rank, rank_rows, solve_right, solve_vector
from .partition import (
    InconsistentSystem,
    Partition,
    PartitionError,
    char_vector,
    parity_check,
    partition_bits,
    partition_rank,
    partition_unrank,
    solve_affine,
    stirling2,
    syndrome,
)

__all__ = [
    "IRREDUCIBLE",
    "FieldError",
    "GF2mElem",
    "InconsistentSystem",
    "LinalgError",
    "Partition",
    "PartitionError",
    "RationalMatrix",
    "bit_to_pm1",
    "char_vector",
    "columns_to_elems",
    "elems_to_columns",
    "f2_add",
    "f2m_add",
    "f2m_mul",
    "from_bits",
    "inverse",
    "parity_check",
    "partition_bits",
    "partition_rank",
    "partition_unrank",
    "pm1_to_bit",
    "rank",
    "rank_rows",
    "solve_affine",
    "solve_right",
    "solve_vector",
    "stirling2",
    "syndrome",
    "to_bits",
]
