"""Anytime coalition structure generation by multi-agent graph search."""

try:
    from ._core import (
        CapacityError,
        ConfigError,
        FormatError,
        IntegrityError,
        InvalidMoveError,
        ValueFunction,
        bridge_path,
        distribution,
        distribution_names,
        optimal,
        parse_structure,
        partition_count,
        solve,
        table_from_file,
        table_from_values,
    )
except ImportError:  # in-tree builds put _core next to the build dir instead
    from _core import (
        CapacityError,
        ConfigError,
        FormatError,
        IntegrityError,
        InvalidMoveError,
        ValueFunction,
        bridge_path,
        distribution,
        distribution_names,
        optimal,
        parse_structure,
        partition_count,
        solve,
        table_from_file,
        table_from_values,
    )

__all__ = [
    "CapacityError",
    "ConfigError",
    "FormatError",
    "IntegrityError",
    "InvalidMoveError",
    "ValueFunction",
    "bridge_path",
    "distribution",
    "distribution_names",
    "optimal",
    "parse_structure",
    "partition_count",
    "solve",
    "table_from_file",
    "table_from_values",
]
