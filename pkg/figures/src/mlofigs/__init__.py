"""Plot rendering for simulator sweep CSVs.

This package is a read-only consumer of the CSV files the simulator
writes; it never recomputes statistics and never imports the simulator.
"""

from mlofigs.schema import SchemaError

__all__ = ["SchemaError"]
