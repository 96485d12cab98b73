"""Digital nets over Z_b with digit folding and worst-case error tools."""

__version__ = "0.1.0"
