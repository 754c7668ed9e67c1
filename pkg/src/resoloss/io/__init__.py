"""File formats: Touchstone traces, sweep/manifest CSV, reports and the loss catalog."""
from .catalog import CatalogEntry, Quantity, catalog_query, dump_catalog, load_catalog
from .report import Report, parse_report, write_report
from .sweepcsv import ManifestEntry, parse_manifest, parse_sweep_csv, write_sweep_csv
from .touchstone import parse_touchstone, write_touchstone

__all__ = [
    "CatalogEntry", "ManifestEntry", "Quantity", "Report",
    "catalog_query", "dump_catalog", "load_catalog",
    "parse_manifest", "parse_report", "parse_sweep_csv", "parse_touchstone",
    "write_report", "write_sweep_csv", "write_touchstone",
]
