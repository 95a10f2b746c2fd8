"""
Export Package
==============
Handles writing run reports and reading them back.

Modules:
- writers: CSV (17 significant digits) and sorted JSON
- manifest: run manifest with package versions, stage times and SHA-256 hashes
- figures: deterministic SVG figures
- queries: duckdb SQL over the emitted CSVs
"""

from export.writers import points_frame, read_json, write_csv, write_json
from export.manifest import MANIFEST_NAME, RunManifest, file_sha256, hash_mismatches, load_manifest
from export.figures import plot_curves, plot_dimension_fit, plot_margin_heatmap, plot_trapped_cloud
from export.queries import (
    get_dimension_order_query,
    get_dimension_window_query,
    get_fiber_summary_query,
    get_margin_summary_query,
    get_trapped_summary_query,
    run_query,
)

__all__ = [
    'points_frame', 'read_json', 'write_csv', 'write_json',
    'MANIFEST_NAME', 'RunManifest', 'file_sha256', 'hash_mismatches', 'load_manifest',
    'plot_curves', 'plot_dimension_fit', 'plot_margin_heatmap', 'plot_trapped_cloud',
    'get_dimension_order_query', 'get_dimension_window_query', 'get_fiber_summary_query',
    'get_margin_summary_query', 'get_trapped_summary_query', 'run_query',
]
