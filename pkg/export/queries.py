"""
Report Queries
==============
SQL over the emitted CSVs (duckdb read_csv_auto), used by the verify
command to re-check a run from its files alone.
"""

import duckdb
import pandas as pd


def _source(path: str) -> str:
    escaped = str(path).replace("'", "''")
    return f"read_csv_auto('{escaped}', header=true)"


def get_trapped_summary_query(path: str) -> str:
    """Counts and distance to the reference set per verdict."""
    return f'''
        SELECT
            verdict,
            COUNT(*) AS samples,
            MAX(distance) AS max_distance,
            AVG(distance) AS mean_distance
        FROM {_source(path)}
        GROUP BY verdict
        ORDER BY verdict
    '''


def get_margin_summary_query(path: str) -> str:
    """Sample count, failures and the smallest finite ratio of a margin report."""
    return f'''
        SELECT
            COUNT(*) AS samples,
            SUM(CASE WHEN failure THEN 1 ELSE 0 END) AS failures,
            MIN(CASE WHEN isfinite(ratio) THEN ratio END) AS min_ratio,
            MIN(value) AS min_value
        FROM {_source(path)}
    '''


def get_dimension_order_query(path: str) -> str:
    """Scales where the box count increases with the box size (must be none)."""
    return f'''
        SELECT scale, count, previous_count
        FROM (
            SELECT
                scale,
                count,
                LAG(count) OVER (ORDER BY scale ASC) AS previous_count
            FROM {_source(path)}
        )
        WHERE previous_count IS NOT NULL AND count > previous_count
        ORDER BY scale
    '''


def get_dimension_window_query(path: str) -> str:
    return f'''
        SELECT
            COUNT(*) AS scales,
            SUM(CASE WHEN in_window THEN 1 ELSE 0 END) AS window_scales,
            MIN(CASE WHEN in_window THEN scale END) AS window_low,
            MAX(CASE WHEN in_window THEN scale END) AS window_high
        FROM {_source(path)}
    '''


def get_fiber_summary_query(path: str) -> str:
    return f'''
        SELECT COUNT(*) AS points, MIN(x2) AS x2_min, MAX(x2) AS x2_max
        FROM {_source(path)}
    '''


def run_query(sql: str, conn=None) -> pd.DataFrame:
    """Execute on `conn` or a throwaway in-memory connection."""
    if conn is not None:
        return conn.execute(sql).fetchdf()
    with duckdb.connect(':memory:') as local:
        return local.execute(sql).fetchdf()
