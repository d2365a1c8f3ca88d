#!/usr/bin/env python
"""
Script to view saved trajectory CSV files.

Loads the CSV written by ``run_pagerank.py experiment`` and shows it as a
table next to the log-linear fit of the averaged error, so earlier
experiments can be inspected without re-running them.

Usage:
  python view_trajectory.py [trajectory.csv ...]
  python view_trajectory.py --dir output

Example:
  python view_trajectory.py output/traj_seed42.csv
"""

import argparse
import glob
import os
import sys

from rich.console import Console
from rich.markup import escape

from src.errors import PageRankError
from src.experiment import parse_csv
from src.formatter import decay_panel, trajectory_table

console = Console()


def find_trajectory_files(output_dir="output"):
    """
    Find trajectory CSV files in a directory, newest first.

    Args:
        output_dir (str): Directory to search

    Returns:
        list: CSV file paths
    """
    if not os.path.exists(output_dir):
        return []
    files = glob.glob(os.path.join(output_dir, "*.csv"))
    files.sort(key=os.path.getmtime, reverse=True)
    return files


def show(path):
    """Render one trajectory file; returns 0 on success, 1 otherwise."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            table = parse_csv(f.read())
    except (OSError, PageRankError, ValueError) as e:
        console.print(f"[bold red]Error:[/bold red] {escape(path)}: {escape(str(e))}")
        return 1
    console.print(trajectory_table(table, title=os.path.basename(path)))
    console.print(decay_panel(table))
    return 0


def main(argv=None):
    """Main entry point for the trajectory viewer."""
    parser = argparse.ArgumentParser(description="View saved trajectory CSV files")
    parser.add_argument("files", nargs="*", help="Trajectory CSV files")
    parser.add_argument("--dir", help="Show every CSV file in this directory")
    args = parser.parse_args(argv)

    files = list(args.files)
    if args.dir:
        files.extend(find_trajectory_files(args.dir))
    if not files:
        parser.print_help()
        return 1

    status = 0
    for path in files:
        status = max(status, show(path))
    return status


if __name__ == "__main__":
    sys.exit(main())
