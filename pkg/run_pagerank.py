"""
Runner script for mp-pagerank.

Examples:
  python run_pagerank.py gen --n 100 --threshold 0.5 --seed 42 --out g.txt
  python run_pagerank.py solve --graph g.txt --iters 20000 --seed 7
"""

import os
import sys

# Add the project directory to the path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.config import load_env
from src.main import main

if __name__ == "__main__":
    load_env()
    sys.exit(main())
