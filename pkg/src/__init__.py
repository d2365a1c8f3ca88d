"""
mp-pagerank - randomized Matching-Pursuit PageRank with strictly local
per-page updates, a dense oracle, spectral rate analysis and distributed
network-size estimation.
"""

__version__ = "0.1.0"
