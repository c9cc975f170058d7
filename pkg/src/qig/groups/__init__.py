"""Word-problem backends and the word metric."""

from .backends import Backend, Braid, Cyclic, DirectProduct, FreeProduct, Lamplighter, Rewriting, Semidirect, kb_check
from .core import BackendMismatch, BudgetExceeded, GroupElement, WordProblem, build_backend
from .oracle import OracleComparison, bfs_oracle, compare_ball

__all__ = [
    "Backend", "Braid", "Cyclic", "DirectProduct", "FreeProduct", "Lamplighter", "Rewriting",
    "Semidirect", "kb_check", "BackendMismatch", "BudgetExceeded", "GroupElement", "WordProblem",
    "build_backend", "bfs_oracle", "compare_ball", "OracleComparison",
]
