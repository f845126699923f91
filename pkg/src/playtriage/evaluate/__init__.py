from .mojo import max_mno, mno, mojofm
from .stats import bh_adjust, cliffs_delta, cohen_kappa, mann_whitney

__all__ = ["bh_adjust", "cliffs_delta", "cohen_kappa", "mann_whitney", "max_mno", "mno", "mojofm"]
