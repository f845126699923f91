"""Comparing partitions with MoJo / MoJoFM and the rank statistics."""

from playtriage.evaluate import (bh_adjust, cliffs_delta, cohen_kappa, mann_whitney, max_mno,
                                 mno, mojofm)
from playtriage.partition import Partition

truth = Partition.from_groups([[1, 2, 3]])
for groups in ([[1, 2, 3]], [[1, 2], [3]], [[1], [2], [3]]):
    a = Partition.from_groups(groups)
    print(groups, "mno", mno(a, truth), "MoJoFM", mojofm(a, truth))
print("farthest partition from", truth, "is", max_mno(truth), "operations away")

# %% agreement and effect size
print("kappa:", cohen_kappa(list("AABB"), list("ABAB")))
print("Mann-Whitney:", mann_whitney([1, 2], [3, 4]))
print("Cliff's delta:", cliffs_delta([4, 5, 6, 7], [1, 2, 3, 5]))
print("BH:", bh_adjust([0.01, 0.04, 0.03]))
