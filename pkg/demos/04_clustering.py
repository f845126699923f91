"""Density clustering with an estimated epsilon, and mean shift."""

import numpy as np
from scipy.spatial.distance import cdist

from playtriage.cluster import (dbscan, estimate_epsilon, mean_shift, nearest_neighbor_distances,
                                optics)

# %% epsilon is the largest gap between sorted nearest-neighbour distances
x = np.array([0.0, 1.0, 2.0, 10.0])[:, None]
d = cdist(x, x)
print("NN distances:", nearest_neighbor_distances(d), "eps:", estimate_epsilon(d))

# %% two groups on a line
x = np.array([0.0, 0.1, 0.2, 10.0, 10.1])[:, None]
d = cdist(x, x)
print("dbscan:", dbscan(d, eps=0.15).groups())
print("optics:", optics(d, eps=0.15).groups())

# %% exact duplicates give a zero NN distance, which lets the gap reach the group spacing
v = np.array([[0, 0], [0, 0], [0.25, 0], [3, 0], [3, 0], [3.25, 0]], float)
d = cdist(v, v)
eps = estimate_epsilon(d)
print("eps:", eps, "groups:", dbscan(d, eps).groups())

# %% mean shift on two blobs; bandwidth defaults to the median pairwise distance
rng = np.random.default_rng(0)
blobs = np.vstack([rng.normal(0, 0.1, (20, 2)), rng.normal(0, 0.1, (20, 2)) + [1.0, 0.0]])
print("bandwidth 0.5:", mean_shift(blobs, bandwidth=0.5).n_clusters, "clusters")
print("default bandwidth:", mean_shift(blobs).n_clusters, "clusters")
