# Clustering: two-means tree, GK-means, run pipeline
