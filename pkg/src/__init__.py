# GK-means: KNN-graph accelerated k-means
