# Approximate KNN graph construction
