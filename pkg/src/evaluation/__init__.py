# Oracles, metrics, traces and benchmarks
