# Core types, configuration and compiled kernels
