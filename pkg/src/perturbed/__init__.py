"""Cycles of every length in a dense graph perturbed by a random regular graph.

Library layout:

- graphs / pathsys: static graphs and the dynamic path/cycle system
- configmodel: uniform sampling of random 1- and 2-regular graphs
- instances: perturbed instances, host-graph families, availability queries
- matching / partition: maximum matching and the deficient-host partition
- twofactor / onefactor: the two cycle-construction pipelines
- verify: certificates, brute-force oracles, closed-form estimates
- experiments: Monte Carlo harnesses and trial fan-out
- cli: the `perturbed` command
"""

__version__ = "0.1.0"
