"""
Nonsmooth Optimizer Service

Pluggable solvers for inequality-constrained nonsmooth problems. The
built-in strategy minimizes an exact l1 penalty with BFGS, a weak Wolfe
line search and a dynamic penalty parameter; multi-start fans solves out
over worker threads.
"""
