"""CODATA 2018 physical constants (SI), hard-coded.

scipy.constants tracks the newest CODATA release, so values there can move
between scipy versions; these do not.
"""
import math

h = 6.62607015e-34  # J s (exact)
hbar = h / (2 * math.pi)  # 1.054571817...e-34 J s
k_B = 1.380649e-23  # J/K (exact)
epsilon_0 = 8.8541878128e-12  # F/m
