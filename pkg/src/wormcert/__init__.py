"""Numerical construction and grid certification of a C^{1,1} worm domain.

The domain Omega in C^2 is a worm-type domain whose w-discs rotate with
ln|z|^2 and whose radius profile is rounded off by the flat function
exp(-1/x). The package builds the profiles, evaluates the defining
functions of Omega and of its rotated neighborhoods, evaluates their Levi
forms, and certifies the inequalities behind the Stein neighborhood
construction and the failure of s-H-convexity on sample grids.
"""

__version__ = "0.1.0"
