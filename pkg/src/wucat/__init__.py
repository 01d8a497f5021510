"""wucat: exact verification toolkit for weakly unital dg categories and the
non-symmetric dg operads that govern them."""

__version__ = "0.1.0"
