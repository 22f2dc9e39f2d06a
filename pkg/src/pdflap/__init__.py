"""pdflap — persistent directed flag Laplacian spectra for filtered digraphs."""

__version__ = "0.1.0"
