"""Level set estimation with Gaussian-process surrogates and an (eps, delta) stopping rule."""

__version__ = "0.1.0"
