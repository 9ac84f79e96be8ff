"""shift-spectra: exact generalized spectra of Perron-Frobenius operators on shift spaces."""

__version__ = "0.1.0"
