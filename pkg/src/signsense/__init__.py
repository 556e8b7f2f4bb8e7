"""Sign-language motion features, vote fusion, and sentiment classification."""

__version__ = "0.1.0"
