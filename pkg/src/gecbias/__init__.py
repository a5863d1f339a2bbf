"""Gender counterfactual augmentation and bias evaluation for GEC corpora."""

__version__ = "0.1.0"
