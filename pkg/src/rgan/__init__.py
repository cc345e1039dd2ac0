"""Restrained GANs for minority-class augmentation of tabular data."""

__version__ = "0.1.0"
