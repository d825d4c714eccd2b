"""Block decomposition of exact two-parameter persistence modules over finite grids."""

from .blocks import Barcode, Birth, Death, HBand, Shape, VBand, enumerate_shapes, random_exact_module, synth
from .decompose import certify, check_lemmas, decompose, multiplicity
from .field import PrimeField, Subspace
from .grid import GridModule, restrict_path, smoothing, validate
from .interlevel import LabeledGraph, interlevel_barcode, interlevel_module
from .metric import bottleneck
from .zigzag import IntervalBarcode, Zigzag, synth_zigzag, zigzag_decompose

__all__ = [
    "Barcode",
    "Birth",
    "Death",
    "GridModule",
    "HBand",
    "IntervalBarcode",
    "LabeledGraph",
    "PrimeField",
    "Shape",
    "Subspace",
    "VBand",
    "Zigzag",
    "bottleneck",
    "certify",
    "check_lemmas",
    "decompose",
    "enumerate_shapes",
    "interlevel_barcode",
    "interlevel_module",
    "multiplicity",
    "random_exact_module",
    "restrict_path",
    "smoothing",
    "synth",
    "synth_zigzag",
    "validate",
    "zigzag_decompose",
]
