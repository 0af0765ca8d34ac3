"""Synthetic gaming-artifact generation and detection.

Thin package wrapper around the compiled extension. Images are numpy
arrays: RGB frames are (H, W, 3) uint8, grayscale rasters (H, W) float64.
"""

from ._core import (  # noqa: F401
    PcaModel,
    TrainedModel,
    __version__,
    anomaly_map,
    apply_glitch,
    artifact_kinds,
    build_corpus,
    dft2,
    dilate,
    evaluate,
    hog,
    idft2,
    pca_fit,
    predict,
    read_png,
    replay_glitch,
    resize,
    resize_gray,
    spectral_feature,
    to_gray,
    train,
    train_lda,
    train_lr,
    train_svc,
    train_threshold,
    write_png,
)

__all__ = [
    "PcaModel",
    "TrainedModel",
    "__version__",
    "anomaly_map",
    "apply_glitch",
    "artifact_kinds",
    "build_corpus",
    "dft2",
    "dilate",
    "evaluate",
    "hog",
    "idft2",
    "pca_fit",
    "predict",
    "read_png",
    "replay_glitch",
    "resize",
    "resize_gray",
    "spectral_feature",
    "to_gray",
    "train",
    "train_lda",
    "train_lr",
    "train_svc",
    "train_threshold",
    "write_png",
]
