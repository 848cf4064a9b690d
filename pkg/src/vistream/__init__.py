"""Regional-discrimination comment classifier for Vietnamese social media.

Subpackages: ``ingest`` (dataset I/O, balancing, splits), ``textprep``
(normalisation and word segmentation), ``features`` (bag of words),
``classify`` (naive Bayes, softmax regression, random forest), ``eval``
(metrics and grid search) and ``stream`` (broker, producer, classifying
consumer, CSV sink). ``python -m vistream.cli`` is the command line entry.
"""

from .classify import load_model, make_model, save_model
from .features import Vocabulary, fit_vocabulary, transform
from .ingest import Dataset, Label, RawComment, load_dataset
from .textprep import preprocess

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Label",
    "RawComment",
    "Vocabulary",
    "__version__",
    "fit_vocabulary",
    "load_dataset",
    "load_model",
    "make_model",
    "preprocess",
    "save_model",
    "transform",
]
