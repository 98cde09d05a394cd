from pathlib import Path

from .model import CrfModel, log_partition, objective, path_score, prepare, train, viterbi
from .schema import LabelSchema, decode_labels, encode_labels, is_valid
from .templates import (
    EVENT_TEMPLATE_TEXT, TER_TEMPLATE_TEXT, FeatureTemplate, event_matrix,
    expand_features, parse_templates, ter_matrix,
)

__all__ = [
    "CrfModel", "log_partition", "objective", "path_score", "prepare", "train", "viterbi",
    "LabelSchema", "decode_labels", "encode_labels", "is_valid",
    "EVENT_TEMPLATE_TEXT", "TER_TEMPLATE_TEXT", "FeatureTemplate", "event_matrix",
    "expand_features", "parse_templates", "ter_matrix", "read_columns", "write_columns",
]


def read_columns(path):
    """CRF++ training data: token-per-line tab-separated columns, gold label last.

    Returns a list of ``(matrix, labels)`` pairs, one per blank-line-separated
    sentence.
    """
    sentences, matrix, labels = [], [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            if matrix:
                sentences.append((matrix, labels))
            matrix, labels = [], []
            continue
        cols = line.split("\t")
        matrix.append(cols[:-1])
        labels.append(cols[-1])
    if matrix:
        sentences.append((matrix, labels))
    return sentences


def write_columns(sentences, path) -> None:
    lines = []
    for matrix, labels in sentences:
        for row, lab in zip(matrix, labels):
            lines.append("\t".join([*row, lab]))
        lines.append("")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8", newline="\n")
