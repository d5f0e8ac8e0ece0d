"""LIBSVM-format dataset ingestion.

Lines look like `<label(s)> <index>:<value> ...` with 1-based, strictly
ascending indices; `#` starts a comment.  Binary labels {0,1} or {-1,+1}
are normalized to +-1; multiclass and multilabel class ids are remapped
to a dense 0..K-1 range with the mapping preserved.  Multilabel rows
carry comma-separated label lists.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

KINDS = ("binary", "multiclass", "multilabel")


class DataFormatError(ValueError):
    """Malformed dataset file; the message carries the offending line."""


@dataclass
class Dataset:
    X: sp.csr_matrix
    kind: str
    source: str = ""
    labels: np.ndarray | None = None          # binary +-1 or dense class ids
    label_sets: list | None = None            # multilabel: tuple of ids per row
    num_classes: int | None = None
    label_map: dict = field(default_factory=dict)  # original id -> dense id

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def num_features(self):
        return self.X.shape[1]

    @property
    def nnz(self):
        return int(self.X.nnz)

    @property
    def sparsity_percent(self):
        total = self.n * self.num_features
        return 100.0 * (1.0 - self.nnz / total) if total else 0.0

    def stats(self):
        return {
            "n": self.n,
            "d": self.num_features,
            "nnz": self.nnz,
            "sparsity_percent": self.sparsity_percent,
        }


def _parse_features(tokens, lineno):
    indices = []
    values = []
    previous = 0
    for token in tokens:
        try:
            idx_text, val_text = token.split(":", 1)
            idx = int(idx_text)
            val = float(val_text)
        except ValueError:
            raise DataFormatError(f"line {lineno}: bad feature token {token!r}") from None
        if idx < 1:
            raise DataFormatError(f"line {lineno}: feature indices are 1-based, got {idx}")
        if idx <= previous:
            raise DataFormatError(
                f"line {lineno}: feature indices must be strictly ascending"
            )
        previous = idx
        indices.append(idx - 1)
        values.append(val)
    return indices, values


def _parse_int_label(text, lineno):
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"line {lineno}: bad label {text!r}") from None
    if not value.is_integer():
        raise DataFormatError(f"line {lineno}: non-integer label {text!r}")
    return int(value)


def load_libsvm(path, kind, dim_override=None):
    """Read a LIBSVM text file into a Dataset of the requested kind."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    raw_labels = []
    indptr = [0]
    col_indices = []
    data = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            label_text = tokens[0]
            if kind == "multilabel":
                parts = [t for t in label_text.split(",") if t]
                if not parts:
                    raise DataFormatError(f"line {lineno}: empty label set")
                raw_labels.append(tuple(_parse_int_label(t, lineno) for t in parts))
            elif kind == "multiclass":
                if "," in label_text:
                    raise DataFormatError(
                        f"line {lineno}: comma-separated labels in a multiclass file"
                    )
                raw_labels.append(_parse_int_label(label_text, lineno))
            else:
                if "," in label_text:
                    raise DataFormatError(
                        f"line {lineno}: comma-separated labels in a binary file"
                    )
                try:
                    raw_labels.append(float(label_text))
                except ValueError:
                    raise DataFormatError(
                        f"line {lineno}: bad label {label_text!r}"
                    ) from None
            indices, values = _parse_features(tokens[1:], lineno)
            col_indices.extend(indices)
            data.extend(values)
            indptr.append(len(col_indices))

    if not raw_labels:
        raise DataFormatError(f"{path}: no data rows")

    needed = max(col_indices) + 1 if col_indices else 1
    if dim_override is not None:
        if dim_override < needed:
            raise DataFormatError(
                f"dimension override {dim_override} below max feature index {needed}"
            )
        d = int(dim_override)
    else:
        d = needed
    X = sp.csr_matrix(
        (np.array(data), np.array(col_indices, dtype=np.int64), np.array(indptr)),
        shape=(len(raw_labels), d),
    )

    if kind == "binary":
        values = sorted(set(raw_labels))
        if set(values) <= {0.0, 1.0}:
            labels = np.array([1.0 if v == 1.0 else -1.0 for v in raw_labels])
        elif set(values) <= {-1.0, 1.0}:
            labels = np.array(raw_labels)
        else:
            raise DataFormatError(
                f"binary labels must be {{0,1}} or {{-1,+1}}, found {values}"
            )
        return Dataset(X=X, kind=kind, source=str(path), labels=labels)

    if kind == "multiclass":
        seen = sorted(set(raw_labels))
        label_map = {orig: dense for dense, orig in enumerate(seen)}
        labels = np.array([label_map[v] for v in raw_labels], dtype=np.int64)
        return Dataset(
            X=X, kind=kind, source=str(path), labels=labels,
            num_classes=len(seen), label_map=label_map,
        )

    seen = sorted(set(z for row in raw_labels for z in row))
    label_map = {orig: dense for dense, orig in enumerate(seen)}
    label_sets = [tuple(sorted(label_map[z] for z in row)) for row in raw_labels]
    return Dataset(
        X=X, kind=kind, source=str(path), label_sets=label_sets,
        num_classes=len(seen), label_map=label_map,
    )


def save_libsvm(dataset, path):
    """Write a Dataset back out as LIBSVM text (dense label ids as stored)."""
    X = dataset.X.tocsr()
    with open(path, "w") as fh:
        for i in range(dataset.n):
            if dataset.kind == "binary":
                label = "+1" if dataset.labels[i] > 0 else "-1"
            elif dataset.kind == "multiclass":
                label = str(int(dataset.labels[i]))
            else:
                label = ",".join(str(z) for z in dataset.label_sets[i])
            start, end = X.indptr[i], X.indptr[i + 1]
            features = " ".join(
                f"{X.indices[k] + 1}:{float(X.data[k])!r}" for k in range(start, end)
            )
            fh.write(f"{label} {features}".rstrip() + "\n")
