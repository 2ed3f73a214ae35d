#!/usr/bin/env python3
"""Builds the data/ corpus of small multiclass CSVs.

Sources: scikit-learn's bundled datasets (iris, wine, breast cancer, digits)
plus seeded synthetic Gaussian-mixture datasets with overlapping classes.
Re-running reproduces the same files byte for byte.
"""
import os

import numpy as np
from sklearn.datasets import load_breast_cancer, load_digits, load_iris, load_wine

OUT = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def write_csv(name, features, labels):
    n, d = features.shape
    path = os.path.join(OUT, name + ".csv")
    with open(path, "w") as f:
        f.write(",".join(f"f{j}" for j in range(d)) + ",class\n")
        for i in range(n):
            row = ",".join(repr(float(v)) for v in features[i])
            f.write(f"{row},{labels[i]}\n")
    print(f"{name}: {n} rows, {d} features, {len(set(labels))} classes")


def subsample(rng, features, labels, per_class):
    keep = []
    for c in sorted(set(labels)):
        rows = np.flatnonzero(labels == c)
        keep.extend(rng.choice(rows, size=min(per_class, len(rows)), replace=False))
    keep = sorted(keep)
    return features[keep], labels[keep]


def main():
    os.makedirs(OUT, exist_ok=True)
    rng = np.random.default_rng(20260826)

    iris = load_iris()
    write_csv("iris", iris.data, [iris.target_names[t] for t in iris.target])

    wine = load_wine()
    write_csv("wine", wine.data, [f"class_{t}" for t in wine.target])

    bc = load_breast_cancer()
    x, y = subsample(rng, bc.data, bc.target, 125)
    write_csv("breast_cancer", x, [bc.target_names[t] for t in y])

    digits = load_digits()
    mask = digits.target < 5
    x, y = subsample(rng, digits.data[mask], digits.target[mask], 30)
    write_csv("digits_small", x, [f"digit_{t}" for t in y])

    # Synthetic Gaussian mixtures with deliberate class overlap and two
    # sub-clusters per class, so canonical smoothing-heavy default
    # hyperparameter values leave visible headroom for optimisation.
    specs = [
        ("blobs_close", 3, 70, 2, 1.2, 1.0),
        ("blobs_skew", 3, 70, 3, 1.5, 1.6),
        ("blobs_wide", 4, 60, 2, 1.8, 2.2),
        ("blobs_highdim", 3, 70, 6, 2.0, 1.3),
        ("blobs_dense", 4, 60, 4, 1.4, 1.1),
    ]
    for name, n_classes, per_class, dims, sep, spread in specs:
        feats, labels = [], []
        centers = rng.normal(0.0, sep, size=(n_classes, dims))
        for c in range(n_classes):
            # each class is a pair of sub-clusters of unequal size and spread
            offset = rng.normal(0.0, sep, size=dims)
            n_minor = per_class // 3
            for sub, (center, count) in enumerate(
                [(centers[c], per_class - n_minor), (centers[c] + offset, n_minor)]
            ):
                scale = spread * (0.4 + 0.8 * rng.random(dims)) * (1.0 if sub == 0 else 0.5)
                pts = center + rng.normal(0.0, 1.0, size=(count, dims)) * scale
                feats.append(pts)
                labels.extend([f"c{c}"] * count)
        write_csv(name, np.vstack(feats), labels)


if __name__ == "__main__":
    main()
