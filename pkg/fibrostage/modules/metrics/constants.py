"""Error messages for evaluation metrics."""

ERROR_MESSAGES = {
    "GEOMETRY": "Masks are on different grids: {a} vs {b}",
    "EMPTY_MASK": "Hausdorff distance needs two nonempty masks",
    "SINGLE_CLASS": "AUC needs both classes, got {n_pos} positives and {n_neg} negatives",
    "NO_DECISIONS": "Accuracy needs at least one decision",
    "LENGTH": "{n_scores} scores for {n_labels} labels",
    "NO_LABELS": "No staged subject has a ground-truth stage",
}
