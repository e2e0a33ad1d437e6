import json

ROW_LABELS = {"ensemble": "Ensemble", "knn": "KNN", "tree": "DT", "svm_linear": "SVM"}
CONDITIONS = (("raw", "Original feature space"), ("llt", "Feature space transformed by LLT"))


def report_json(report, timing=True):
    """Serialize an :class:`EvalReport` with a fixed key order."""
    return json.dumps(report.to_dict(timing=timing), indent=2) + "\n"


def render_table(accuracies, symbols, kinds, conditions=CONDITIONS):
    """Aligned accuracy table, one block per condition.

    ``accuracies[condition][symbol][kind]`` is a fraction in [0, 1]; missing
    cells print as ``-``.
    """
    width = max(8, *(len(s) for s in symbols))
    lines = []
    for cond, title in conditions:
        if cond not in accuracies:
            continue
        lines.append(f"Classification accuracies (%) - {title}")
        lines.append(" " * 10 + "".join(f"{s:>{width + 2}}" for s in symbols))
        lines.append("-" * (10 + (width + 2) * len(symbols)))
        for kind in kinds:
            cells = []
            for s in symbols:
                acc = accuracies[cond].get(s, {}).get(kind)
                cells.append(f"{'-' if acc is None else f'{100 * acc:.1f}':>{width + 2}}")
            lines.append(f"{ROW_LABELS.get(kind, kind):<10}" + "".join(cells))
        lines.append("")
    return "\n".join(lines)
