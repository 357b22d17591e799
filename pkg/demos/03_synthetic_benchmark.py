"""Score the rule engine on a generated, labeled corpus.

The generator plants one known pattern per skill: six kinds of undeclared
behavior, six kinds of harmless extra detail, and fully declared controls.
Checking every skill and comparing against the ground truth shows whether
the engine separates the classes.  A second part reruns the arithmetic on
published-style counts.

Run with ``python demos/03_synthetic_benchmark.py [seed]``.
"""

from __future__ import annotations

import sys
import tempfile
from collections import Counter
from pathlib import Path

from _common import banner

from skillscope.evaluation import CLASS_ORDER, PATTERNS, compute_metrics, generate_synthetic_corpus, metrics_from_counts
from skillscope.pipeline import check_skill, find_skills, load_skills, parallel_map
from skillscope.taxonomy import load_taxonomy


def main(seed: int) -> None:
    taxonomy = load_taxonomy()
    spec = {p: 2 for p in PATTERNS}
    with tempfile.TemporaryDirectory() as tmp:
        written = generate_synthetic_corpus(seed, spec, tmp)
        skills, _ = load_skills(find_skills(tmp).skills, base=Path(tmp))
        results = parallel_map(lambda s: check_skill(s, taxonomy)[1], skills, jobs=4)

    predictions = {r.skill_id: r.verdict for r in results}
    truth = [label for _, label in written]
    evaluation = compute_metrics(predictions, truth)

    banner(f"Synthetic corpus, seed {seed}: {len(truth)} skills")
    print("  verdicts:", dict(Counter(v.value for v in predictions.values())))
    m = evaluation.metrics.to_json()
    print(f"  tp={m['tp']} fp={m['fp']} fn={m['fn']}  " + "  ".join(f"{k}={v}%" for k, v in m["percent"].items()))
    print("  confusion (rows = system, columns = label):")
    width = max(len(c.value) for c in CLASS_ORDER)
    for cls, row in zip(CLASS_ORDER, evaluation.confusion.to_json()):
        print(f"    {cls.value:<{width}}  " + "  ".join(f"{x:>3}" for x in row))
    misses = [l for l in truth if predictions[l.skill_id].value != l.label.value]
    for label in misses:
        print(f"  miss: {label.skill_id} labeled {label.label.value}, got {predictions[label.skill_id].value}")

    banner("Metric arithmetic on fixed counts")
    for counts in ((413, 74, 15), (36, 5, 2), (0, 0, 0)):
        doc = metrics_from_counts(*counts).to_json()
        print(f"  {counts}: " + " ".join(f"{k}={v}%" for k, v in doc["percent"].items()))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 7)
