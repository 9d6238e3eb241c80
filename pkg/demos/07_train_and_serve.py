"""Training the companion generator and serving it back to the augmenter.

The trainer package consumes only the artifacts the augmentation toolkit
emits — the two pair files plus the schedule manifest — and then serves
its model over the remote-generation JSON protocol the augmenter's
``remote:`` backend speaks.  This demo runs the whole loop at reduced
scale (a shortened schedule on a small corpus) in under a minute.

Requires the companion package:  pip install -e ./trainer --no-build-isolation

Run:  python3 demos/07_train_and_serve.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

try:
    from pairtrainer import GenerationServer, TrainConfig, load_training_data, train_pairs
except ImportError:
    sys.exit("pairtrainer is not installed; run: pip install -e ./trainer --no-build-isolation")

SUBJECTS = "cook smith nurse guard tailor miner".split()
OBJECTS = "knife hammer needle rope shears drill".split()
PLACES = "kitchen forge ward".split()


def build_corpus(path: Path) -> None:
    """Twelve one-frame sentences, enough for a quick but non-trivial fit."""
    blocks = []
    for k in range(12):
        subject = SUBJECTS[k % 6]
        verb = ("uses", "holds")[k % 2]
        obj = OBJECTS[(k + 2) % 6]
        place = PLACES[k % 3]
        forms = ["The", subject, verb, "the", obj, "in", "the", place, "."]
        upos = ["DET", "NOUN", "VERB", "DET", "NOUN", "ADP", "DET", "NOUN", "PUNCT"]
        heads = [2, 3, 0, 5, 3, 8, 8, 3, 3]
        deprels = ["det", "nsubj", "root", "det", "obj", "case", "det", "obl", "punct"]
        lines = [f"# id = d{k:02d}", "# relation = Agent-Tool", "# subj = 2-2", "# obj = 5-5"]
        lines += [
            f"{i}\t{form}\t{upos[i - 1]}\t{heads[i - 1]}\t{deprels[i - 1]}"
            for i, form in enumerate(forms, start=1)
        ]
        blocks.append("\n".join(lines))
    path.write_text("\n\n".join(blocks) + "\n", encoding="utf-8")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        corpus = root / "demo.conllu"
        build_corpus(corpus)

        # 1) the augmenter emits pair files + manifest (its own CLI)
        subprocess.run(
            [sys.executable, "-m", "relaug.cli", "pairs", str(corpus),
             "--out", str(root / "pairs"), "--seed", "0"],
            check=True,
        )

        # 2) the trainer consumes them; schedule shortened for demo speed
        manifest, by_task = load_training_data(root / "pairs")
        demo_manifest = type(manifest)(
            iterations=1,
            epochs_per_task=3,
            task_order=manifest.task_order,
            pair_files=manifest.pair_files,
            threshold=manifest.threshold,
            seed=manifest.seed,
            hint_injection=manifest.hint_injection,
        )
        print("training (1 iteration x 3 epochs per task)...")
        bundle, state = train_pairs(demo_manifest, by_task, TrainConfig(seed=0))
        for record in state.history:
            print(f"    {record.task}: loss {record.losses[0]:.3f} -> {record.losses[-1]:.3f}")

        # 3) serve it and point the augmenter's remote backend at it
        server = GenerationServer(bundle, port=0)
        server.start_background()
        try:
            print(f"\nserving on {server.url}; running remote-backend augmentation...")
            subprocess.run(
                [sys.executable, "-m", "relaug.cli", "augment", str(corpus),
                 "--multiple", "1", "--backend", f"remote:{server.url}",
                 "--seed", "1", "--out", str(root / "out")],
                check=True,
            )
        finally:
            server.shutdown()
            server.server_close()

        rejects = (root / "out" / "rejects.jsonl").read_text("utf-8").splitlines()
        print(f"\nrejections: {len(rejects)}")
        for line in (root / "out" / "augmented.conllu").read_text("utf-8").splitlines():
            if line.startswith("# provenance"):
                print(f"    {line}")
            if line.startswith("# id"):
                print(f"\n{line}")
        print("\nfull loop complete: pairs -> train -> serve -> augment")


if __name__ == "__main__":
    main()
