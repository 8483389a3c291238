"""Regenerates the bundled toy datasets.

    python3 data/generate_toy.py

toy.csv             500 rows, 8 features (one categorical), 2 balanced classes
toy_imbalanced.csv  2000 rows, 8 features, minority class at 5%
"""

from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent
PROTOCOLS = np.array(["tcp", "udp", "icmp"])


def write(path, features, protocols, labels):
    header = ["duration", "protocol", "src_bytes", "dst_bytes", "count",
              "srv_count", "error_rate", "same_srv_rate", "label"]
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row, proto, label in zip(features, protocols, labels):
            cells = [f"{row[0]:.6f}", proto] + [f"{v:.6f}" for v in row[1:]] + [label]
            f.write(",".join(cells) + "\n")


def balanced(rng):
    n = 500
    labels = np.array(["normal"] * 250 + ["attack"] * 250)
    rng.shuffle(labels)
    attack = labels == "attack"
    x = rng.normal(0.0, 1.0, size=(n, 7))
    x[attack, :3] += 1.6
    x[attack, 5] -= 1.2
    protocols = np.where(attack, rng.choice(PROTOCOLS, n, p=[0.2, 0.2, 0.6]),
                         rng.choice(PROTOCOLS, n, p=[0.6, 0.3, 0.1]))
    write(HERE / "toy.csv", x, protocols, labels)


def imbalanced(rng):
    n = 2000
    minority = 100
    labels = np.array(["normal"] * (n - minority) + ["rare_attack"] * minority)
    rng.shuffle(labels)
    rare = labels == "rare_attack"
    x = rng.normal(0.0, 1.0, size=(n, 7))
    x[rare, 0] += 1.4
    x[rare, 2] += 1.2
    x[rare, 4] -= 1.0
    x[rare, 6] += 0.8
    protocols = rng.choice(PROTOCOLS, n, p=[0.5, 0.3, 0.2])
    write(HERE / "toy_imbalanced.csv", x, protocols, labels)


if __name__ == "__main__":
    balanced(np.random.default_rng(20240501))
    imbalanced(np.random.default_rng(20240502))
