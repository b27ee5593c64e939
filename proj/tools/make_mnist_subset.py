#!/usr/bin/env python3
# Copyright 2026 The QAML Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes an IDX image/label pair holding the first N digits of each class.

Input is the per-digit JSON dump shipped in the `mnist` npm package
(src/digits/<d>.json, pixels stored as value/255 rounded to 3 decimals).

    npm pack mnist@1.1.0 && tar xzf mnist-1.1.0.tgz
    python3 tools/make_mnist_subset.py package/src/digits data/mnist01 --digits 0 1 --per-class 300
"""
import argparse
import json
import pathlib
import struct


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--digits", type=int, nargs="+", default=[0, 1])
    ap.add_argument("--per-class", type=int, default=300)
    args = ap.parse_args()

    images, labels = [], []
    for d in args.digits:
        flat = json.loads((args.digits_dir / f"{d}.json").read_text())["data"]
        count = min(args.per_class, len(flat) // 784)
        for i in range(count):
            px = flat[i * 784:(i + 1) * 784]
            images.append(bytes(max(0, min(255, round(v * 255))) for v in px))
            labels.append(d)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    with open(args.out_dir / "images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(img)
    with open(args.out_dir / "labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


if __name__ == "__main__":
    main()
