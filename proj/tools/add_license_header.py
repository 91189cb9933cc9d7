#!/usr/bin/env python3
# Copyright 2026 The tndpq Authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Prepends the license header to C++ sources that do not carry it yet."""

import argparse
import pathlib

MARKER = "Licensed under the Apache License, Version 2.0"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("header", type=pathlib.Path)
    ap.add_argument("roots", nargs="+", type=pathlib.Path)
    args = ap.parse_args()
    header = args.header.read_text().rstrip("\n") + "\n\n"
    for root in args.roots:
        files = [root] if root.is_file() else sorted(root.rglob("*"))
        for path in files:
            if path.suffix not in (".h", ".cc"):
                continue
            text = path.read_text()
            if MARKER in text[:1000]:
                continue
            path.write_text(header + text)
            print(f"added: {path}")


if __name__ == "__main__":
    main()
