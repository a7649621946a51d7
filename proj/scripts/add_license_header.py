#!/usr/bin/env python3
"""Prepends the Apache 2.0 header to every source and CMake file.

Files that already carry the header are left alone, so the script can be
rerun after adding files.
"""

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
DIRS = ["include", "src", "tests", "tools", "bench", "scripts"]
SUFFIXES = {".cc", ".h", ".py", ".txt"}
MARKER = "Licensed under the Apache License, Version 2.0"

BODY = """
Copyright 2026  speechchain authors

See COPYING at the top of the source tree for the full license text.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

 http://www.apache.org/licenses/LICENSE-2.0

THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
MERCHANTABLITY OR NON-INFRINGEMENT.
See the Apache 2 License for the specific language governing permissions and
limitations under the License.
"""


def header(rel, prefix):
    lines = [rel, ""] + BODY.strip("\n").split("\n")
    out = []
    for line in lines:
        out.append(f"{prefix} {line}".rstrip() if line else prefix)
    out[1] = ""  # blank line after the path, as in the Kaldi sources
    return "\n".join(out) + "\n\n"


def targets():
    yield ROOT / "CMakeLists.txt"
    for d in DIRS:
        for p in sorted((ROOT / d).rglob("*")):
            if p.is_file() and p.suffix in SUFFIXES:
                if p.suffix == ".txt" and p.name != "CMakeLists.txt":
                    continue
                yield p


def main():
    changed = 0
    for path in targets():
        text = path.read_text()
        if MARKER in text[:2000]:
            continue
        prefix = "//" if path.suffix in {".cc", ".h"} else "#"
        rel = path.relative_to(ROOT).as_posix()
        shebang = ""
        if text.startswith("#!"):
            shebang, _, text = text.partition("\n")
            shebang += "\n"
        path.write_text(shebang + header(rel, prefix) + text)
        changed += 1
    print(f"headers added to {changed} files", file=sys.stderr)


if __name__ == "__main__":
    main()
