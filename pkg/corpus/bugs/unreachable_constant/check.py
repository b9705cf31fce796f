"""Exit 0 iff the target function in the patched file matches oracle.src token for token."""

import json
import re
import sys
from pathlib import Path

TOKEN = re.compile(
    r'"(?:\\.|[^"\\])*"|\'(?:\\.|[^\'\\])*\'|\d+(?:\.\d+)?[fFdDlL]?|[A-Za-z_$][\w$]*'
    r"|\+\+|--|&&|\|\||[=!<>+\-*/%&|^]=|\S"
)
COMMENT = re.compile(r"//[^\n]*|/\*.*?\*/", re.S)


def function_tokens(text, name):
    toks = TOKEN.findall(COMMENT.sub(" ", text))
    for i, t in enumerate(toks):
        if t != name or i + 1 >= len(toks) or toks[i + 1] != "(":
            continue
        depth, j = 0, i + 1
        while j < len(toks):
            depth += {"(": 1, ")": -1}.get(toks[j], 0)
            j += 1
            if depth == 0:
                break
        if j >= len(toks) or toks[j] != "{":
            continue
        start = i
        while start > 0 and toks[start - 1] not in (";", "{", "}"):
            start -= 1
        depth = 0
        for k in range(j, len(toks)):
            depth += {"{": 1, "}": -1}.get(toks[k], 0)
            if depth == 0:
                return toks[start:k + 1]
    return None


def main():
    here = Path(__file__).resolve().parent
    name = json.loads((here / "bug.json").read_text())["function"]
    patched = Path(sys.argv[1]).read_text()
    got = function_tokens(patched, name)
    if got is None:
        return 2
    return 0 if got == function_tokens((here / "oracle.src").read_text(), name) else 1


if __name__ == "__main__":
    sys.exit(main())
