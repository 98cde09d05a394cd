"""CRF++-style unigram feature templates."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from ..errors import ColumnOutOfRange, TemplateSyntaxError

_CELL_RE = re.compile(r"%x\[(-?\d+),(\d+)\]")
_ID_RE = re.compile(r"U\d+")


@dataclass(frozen=True)
class FeatureTemplate:
    id: str
    cells: tuple  # (row_offset, column) pairs

    def __str__(self):
        return self.id + ":" + "/".join(f"%x[{r},{c}]" for r, c in self.cells)


def _parse_line(line: str, lineno: int) -> FeatureTemplate:
    m = _ID_RE.match(line)
    if not m or m.end() >= len(line) or line[m.end()] != ":":
        raise TemplateSyntaxError(lineno, 1, "expected U<digits>:")
    tid = m.group()
    pos = m.end() + 1
    cells = []
    while True:
        cm = _CELL_RE.match(line, pos)
        if not cm:
            raise TemplateSyntaxError(lineno, pos + 1, "expected %x[row,col]")
        row, col = int(cm.group(1)), int(cm.group(2))
        if not -4 <= row <= 4:
            raise TemplateSyntaxError(lineno, pos + 1, f"row offset {row} outside [-4, 4]")
        cells.append((row, col))
        pos = cm.end()
        if pos == len(line):
            break
        if line[pos] != "/":
            raise TemplateSyntaxError(lineno, pos + 1, "expected '/' between cells")
        pos += 1
    return FeatureTemplate(tid, tuple(cells))


def parse_templates(text: str) -> list[FeatureTemplate]:
    """Parse template lines; ``#`` comments, blank lines and ``B`` are skipped.

    The bigram line ``B`` is accepted for CRF++ compatibility; label
    transition weights are always part of the model.
    """
    templates = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#") or line == "B":
            continue
        tpl = _parse_line(line, lineno)
        if tpl.id in seen:
            raise TemplateSyntaxError(lineno, 1, f"duplicate template id {tpl.id}")
        seen.add(tpl.id)
        templates.append(tpl)
    return templates


def _cell_value(matrix, i, row_offset, col):
    r = i + row_offset
    if r < 0:
        return f"_B{r}"
    if r >= len(matrix):
        return f"_B+{r - len(matrix) + 1}"
    return matrix[r][col]


def expand_features(matrix: Sequence[Sequence[str]], templates: Sequence[FeatureTemplate]) -> list[list[str]]:
    """Feature strings per token; out-of-sentence rows become ``_B-k``/``_B+k``."""
    if matrix:
        width = min(len(row) for row in matrix)
        for tpl in templates:
            for _, col in tpl.cells:
                if col >= width:
                    raise ColumnOutOfRange(tpl.id, col)
    out = []
    for i in range(len(matrix)):
        feats = []
        for tpl in templates:
            vals = [_cell_value(matrix, i, r, c) for r, c in tpl.cells]
            feats.append(tpl.id + ":" + "/".join(vals))
        out.append(feats)
    return out


EVENT_TEMPLATE_TEXT = """\
# token
U00:%x[-2,1]
U01:%x[-1,1]
U02:%x[0,1]
U03:%x[1,1]
U04:%x[2,1]
# stem
U05:%x[-2,2]
U06:%x[-1,2]
U07:%x[0,2]
U08:%x[1,2]
U09:%x[2,2]
# POS
U10:%x[-2,3]
U11:%x[-1,3]
U12:%x[0,3]
U13:%x[1,3]
U14:%x[2,3]
# chunk
U15:%x[-2,4]
U16:%x[-1,4]
U17:%x[0,4]
U18:%x[1,4]
U19:%x[2,4]
B
"""

TER_TEMPLATE_TEXT = """\
# token
U00:%x[-2,1]
U01:%x[-1,1]
U02:%x[0,1]
U03:%x[1,1]
U04:%x[2,1]
# dictionary
U05:%x[0,2]
U06:%x[1,2]
U07:%x[2,2]
# token kind
U08:%x[-2,5]
U09:%x[-1,5]
U10:%x[0,5]
U11:%x[1,5]
U12:%x[2,5]
# token case
U13:%x[-2,6]
U14:%x[-1,6]
U15:%x[0,6]
U16:%x[1,6]
U17:%x[2,6]
# combined token/dictionary/case
U18:%x[0,1]/%x[0,2]/%x[0,4]
B
"""


def event_matrix(tokens) -> list[list[str]]:
    """Columns: position, token, stem, POS, chunk."""
    return [[str(i), t.text, t.stem, t.pos, t.chunk] for i, t in enumerate(tokens)]


def ter_matrix(tokens) -> list[list[str]]:
    """Columns: position, token, dictionary, kind, case, kind, case.

    The combined template reads case from column 4 while the case window
    reads column 6, so kind and case are laid out twice.
    """
    from ..preproc.gazetteer import dictionary_feature

    rows = []
    for i, t in enumerate(tokens):
        d = dictionary_feature(t)
        rows.append([str(i), t.text, d, t.kind, t.case, t.kind, t.case])
    return rows
