"""
Line-based text formats for diagrams and decomposition rules.

Diagram block::

    V <id> <B|Z|X> <phase eighths> [row]
    E <id> <id> <P|H|S>
    LINK <id> <id>
    IN <id> ...
    OUT <id> ...
    SCALAR <a> <b> <c> <d> <k>

Rule file::

    # stardecomp-rule v1
    RULE <id>
    FAMILY <star_edge|star_state>
    LEGS <n>
    PHASE <eighths>
    TERMS <p>
    REDUCTION <r>
    LHS
    <diagram block>
    END
    BRANCH <a> <b> <c> <d> <k>
    <diagram block>
    END
"""
from __future__ import annotations

from .diagram import Diagram, EdgeType, VertexType
from .exceptions import FixtureFormatError
from .scalar import ExactScalar

DIAGRAM_HEADER = '# stardecomp-diagram v1'
RULE_HEADER = '# stardecomp-rule v1'

_VERTEX_CODES = {'B': VertexType.BOUNDARY, 'Z': VertexType.Z, 'X': VertexType.X}
_EDGE_CODES = {'P': EdgeType.PLAIN, 'H': EdgeType.HADAMARD, 'S': EdgeType.STAR}
_VERTEX_NAMES = {v: k for k, v in _VERTEX_CODES.items()}
_EDGE_NAMES = {v: k for k, v in _EDGE_CODES.items()}

_RULE_FIELDS = ('RULE', 'FAMILY', 'LEGS', 'PHASE', 'TERMS', 'REDUCTION')


def _ints(tokens, line_no, field):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FixtureFormatError("Expected integers", line=line_no, field=field) from None


def diagram_lines(d):
    """Render a diagram block (without header) as a list of lines."""
    ids = {v: i for i, v in enumerate(d.vertices())}
    lines = []
    for v in d.vertices():
        lines.append(f"V {ids[v]} {_VERTEX_NAMES[d.type(v)]} {d.phase(v)} {d.row(v):g}")
    for e in d.edges():
        u, v, kind = d.edge(e)
        lines.append(f"E {ids[u]} {ids[v]} {_EDGE_NAMES[kind]}")
    for u, v in sorted(d.links.items()):
        if u < v:
            lines.append(f"LINK {ids[u]} {ids[v]}")
    lines.append('IN ' + ' '.join(str(ids[v]) for v in d.inputs) if d.inputs else 'IN')
    lines.append('OUT ' + ' '.join(str(ids[v]) for v in d.outputs) if d.outputs else 'OUT')
    lines.append('SCALAR ' + ' '.join(str(x) for x in d.scalar.to_tuple()))
    return lines


def dump_diagram(d):
    return '\n'.join([DIAGRAM_HEADER] + diagram_lines(d)) + '\n'


def parse_diagram_lines(numbered_lines):
    """Build a diagram from (line number, text) pairs of one diagram block."""
    d = Diagram()
    ids = {}
    pending_edges = []
    for line_no, text in numbered_lines:
        tokens = text.split()
        tag, args = tokens[0], tokens[1:]
        if tag == 'V':
            if len(args) not in (3, 4):
                raise FixtureFormatError("Vertex needs id, kind and phase", line=line_no, field='V')
            if args[1] not in _VERTEX_CODES:
                raise FixtureFormatError(f"Unknown vertex kind {args[1]!r}", line=line_no, field='V')
            vid, phase = _ints([args[0], args[2]], line_no, 'V')
            if vid in ids:
                raise FixtureFormatError(f"Duplicate vertex id {vid}", line=line_no, field='V')
            row = float(args[3]) if len(args) == 4 else 0.0
            ids[vid] = d.add_vertex(_VERTEX_CODES[args[1]], phase, row)
        elif tag == 'E':
            if len(args) != 3 or args[2] not in _EDGE_CODES:
                raise FixtureFormatError("Edge needs two ids and a kind P/H/S", line=line_no, field='E')
            pending_edges.append((line_no, *_ints(args[:2], line_no, 'E'), _EDGE_CODES[args[2]]))
        elif tag in ('IN', 'OUT', 'LINK'):
            values = _ints(args, line_no, tag)
            missing = [x for x in values if x not in ids]
            if missing:
                raise FixtureFormatError(f"Unknown vertex ids {missing}", line=line_no, field=tag)
            if tag == 'IN':
                d.inputs = [ids[x] for x in values]
            elif tag == 'OUT':
                d.outputs = [ids[x] for x in values]
            else:
                if len(values) != 2:
                    raise FixtureFormatError("LINK needs two ids", line=line_no, field='LINK')
                d.link(ids[values[0]], ids[values[1]])
        elif tag == 'SCALAR':
            values = _ints(args, line_no, 'SCALAR')
            if len(values) != 5:
                raise FixtureFormatError("SCALAR needs five integers", line=line_no, field='SCALAR')
            d.scalar = ExactScalar.from_tuple(values)
        else:
            raise FixtureFormatError(f"Unknown record {tag!r}", line=line_no)
    for line_no, u, v, kind in pending_edges:
        if u not in ids or v not in ids:
            raise FixtureFormatError("Edge references unknown vertex", line=line_no, field='E')
        d.add_edge(ids[u], ids[v], kind)
    return d


def _content(text):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith('#'):
            yield line_no, stripped


def load_diagram(text):
    first = text.lstrip().splitlines()[0] if text.strip() else ''
    if first != DIAGRAM_HEADER:
        raise FixtureFormatError(f"Missing header {DIAGRAM_HEADER!r}", line=1)
    return parse_diagram_lines(list(_content(text)))


def parse_rule(text):
    """Parse a rule file into a (header dict, lhs, branches) triple."""
    first = text.lstrip().splitlines()[0] if text.strip() else ''
    if first != RULE_HEADER:
        raise FixtureFormatError(f"Missing header {RULE_HEADER!r}", line=1)
    header = {}
    lhs = None
    branches = []
    block = None
    block_lines = []
    for line_no, text_line in _content(text):
        tokens = text_line.split()
        tag = tokens[0]
        if block is not None:
            if tag == 'END':
                diagram = parse_diagram_lines(block_lines)
                if block == 'LHS':
                    lhs = diagram
                else:
                    branches.append((block, diagram))
                block, block_lines = None, []
            else:
                block_lines.append((line_no, text_line))
            continue
        if tag in _RULE_FIELDS:
            if len(tokens) != 2:
                raise FixtureFormatError("Header field needs one value", line=line_no, field=tag)
            header[tag] = tokens[1]
        elif tag == 'LHS':
            block = 'LHS'
        elif tag == 'BRANCH':
            values = _ints(tokens[1:], line_no, 'BRANCH')
            if len(values) != 5:
                raise FixtureFormatError("BRANCH needs a five-integer coefficient", line=line_no, field='BRANCH')
            block = ExactScalar.from_tuple(values)
        else:
            raise FixtureFormatError(f"Unexpected record {tag!r}", line=line_no)
    if block is not None:
        raise FixtureFormatError("Unterminated block, expected END")
    for field in _RULE_FIELDS:
        if field not in header:
            raise FixtureFormatError("Missing header field", field=field)
    if lhs is None:
        raise FixtureFormatError("Missing LHS block", field='LHS')
    for field in ('LEGS', 'PHASE', 'TERMS', 'REDUCTION'):
        try:
            header[field] = int(header[field])
        except ValueError:
            raise FixtureFormatError("Expected an integer", field=field) from None
    return header, lhs, branches


def dump_rule(header, lhs, branches):
    lines = [RULE_HEADER]
    for field in _RULE_FIELDS:
        lines.append(f"{field} {header[field]}")
    lines.append('LHS')
    lines += diagram_lines(lhs)
    lines.append('END')
    for coefficient, diagram in branches:
        lines.append('BRANCH ' + ' '.join(str(x) for x in coefficient.to_tuple()))
        lines += diagram_lines(diagram)
        lines.append('END')
    return '\n'.join(lines) + '\n'
