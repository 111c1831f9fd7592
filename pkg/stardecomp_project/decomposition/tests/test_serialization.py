"""
Tests for the diagram and rule text formats of the decomposition app.
"""
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from ..catalog import load_catalog, load_rule
from ..diagram import Diagram, EdgeType, VertexType
from ..exceptions import FixtureFormatError, RuleError
from ..oracle import contract, verify_rule
from ..scalar import ExactScalar
from ..serialization import DIAGRAM_HEADER, RULE_HEADER, dump_diagram, dump_rule, load_diagram, parse_rule


def stacked_pair():
    """Two linked Z spiders with a star to one output and a NOT between them."""
    d = Diagram()
    c = d.add_vertex(VertexType.Z, 1, row=1)
    flip = d.add_vertex(VertexType.X, 4, row=1.5)
    bottom = d.add_vertex(VertexType.Z, 0, row=2)
    i = d.add_vertex(VertexType.BOUNDARY)
    o1 = d.add_vertex(VertexType.BOUNDARY, row=3)
    o2 = d.add_vertex(VertexType.BOUNDARY, row=3)
    d.add_edge(i, c)
    d.add_edge(c, o1, EdgeType.STAR)
    d.add_edge(c, flip)
    d.add_edge(flip, bottom)
    d.add_edge(bottom, o2, EdgeType.HADAMARD)
    d.link(c, bottom)
    d.inputs, d.outputs = [i], [o1, o2]
    d.scalar = ExactScalar(0, 0, 3, 0, 2)
    return d


class DiagramFormatTests(SimpleTestCase):
    """Test cases for the diagram block format."""

    def test_dump_and_load(self):
        """Test that a dumped diagram loads back with links, rows and scalar."""
        d = stacked_pair()
        text = dump_diagram(d)
        self.assertTrue(text.startswith(DIAGRAM_HEADER))
        loaded = load_diagram(text)
        self.assertEqual(dump_diagram(loaded), text)
        self.assertEqual(loaded.scalar, d.scalar)
        self.assertEqual(len(loaded.links), 2)
        self.assertEqual(loaded.row(loaded.vertices()[1]), 1.5)
        self.assertEqual(contract(loaded), contract(d))

    def test_missing_header(self):
        """Test that a file without the header fails on line 1."""
        with self.assertRaises(FixtureFormatError) as ctx:
            load_diagram('V 0 B 0\n')
        self.assertEqual(ctx.exception.line, 1)
        with self.assertRaises(FixtureFormatError):
            load_diagram('')

    def test_bad_records(self):
        """Test that malformed records name their line and field."""
        cases = [
            ('V 0 Q 0', 'V'),
            ('V 0 Z x', 'V'),
            ('V 0 Z', 'V'),
            ('E 0 7 P', 'E'),
            ('E 0 0 W', 'E'),
            ('OUT 7', 'OUT'),
            ('LINK 0', 'LINK'),
            ('SCALAR 1 2', 'SCALAR'),
        ]
        for record, field in cases:
            text = f"{DIAGRAM_HEADER}\nV 0 Z 0\n{record}\n"
            with self.subTest(record=record), self.assertRaises(FixtureFormatError) as ctx:
                load_diagram(text)
            self.assertEqual(ctx.exception.field, field)
            self.assertEqual(ctx.exception.line, 3)

    def test_unknown_record(self):
        """Test that an unknown tag is reported with its line."""
        with self.assertRaises(FixtureFormatError) as ctx:
            load_diagram(f"{DIAGRAM_HEADER}\n# comment\nFOO 1\n")
        self.assertEqual(ctx.exception.line, 3)
        self.assertIn('line 3', str(ctx.exception))


class RuleFormatTests(SimpleTestCase):
    """Test cases for the rule file format."""

    def setUp(self):
        """Set up test data."""
        self.rule = load_catalog()['star_edge_1']
        self.header = {
            'RULE': 'copy_of_star_edge_1',
            'FAMILY': 'star_edge',
            'LEGS': 1,
            'PHASE': 0,
            'TERMS': 2,
            'REDUCTION': 1,
        }

    def test_dumped_rule_verifies(self):
        """Test that a dumped rule parses back into a verifying rule."""
        text = dump_rule(self.header, self.rule.lhs, self.rule.branches)
        header, lhs, branches = parse_rule(text)
        self.assertEqual(header['TERMS'], 2)
        self.assertEqual([c for c, _ in branches], [c for c, _ in self.rule.branches])
        self.assertTrue(verify_rule(lhs, branches))

    def test_term_count_mismatch(self):
        """Test that load_rule refuses a rule whose TERMS disagrees with its branches."""
        header = dict(self.header, TERMS=3)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'broken.zxr'
            path.write_text(dump_rule(header, self.rule.lhs, self.rule.branches))
            with self.assertRaises(RuleError):
                load_rule(path)

    def test_missing_header_field(self):
        """Test that an absent header field is named."""
        text = dump_rule(self.header, self.rule.lhs, self.rule.branches)
        text = '\n'.join(line for line in text.splitlines() if not line.startswith('REDUCTION'))
        with self.assertRaises(FixtureFormatError) as ctx:
            parse_rule(text)
        self.assertEqual(ctx.exception.field, 'REDUCTION')

    def test_unterminated_block(self):
        """Test that a block without END is refused."""
        text = f"{RULE_HEADER}\nRULE r\nLHS\nV 0 B 0\nOUT 0\n"
        with self.assertRaises(FixtureFormatError) as ctx:
            parse_rule(text)
        self.assertIn('Unterminated block', str(ctx.exception))

    def test_non_integer_field(self):
        """Test that LEGS must be an integer."""
        text = dump_rule(dict(self.header, LEGS='one'), self.rule.lhs, self.rule.branches)
        with self.assertRaises(FixtureFormatError) as ctx:
            parse_rule(text)
        self.assertEqual(ctx.exception.field, 'LEGS')
