"""
Parser for group, homomorphism, module and word specifications.

An input file holds one `name = value` per line; `#` starts a comment.
Values:

    cyclic:16   free:2   free{gens=x,y}   surface:2   bs:1,2   trivial
    fp{gens=a,b; rels=[a b a^-1 b^-1]}
    hom{dom=cyclic:16; cod=cyclic:4; images=[mult:1]}
    hom{dom=fp{...}; cod=free:1; images=[a, a]}
    module{rels=[[16]]; action=[[3]]}
    map{cod=free:1; images=[a, a]}        (cod defaults to the hom codomain)

Words are generator names with optional integer exponents (`a b^-2 a^3`),
or `1` for the identity. Syntax errors carry line and column.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from errors import GrammarError, UnsupportedInputError
from exact_linalg import IntMatrix
from group_model import (
    GModule,
    GroupHom,
    GroupSpec,
    Word,
    baumslag_solitar,
    make_cyclic_hom,
    make_hom,
    surface_group,
)

logger = logging.getLogger(__name__)

NAME_CHARS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789"


@dataclass(frozen=True)
class RawWord:
    """Word before its generator names are resolved; letters are (name, exponent, position)."""

    letters: Tuple[Tuple[str, int, int], ...]
    position: int


@dataclass(frozen=True)
class ModuleSpec:
    """Module data awaiting the group it acts over."""

    relations: Tuple[Tuple[int, ...], ...]
    action: Tuple[Tuple[int, ...], ...]
    position: int

    def bind(self, group: GroupSpec, name: str = "M") -> GModule:
        """GModule over `group`; the action must be well defined of order dividing |group|."""
        size = len(self.action)
        relations = IntMatrix.from_rows(self.relations, size) if self.relations else IntMatrix.zeros(0, size)
        module = GModule(group, relations, IntMatrix.from_rows(self.action, size), name=name)
        module.validate()
        return module


@dataclass(frozen=True)
class RawMap:
    """Generator images for one leg of a factorization; codomain may come from context."""

    codomain: Optional[GroupSpec]
    images: Tuple[RawWord, ...]
    position: int


Value = Union[GroupSpec, GroupHom, ModuleSpec, RawMap]


@dataclass
class ParsedInputs:
    """Named values from one or more input files."""

    values: Dict[str, Value] = field(default_factory=dict)
    texts: Dict[str, Tuple[str, str]] = field(default_factory=dict)

    def get(self, *names: str) -> Optional[Value]:
        for name in names:
            if name in self.values:
                return self.values[name]
        return None

    @property
    def hom(self) -> Optional[GroupHom]:
        value = self.get("hom", "phi")
        return value if isinstance(value, GroupHom) else None

    @property
    def group(self) -> Optional[GroupSpec]:
        value = self.get("group")
        if isinstance(value, GroupSpec):
            return value
        return self.hom.codomain if self.hom else None

    def module(self, over: Optional[GroupSpec] = None) -> Optional[GModule]:
        """The `module` value bound to `over` (default: hom codomain, else `group`)."""
        spec = self.get("module")
        if spec is None:
            return None
        if not isinstance(spec, ModuleSpec):
            raise UnsupportedInputError("`module` must be a module{...} value")
        group = over or self.group
        if group is None:
            raise UnsupportedInputError("A module needs a `group` or `hom` to act over")
        return spec.bind(group, name="M")

    def factorization_maps(self) -> Tuple[List[Word], List[Word], int]:
        """(q images, r images, free rank) for the `q` and `r` maps around `hom`."""
        hom = self.hom
        q, r = self.get("q"), self.get("r")
        if hom is None or not isinstance(q, RawMap) or not isinstance(r, RawMap):
            raise UnsupportedInputError("verify-factorization needs `hom`, `q = map{...}` and `r = map{...}`")
        if q.codomain is None:
            raise UnsupportedInputError("`q` must name its free codomain, e.g. map{cod=free:1; images=[...]}")
        r_codomain = r.codomain or hom.codomain
        q_images = [self._resolve("q", w, q.codomain) for w in q.images]
        r_images = [self._resolve("r", w, r_codomain) for w in r.images]
        return q_images, r_images, q.codomain.rank

    def _resolve(self, name: str, raw: RawWord, group: GroupSpec) -> Word:
        text, source = self.texts.get(name, ("", None))
        return _resolve_word(raw, group, text, source)


def _resolve_word(raw: RawWord, group: GroupSpec, text: str, source: Optional[str]) -> Word:
    letters = []
    for name, exponent, position in raw.letters:
        if name not in group.generators:
            raise GrammarError(f"unknown generator '{name}' for {group.describe()}", text, position, source)
        letters.append((group.generators.index(name), exponent))
    return Word(tuple(letters)).reduced()


class _Parser:
    """Recursive-descent parser over one input text."""

    def __init__(self, text: str, source: Optional[str] = None):
        self.text = text
        self.source = source
        self.pos = 0

    def error(self, message: str, position: Optional[int] = None) -> GrammarError:
        return GrammarError(message, self.text, self.pos if position is None else position, self.source)

    # lexical helpers

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, token: str) -> None:
        self.skip()
        if not self.text.startswith(token, self.pos):
            found = self.text[self.pos] if self.pos < len(self.text) and self.text[self.pos] != "\n" else "end of line"
            raise self.error(f"expected '{token}', found '{found}'")
        self.pos += len(token)

    def accept(self, token: str) -> bool:
        self.skip()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def name(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in NAME_CHARS:
            self.pos += 1
        if start == self.pos or self.text[start].isdigit():
            self.pos = start
            raise self.error("expected a name")
        return self.text[start:self.pos]

    def integer(self) -> int:
        self.skip()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if digits == self.pos:
            self.pos = start
            raise self.error("expected an integer")
        return int(self.text[start:self.pos])

    # file level

    def parse_file(self) -> Tuple[Dict[str, Value], Dict[str, int]]:
        values: Dict[str, Value] = {}
        positions: Dict[str, int] = {}
        while self.pos < len(self.text):
            line_end = self.text.find("\n", self.pos)
            line_end = len(self.text) if line_end < 0 else line_end
            content = self.text[self.pos:line_end].split("#", 1)[0]
            if not content.strip():
                self.pos = line_end + 1
                continue
            start = self.pos
            key = self.name()
            if key in values:
                raise self.error(f"'{key}' defined twice", start)
            self.expect("=")
            values[key] = self.value(context=key)
            positions[key] = start
            self.skip()
            if self.pos < len(self.text) and self.text[self.pos] == "#":
                self.pos = line_end
            if self.pos < len(self.text) and self.text[self.pos] != "\n":
                raise self.error(f"unexpected '{self.text[self.pos]}' after value")
            self.pos += 1
        return values, positions

    def value(self, context: str = "") -> Value:
        start = self.pos
        head = self.name()
        if head == "hom":
            return self.hom()
        if head == "module":
            return self.module(start)
        if head == "map":
            return self.map(start)
        self.pos = start
        return self.group()

    # groups

    def group(self) -> GroupSpec:
        start = self.pos
        head = self.name()
        try:
            if head == "trivial":
                return GroupSpec.cyclic(1)
            if head == "cyclic":
                self.expect(":")
                return GroupSpec.cyclic(self.integer())
            if head == "free":
                if self.accept("{"):
                    self.keyword("gens")
                    names = self.names()
                    self.expect("}")
                    return GroupSpec.free(len(names), names)
                self.expect(":")
                return GroupSpec.free(self.integer())
            if head == "surface":
                self.expect(":")
                return surface_group(self.integer())
            if head == "bs":
                self.expect(":")
                p = self.integer()
                self.expect(",")
                return baumslag_solitar(p, self.integer())
            if head == "fp":
                self.expect("{")
                self.keyword("gens")
                names = self.names()
                self.expect(";")
                self.keyword("rels")
                raw = self.word_list()
                self.expect("}")
                carrier = GroupSpec.free(len(names), names)
                relators = [_resolve_word(w, carrier, self.text, self.source) for w in raw]
                return GroupSpec.finitely_presented(names, relators)
        except UnsupportedInputError as e:
            raise self.error(str(e), start)
        raise self.error(f"unknown group '{head}'", start)

    def keyword(self, word: str) -> None:
        start = self.pos
        found = self.name()
        if found != word:
            raise self.error(f"expected '{word}', found '{found}'", start)
        self.expect("=")

    def names(self) -> List[str]:
        names = [self.name()]
        while self.peek() == ",":
            self.expect(",")
            names.append(self.name())
        return names

    # words

    def word(self) -> RawWord:
        self.skip()
        start = self.pos
        if self.accept("1"):
            return RawWord((), start)
        letters = []
        while True:
            self.skip()
            if self.pos >= len(self.text) or self.text[self.pos] not in NAME_CHARS or self.text[self.pos].isdigit():
                break
            position = self.pos
            name = self.name()
            exponent = 1
            if self.accept("^"):
                exponent = self.integer()
            if exponent:
                letters.append((name, exponent, position))
        if not letters and self.pos == start:
            raise self.error("expected a word")
        return RawWord(tuple(letters), start)

    def word_list(self) -> List[RawWord]:
        self.expect("[")
        if self.accept("]"):
            return []
        words = [self.word()]
        while self.accept(","):
            words.append(self.word())
        self.expect("]")
        return words

    # compound values

    def hom(self) -> GroupHom:
        self.expect("{")
        self.keyword("dom")
        domain = self.group()
        self.expect(";")
        self.keyword("cod")
        codomain = self.group()
        self.expect(";")
        self.keyword("images")
        images_at = self.pos
        self.expect("[")
        self.skip()
        if self.text.startswith("mult", self.pos):
            self.name()
            self.expect(":")
            d = self.integer()
            self.expect("]")
            self.expect("}")
            if not (domain.is_cyclic and codomain.is_cyclic):
                raise self.error("mult:d needs cyclic domain and codomain", images_at)
            return make_cyclic_hom(domain.order, codomain.order, d)
        self.pos = images_at
        raw = self.word_list()
        self.expect("}")
        images = [_resolve_word(w, codomain, self.text, self.source) for w in raw]
        return make_hom(domain, codomain, images)

    def matrix(self) -> List[List[int]]:
        self.expect("[")
        rows: List[List[int]] = []
        if self.accept("]"):
            return rows
        while True:
            self.expect("[")
            row = [self.integer()]
            while self.accept(","):
                row.append(self.integer())
            self.expect("]")
            rows.append(row)
            if not self.accept(","):
                break
        self.expect("]")
        return rows

    def module(self, start: int) -> ModuleSpec:
        self.expect("{")
        self.keyword("rels")
        relations = self.matrix()
        self.expect(";")
        self.keyword("action")
        action_at = self.pos
        action = self.matrix()
        self.expect("}")
        size = len(action)
        if not size or any(len(row) != size for row in action):
            raise self.error("action must be a nonempty square matrix", action_at)
        if any(len(row) != size for row in relations):
            raise self.error(f"relation rows must have {size} entries", action_at)
        return ModuleSpec(tuple(map(tuple, relations)), tuple(map(tuple, action)), start)

    def map(self, start: int) -> RawMap:
        self.expect("{")
        codomain = None
        mark = self.pos
        if self.name() == "cod":
            self.expect("=")
            codomain = self.group()
            self.expect(";")
        else:
            self.pos = mark
        self.keyword("images")
        images = self.word_list()
        self.expect("}")
        return RawMap(codomain, tuple(images), start)


def parse_text(text: str, source: Optional[str] = None) -> ParsedInputs:
    """Parse one input text into named values."""
    values, _ = _Parser(text, source).parse_file()
    inputs = ParsedInputs(values)
    for key in values:
        inputs.texts[key] = (text, source)
    logger.debug(f"Parsed {', '.join(values) or 'nothing'} from {source or 'text'}")
    return inputs


def parse_value(text: str) -> Value:
    """Parse a single value such as `cyclic:4` or `hom{...}`."""
    parser = _Parser(text)
    value = parser.value()
    parser.skip()
    if parser.pos != len(text.rstrip("\n")):
        raise parser.error(f"unexpected '{text[parser.pos]}' after value")
    return value


def parse_word(text: str, group: GroupSpec) -> Word:
    """Parse a word in the generators of `group`."""
    parser = _Parser(text)
    raw = parser.word()
    parser.skip()
    if parser.pos != len(text):
        raise parser.error(f"unexpected '{text[parser.pos]}' in word")
    return _resolve_word(raw, group, text, None)


def parse_inputs(paths: Sequence[Union[str, Path]]) -> ParsedInputs:
    """
    Parse input files in order; later files may not redefine earlier names.

    Raises:
        FileNotFoundError: missing input file
        GrammarError: syntax error, with file, line and column
    """
    merged = ParsedInputs()
    for path in paths:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Input file '{path}' not found")
        parsed = parse_text(path.read_text(), str(path))
        for key, value in parsed.values.items():
            if key in merged.values:
                raise UnsupportedInputError(f"'{key}' defined in more than one input file")
            merged.values[key] = value
            merged.texts[key] = parsed.texts[key]
    return merged
