"""Text grammar shared by every front end.

Types::

    Nat | ? | 1 | (T -> T) | (T * T) | X

``->`` is right associative and binds looser than ``*``.  Terms::

    x | f(t,...) | \\x:T. t | t u | (t, u) | fst t | snd t | ()
      | up[T => T'] t | dn[T' => T] t | err[T] | n

``fst``, ``snd``, ``up``, ``dn`` and ``err`` are reserved words.  Casts
are written source ``=>`` target, so ``up[Nat => ?] t`` casts ``t`` from
``Nat`` up to ``?`` and ``dn[? => Nat] t`` casts it back down.  Numerals
parse as nullary function symbols.  Comments run from ``#`` to end of line.

Whether ``f(...)`` is a symbol application or a variable applied to a
parenthesized argument depends on the signature, so the term parser takes
the ambient signature (defaulting to the built-in one with only ``Nat``
and its numerals).
"""

from __future__ import annotations

import re

from .syntax import (
    App, Base, Context, Downcast, DYN, Err, Fn, FnApp, GttError, Lam, Pair,
    Prod, Proj, Term, Type, Unit, UNIT, UnitVal, UNITVAL, Upcast, Var,
)

RESERVED = {"fst", "snd", "up", "dn", "err"}


class ParseError(GttError):
    def __init__(self, msg: str, pos: int = -1):
        super().__init__(msg if pos < 0 else f"{msg} (at offset {pos})")
        self.pos = pos


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<arrow2>=>)
  | (?P<arrow>->)
  | (?P<leq><=)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[()\[\],:.\\*?=|{}])
""", re.VERBOSE)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Stream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.next()
        if text != value:
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def at(self, value: str) -> bool:
        return self.peek()[1] == value

    def done(self) -> bool:
        return self.peek()[0] == "eof"


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def parse_type(text: str) -> Type:
    s = _Stream(tokenize(text))
    ty = _type(s)
    if not s.done():
        raise ParseError(f"trailing input after type: {s.peek()[1]!r}", s.peek()[2])
    return ty


def _type(s: _Stream) -> Type:
    left = _prod_type(s)
    if s.at("->"):
        s.next()
        return Fn(left, _type(s))
    return left


def _prod_type(s: _Stream) -> Type:
    left = _atom_type(s)
    while s.at("*"):
        s.next()
        left = Prod(left, _atom_type(s))
    return left


def _atom_type(s: _Stream) -> Type:
    kind, text, pos = s.next()
    if text == "?":
        return DYN
    if text == "1":
        return UNIT
    if text == "(":
        ty = _type(s)
        s.expect(")")
        return ty
    if kind == "ident":
        if text in RESERVED:
            raise ParseError(f"reserved word {text!r} is not a type", pos)
        return Base(text)
    raise ParseError(f"expected a type, found {text!r}", pos)


def type_to_text(ty: Type) -> str:
    match ty:
        case Base(n):
            return n
        case Fn(a, b):
            return f"{_type_text_arrow_left(a)} -> {type_to_text(b)}"
        case Prod(a, b):
            return f"{_type_text_atomish(a)} * {_type_text_atomish(b)}"
        case Unit():
            return "1"
        case _:
            return "?"


def _type_text_arrow_left(ty: Type) -> str:
    return f"({type_to_text(ty)})" if isinstance(ty, Fn) else type_to_text(ty)


def _type_text_atomish(ty: Type) -> str:
    if isinstance(ty, (Fn, Prod)):
        return f"({type_to_text(ty)})"
    return type_to_text(ty)


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

def parse_term(text: str, sig=None) -> Term:
    sig = _default_sig(sig)
    s = _Stream(tokenize(text))
    t = _term(s, sig)
    if not s.done():
        raise ParseError(f"trailing input after term: {s.peek()[1]!r}", s.peek()[2])
    return t


def _default_sig(sig):
    if sig is None:
        from .typecheck import default_signature
        sig = default_signature()
    return sig


def _term(s: _Stream, sig) -> Term:
    if s.at("\\"):
        s.next()
        kind, name, pos = s.next()
        if kind != "ident" or name in RESERVED:
            raise ParseError(f"expected a variable after lambda, found {name!r}", pos)
        s.expect(":")
        ty = _type(s)
        s.expect(".")
        return Lam(name, ty, _term(s, sig))
    t = _prefix(s, sig)
    while _starts_prefix(s):
        t = App(t, _prefix(s, sig))
    return t


def _starts_prefix(s: _Stream) -> bool:
    kind, text, _ = s.peek()
    if kind in ("num",):
        return True
    if kind == "ident":
        return True
    return text in ("(", "up", "dn", "err", "fst", "snd")


def _prefix(s: _Stream, sig) -> Term:
    kind, text, pos = s.peek()
    if text == "fst":
        s.next()
        return Proj(1, _prefix(s, sig))
    if text == "snd":
        s.next()
        return Proj(2, _prefix(s, sig))
    if text == "up":
        s.next()
        s.expect("[")
        low = _type(s)
        s.expect("=>")
        high = _type(s)
        s.expect("]")
        return Upcast(low, high, _prefix(s, sig))
    if text == "dn":
        s.next()
        s.expect("[")
        high = _type(s)
        s.expect("=>")
        low = _type(s)
        s.expect("]")
        return Downcast(low, high, _prefix(s, sig))
    if text == "err":
        s.next()
        s.expect("[")
        ty = _type(s)
        s.expect("]")
        return Err(ty)
    return _atom(s, sig)


def _atom(s: _Stream, sig) -> Term:
    kind, text, pos = s.next()
    if kind == "num":
        return FnApp(text)
    if text == "(":
        if s.at(")"):
            s.next()
            return UNITVAL
        t = _term(s, sig)
        if s.at(","):
            s.next()
            u = _term(s, sig)
            s.expect(")")
            return Pair(t, u)
        s.expect(")")
        return t
    if kind == "ident":
        if text in RESERVED:
            raise ParseError(f"reserved word {text!r} is not a term", pos)
        if s.at("(") and sig.has_fn_symbol(text):
            s.next()
            args = []
            if not s.at(")"):
                args.append(_term(s, sig))
                while s.at(","):
                    s.next()
                    args.append(_term(s, sig))
            s.expect(")")
            return FnApp(text, tuple(args))
        return Var(text)
    raise ParseError(f"expected a term, found {text or 'end of input'!r}", pos)


def term_to_text(t: Term) -> str:
    match t:
        case Lam(x, ty, b):
            return f"\\{x}:{type_to_text(ty)}. {term_to_text(b)}"
        case App(f, a):
            return f"{_app_text(f)} {_prefix_text(a)}"
        case _:
            return _prefix_text(t)


def _app_text(t: Term) -> str:
    match t:
        case App(f, a):
            return f"{_app_text(f)} {_prefix_text(a)}"
        case _:
            return _prefix_text(t)


def _prefix_text(t: Term) -> str:
    match t:
        case Proj(1, b):
            return f"fst {_prefix_text(b)}"
        case Proj(2, b):
            return f"snd {_prefix_text(b)}"
        case Upcast(lo, hi, b):
            return f"up[{type_to_text(lo)} => {type_to_text(hi)}] {_prefix_text(b)}"
        case Downcast(lo, hi, b):
            return f"dn[{type_to_text(hi)} => {type_to_text(lo)}] {_prefix_text(b)}"
        case _:
            return _atom_text(t)


def _atom_text(t: Term) -> str:
    match t:
        case Var(x):
            return x
        case FnApp(f, args):
            if not args and f.isdigit():
                return f
            if not args:
                return f + "()"
            return f + "(" + ", ".join(term_to_text(a) for a in args) + ")"
        case UnitVal():
            return "()"
        case Pair(a, b):
            return f"({term_to_text(a)}, {term_to_text(b)})"
        case Err(ty):
            return f"err[{type_to_text(ty)}]"
        case _:
            return f"({term_to_text(t)})"


# ---------------------------------------------------------------------------
# Contexts: ``[x : T, y : U]`` prefix used by term files and tmdyn lines
# ---------------------------------------------------------------------------

def _context(s: _Stream) -> Context:
    s.expect("[")
    entries: list[tuple[str, Type]] = []
    if not s.at("]"):
        while True:
            kind, name, pos = s.next()
            if kind != "ident" or name in RESERVED:
                raise ParseError(f"expected a variable, found {name!r}", pos)
            s.expect(":")
            entries.append((name, _type(s)))
            if s.at(","):
                s.next()
                continue
            break
    s.expect("]")
    return Context(tuple(entries))


def parse_term_file(text: str, sig=None) -> tuple[Context, Term]:
    """A term file: optional ``[x : T, ...]`` context prefix, then a term."""
    sig = _default_sig(sig)
    s = _Stream(tokenize(text))
    ctx = _context(s) if s.at("[") else Context()
    t = _term(s, sig)
    if not s.done():
        raise ParseError(f"trailing input: {s.peek()[1]!r}", s.peek()[2])
    return ctx, t


def context_to_text(ctx: Context) -> str:
    inner = ", ".join(f"{n} : {type_to_text(ty)}" for n, ty in ctx)
    return f"[{inner}]"


# ---------------------------------------------------------------------------
# Signature files
# ---------------------------------------------------------------------------

def parse_signature(text: str):
    """Parse a ``.gttsig`` file.

    Sections (each optional, order free)::

        basetypes: Nat Foo
        tydyn:
          Foo <= Bar
        fnsyms:
          f : (Nat, Nat) -> Nat
        tmdyn:
          [x : Nat] t <= [x' : ?] t'
        flags:
          retract = on
          disjointness = off
        basecodes:
          Foo 100 200
    """
    from .typecheck import Signature

    base_types: list[str] = []
    tydyn_lines: list[str] = []
    fnsym_lines: list[str] = []
    tmdyn_lines: list[str] = []
    flags: dict[str, bool] = {}
    base_codes: dict[str, tuple[int, int]] = {}

    section = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(":", 1)[0].strip().lower()
        if line.endswith(":") or head in (
                "basetypes", "tydyn", "fnsyms", "tmdyn", "flags", "basecodes"):
            if head not in ("basetypes", "tydyn", "fnsyms", "tmdyn", "flags", "basecodes"):
                raise ParseError(f"unknown signature section {head!r}")
            section = head
            rest = line.split(":", 1)[1].strip()
            if rest:
                _sig_line(section, rest, base_types, tydyn_lines, fnsym_lines,
                          tmdyn_lines, flags, base_codes)
            continue
        if section is None:
            raise ParseError(f"signature line outside any section: {line!r}")
        _sig_line(section, line, base_types, tydyn_lines, fnsym_lines,
                  tmdyn_lines, flags, base_codes)

    fn_symbols = {}
    for line in fnsym_lines:
        name, ins, out = _parse_fnsym(line)
        fn_symbols[name] = (ins, out)
    tydyn_axioms = tuple(_parse_type_pair(line) for line in tydyn_lines)

    sig = Signature(
        base_types=frozenset(base_types),
        tydyn_axioms=tydyn_axioms,
        fn_symbols=fn_symbols,
        tmdyn_axioms=(),
        retract=flags.get("retract", True),
        disjointness=flags.get("disjointness", True),
        base_codes=base_codes,
    )
    if tmdyn_lines:
        axioms = tuple(_parse_tmdyn(line, sig) for line in tmdyn_lines)
        sig = sig.replace(tmdyn_axioms=axioms)
    return sig


def _sig_line(section, line, base_types, tydyn_lines, fnsym_lines, tmdyn_lines,
              flags, base_codes):
    if section == "basetypes":
        base_types.extend(line.split())
    elif section == "tydyn":
        tydyn_lines.append(line)
    elif section == "fnsyms":
        fnsym_lines.append(line)
    elif section == "tmdyn":
        tmdyn_lines.append(line)
    elif section == "flags":
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip().lower()
        if key not in ("retract", "disjointness") or val not in ("on", "off", "true", "false"):
            raise ParseError(f"bad flag line: {line!r}")
        flags[key] = val in ("on", "true")
    elif section == "basecodes":
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"bad basecodes line: {line!r}")
        base_codes[parts[0]] = (int(parts[1]), int(parts[2]))


def _parse_type_pair(line: str) -> tuple[Type, Type]:
    left, sep, right = line.partition("<=")
    if not sep:
        raise ParseError(f"expected 'A <= B': {line!r}")
    return parse_type(left.strip()), parse_type(right.strip())


def _parse_fnsym(line: str):
    name, sep, rest = line.partition(":")
    if not sep:
        raise ParseError(f"expected 'f : (A, ...) -> B': {line!r}")
    name = name.strip()
    s = _Stream(tokenize(rest))
    s.expect("(")
    ins: list[Type] = []
    if not s.at(")"):
        ins.append(_type(s))
        while s.at(","):
            s.next()
            ins.append(_type(s))
    s.expect(")")
    s.expect("->")
    out = _type(s)
    if not s.done():
        raise ParseError(f"trailing input in fnsyms line: {line!r}")
    return name, tuple(ins), out


def _parse_tmdyn(line: str, sig):
    left, sep, right = line.partition("<=")
    if not sep:
        raise ParseError(f"expected 'ctx t <= ctx t'': {line!r}")
    lctx, lterm = parse_term_file(left.strip(), sig)
    rctx, rterm = parse_term_file(right.strip(), sig)
    return lctx, lterm, rctx, rterm


# ---------------------------------------------------------------------------
# S-expressions (derivation files)
# ---------------------------------------------------------------------------

class SexpList(list):
    pass


def parse_sexps(text: str) -> list:
    """Parse a sequence of s-expressions.

    Atoms are bare words; ``{...}`` chunks are raw text handed to the term
    and type parsers by the derivation reader.  ``#`` comments allowed.
    """
    items, pos = _sexp_seq(text, 0, top=True)
    return items


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
        elif text[pos] == "#":
            nl = text.find("\n", pos)
            pos = len(text) if nl < 0 else nl + 1
        else:
            break
    return pos


def _sexp_seq(text: str, pos: int, top: bool = False):
    items = []
    while True:
        pos = _skip_ws(text, pos)
        if pos >= len(text):
            if not top:
                raise ParseError("unexpected end of input in s-expression", pos)
            return items, pos
        ch = text[pos]
        if ch == ")":
            if top:
                raise ParseError("unbalanced ')'", pos)
            return items, pos
        if ch == "(":
            inner, pos = _sexp_seq(text, pos + 1)
            pos = _skip_ws(text, pos)
            if pos >= len(text) or text[pos] != ")":
                raise ParseError("expected ')'", pos)
            items.append(SexpList(inner))
            pos += 1
        elif ch == "{":
            end = text.find("}", pos)
            if end < 0:
                raise ParseError("unterminated '{' chunk", pos)
            items.append(("chunk", text[pos + 1:end]))
            pos = end + 1
        else:
            m = re.match(r"[^\s(){}#]+", text[pos:])
            items.append(m.group())
            pos += m.end()


def sexp_to_text(x, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(x, SexpList):
        if any(isinstance(e, SexpList) for e in x):
            head = x[0] if x and not isinstance(x[0], SexpList) else None
            parts = []
            for i, e in enumerate(x):
                if i == 0 and head is not None:
                    continue
                parts.append(sexp_to_text(e, indent + 1))
            first = sexp_to_text(head, 0) if head is not None else ""
            inner = "\n".join(parts)
            return f"{pad}({first}\n{inner})"
        return pad + "(" + " ".join(sexp_to_text(e, 0) for e in x) + ")"
    if isinstance(x, tuple) and x and x[0] == "chunk":
        return pad + "{" + x[1] + "}"
    return pad + str(x)
