"""Line-oriented scenario grammar, plus text serialization of directories.

One declaration per line, `#` starts a comment, and a statement may only
reference names declared above it (single forward pass).  The same promise
syntax is used by scenario files, coarse-grained scenario output and
directory files, so everything the engine emits can be fed back in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .core import Agent, Body, Promise, SemanticSpacetime
from .errors import ScenarioParseError, SemspaceError
from .language import Alphabet, TranslationMatrix
from .routing import build_clos, build_lattice, build_tree
from .scaling import Directory, declare_superagent, define_scale
from .tenancy import LENIENT, STRICT, bind_tenancy, make_namespace


@dataclass
class Scenario:
    """Parsed scenario: the resulting snapshot plus declared language objects."""

    spacetime: SemanticSpacetime
    alphabets: dict[str, Alphabet] = field(default_factory=dict)
    matrices: dict[str, TranslationMatrix] = field(default_factory=dict)
    statements: tuple[tuple[int, str], ...] = ()


class _Scan:
    """Tiny cursor over one statement line, tracking columns for errors."""

    def __init__(self, text: str, line_no: int):
        self.text = text
        self.line_no = line_no
        self.pos = 0

    def error(self, message: str, col=None):
        raise ScenarioParseError(self.line_no, (self.pos if col is None else col) + 1, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def startswith(self, prefix: str) -> bool:
        return self.text.startswith(prefix, self.pos)

    def take(self, n: int) -> str:
        out = self.text[self.pos:self.pos + n]
        self.pos += n
        return out

    def expect(self, literal: str):
        self.skip_ws()
        if not self.startswith(literal):
            self.error(f"expected {literal!r}")
        self.pos += len(literal)

    def token(self, stops: str = "") -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace() or ch in stops:
                break
            self.pos += 1
        if self.pos == start:
            self.error("expected a name")
        return self.text[start:self.pos]

    def balanced_until(self, closer: str) -> str:
        """Consume up to the matching closer, honouring nested parentheses."""
        depth = 0
        start = self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                depth += 1
            elif ch == closer and depth == 0:
                out = self.text[start:self.pos]
                self.pos += 1
                return out
            elif ch == ")":
                depth -= 1
            self.pos += 1
        self.error(f"missing closing {closer!r}")


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on a separator at parenthesis nesting level zero."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    tail = "".join(current).strip()
    if tail:
        parts.append(tail)
    return parts


# -- body / promise syntax ----------------------------------------------------


def parse_body(scan: _Scan, require_sign: bool = True) -> Body:
    scan.skip_ws()
    sign = "+"
    if scan.peek() in "+-":
        sign = scan.take(1)
    elif require_sign:
        scan.error("a promise body starts with its sign (+ or -)")
    type_tag = scan.token(stops="{#(|)")
    symbols = {}
    valency = None
    refs: tuple[str, ...] = ()
    condition = None
    while True:
        scan.skip_ws()
        if scan.peek() == "{":
            scan.take(1)
            inner = scan.balanced_until("}")
            for part in _split_top(inner):
                if not part:
                    continue
                sym, _, coeff = part.rpartition(":")
                # a ':digits' suffix is a coefficient; ids may contain ':' themselves
                if sym and coeff.isdigit():
                    symbols[sym.strip()] = symbols.get(sym.strip(), 0) + int(coeff)
                else:
                    symbols[part] = symbols.get(part, 0) + 1
        elif scan.peek() == "#":
            scan.take(1)
            digits = scan.token(stops="{#(|)")
            try:
                valency = int(digits)
            except ValueError:
                scan.error(f"valency must be an integer, got {digits!r}")
        elif scan.startswith("(refs:"):
            scan.take(len("(refs:"))
            inner = scan.balanced_until(")")
            refs = tuple(x for x in _split_top(inner) if x)
        elif scan.peek() == "|":
            scan.take(1)
            condition = parse_body(scan, require_sign=False)
        else:
            break
    try:
        return Body(sign, type_tag, symbols, valency=valency,
                    condition=condition, agent_refs=refs)
    except (ValueError, SemspaceError) as err:
        scan.error(str(err))


def parse_promise_text(text: str, line_no: int = 0) -> Promise:
    """Parse `FROM -> TO[,TO] : BODY [scope(a,b)]` into a promise."""
    scan = _Scan(text, line_no)
    promiser = scan.token()
    scan.expect("->")
    to_raw = scan.token()  # ids may contain ':', so the separator needs space around it
    scan.expect(":")
    body = parse_body(scan)
    scope = frozenset()
    scan.skip_ws()
    if scan.startswith("scope("):
        scan.take(len("scope("))
        inner = scan.balanced_until(")")
        scope = frozenset(x for x in _split_top(inner) if x)
    if not scan.at_end():
        scan.error(f"unexpected trailing text {scan.text[scan.pos:]!r}")
    promisees = frozenset(x for x in _split_top(to_raw) if x)
    try:
        return Promise(promiser, promisees, body, scope)
    except (ValueError, SemspaceError) as err:
        scan.error(str(err), col=0)


def promise_to_text(p: Promise) -> str:
    to = ",".join(sorted(p.promisees))
    text = f"{p.promiser} -> {to} : {_body_text(p.body)}"
    extra = p.scope - p.promisees
    if extra:
        text += " scope(" + ",".join(sorted(extra)) + ")"
    return text


def _body_text(body: Body) -> str:
    text = f"{body.sign}{body.type_tag}"
    if body.symbols:
        parts = [sym if coeff == 1 else f"{sym}:{coeff}" for sym, coeff in body.symbols]
        text += "{" + ",".join(parts) + "}"
    if body.valency is not None:
        text += f" #{body.valency}"
    if body.agent_refs:
        text += " (refs:" + ",".join(body.agent_refs) + ")"
    if body.condition is not None:
        text += " | " + _body_text(body.condition)
    return text


# -- scenario statements -----------------------------------------------------------


def _strip_comment(line: str) -> str:
    """Drop a trailing comment; `#` directly before a digit is a valency count."""
    for i, ch in enumerate(line):
        if ch == "#" and not (i + 1 < len(line) and line[i + 1].isdigit()):
            return line[:i]
    return line


def parse_scenario(text: str) -> Scenario:
    st = SemanticSpacetime()
    alphabets: dict[str, Alphabet] = {}
    matrices: dict[str, TranslationMatrix] = {}
    statements: list[tuple[int, str]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        statements.append((line_no, line.strip()))
        scan = _Scan(line, line_no)
        keyword = scan.token()
        handler = _HANDLERS.get(keyword)
        if handler is None:
            scan.error(f"unknown statement {keyword!r}", col=0)
        try:
            st = handler(scan, st, alphabets, matrices)
        except ScenarioParseError:
            raise
        except (SemspaceError, ValueError) as err:
            raise ScenarioParseError(line_no, scan.pos + 1, str(err)) from err
    return Scenario(st, alphabets, matrices, tuple(statements))


def _stmt_agent(scan, st, alphabets, matrices):
    aid = scan.token()
    name = ""
    if not scan.at_end():
        scan.expect("as")
        scan.skip_ws()
        name = scan.text[scan.pos:].strip()
        scan.pos = len(scan.text)
    return st.with_agent(Agent(aid, name))


def _stmt_alphabet(scan, st, alphabets, matrices):
    name = scan.token()
    scan.expect("{")
    inner = scan.balanced_until("}")
    symbols = tuple(inner.split())
    alphabets[name] = Alphabet(symbols)
    return st


def _stmt_matrix(scan, st, alphabets, matrices):
    name = scan.token()
    scan.expect("from")
    src = scan.token()
    scan.expect("to")
    dst = scan.token()
    scan.expect("rows")
    scan.skip_ws()
    rows_text = scan.text[scan.pos:].strip()
    scan.pos = len(scan.text)
    for alpha in (src, dst):
        if alpha not in alphabets:
            scan.error(f"undefined alphabet {alpha!r}")
    try:
        rows = json.loads(rows_text)
    except json.JSONDecodeError as err:
        scan.error(f"bad matrix rows: {err}")
    matrices[name] = TranslationMatrix(alphabets[src], alphabets[dst], rows)
    return st


def _stmt_promise(scan, st, alphabets, matrices):
    rest = scan.text[scan.pos:]
    promise = parse_promise_text(rest, scan.line_no)
    scan.pos = len(scan.text)
    return st.with_promise(promise)


def _stmt_superagent(scan, st, alphabets, matrices):
    name = scan.token()
    scan.expect("{")
    inner = scan.balanced_until("}")
    members = tuple(inner.split())
    return declare_superagent(st, name, members)


def _stmt_scale(scan, st, alphabets, matrices):
    name = scan.token()
    scan.expect("{")
    inner = scan.balanced_until("}")
    groups: dict[str, tuple[str, ...]] = {}
    for idx, section in enumerate(s.strip() for s in inner.split("|")):
        if not section:
            continue
        tokens = section.split()
        if len(tokens) == 1:
            token = tokens[0]
            if token in st.superagents:
                groups[token] = tuple(st.superagents[token])
            else:
                groups[token] = (token,)
        else:
            groups[f"{name}:g{idx}"] = tuple(tokens)
    return define_scale(st, name, groups)


def _stmt_tenancy(scan, st, alphabets, matrices):
    host = scan.token()
    tenant = scan.token()
    params = {}
    while not scan.at_end():
        key = scan.token(stops="=")
        scan.expect("=")
        value = scan.token()
        params[key] = value
    for key in ("R", "C", "f"):
        if key not in params:
            scan.error(f"tenancy statement needs {key}=<type>")
    r_value = params["R"]
    valency = None
    if "#" in r_value:
        r_type, _, digits = r_value.partition("#")
        valency = int(digits)
    else:
        r_type = r_value
    r = Body("+", r_type, valency=valency)
    c = Body("+", params["C"])
    f = Body("+", params["f"])
    st, _binding = bind_tenancy(st, host, tenant, r, c, f)
    return st


def _stmt_namespace(scan, st, alphabets, matrices):
    sa = scan.token()
    kind = scan.token()
    if kind != "prefix":
        scan.error(f"unsupported namespace transform {kind!r}")
    st, _ns = make_namespace(st, sa, "prefix")
    return st


def _stmt_lattice(scan, st, alphabets, matrices):
    name = scan.token(stops="(")
    dims = None
    occupied = None
    unidirectional = False
    while not scan.at_end():
        word = scan.token(stops="(")
        scan.skip_ws()
        if word == "dims":
            scan.expect("(")
            inner = scan.balanced_until(")")
            dims = tuple(int(x) for x in _split_top(inner))
        elif word == "occupied":
            scan.expect("(")
            inner = scan.balanced_until(")")
            occupied = []
            for point in _split_top(inner):
                point = point.strip()
                if not (point.startswith("(") and point.endswith(")")):
                    scan.error(f"occupied points look like (i,j,...), got {point!r}")
                occupied.append(tuple(int(x) for x in _split_top(point[1:-1])))
        elif word == "unidirectional":
            unidirectional = True
        else:
            scan.error(f"unknown lattice option {word!r}")
    if dims is None:
        scan.error("lattice statement needs dims(...)")
    st, _space = build_lattice(st, dims, name=name, occupied=occupied,
                               unidirectional=unidirectional)
    return st


def _stmt_tree(scan, st, alphabets, matrices):
    name = scan.token()
    params = _keyvals(scan)
    st, _tree = build_tree(st, int(params["b"]), int(params["d"]), name=name)
    return st


def _stmt_clos(scan, st, alphabets, matrices):
    name = scan.token()
    params = _keyvals(scan)
    st, _fabric = build_clos(st, int(params["tiers"]), int(params["v"]), name=name)
    return st


def _keyvals(scan) -> dict[str, str]:
    params = {}
    while not scan.at_end():
        key = scan.token(stops="=")
        scan.expect("=")
        params[key] = scan.token()
    return params


def _stmt_adjacency(scan, st, alphabets, matrices):
    return replace(st, adjacency_type=scan.token())


def _stmt_gateway(scan, st, alphabets, matrices):
    sa = scan.token()
    agent = scan.token()
    if sa not in st.superagents:
        scan.error(f"undefined super-agent {sa!r}")
    if agent not in st.agents:
        scan.error(f"undefined agent {agent!r}")
    gateways = dict(st.gateways)
    gateways[sa] = agent
    return replace(st, gateways=gateways)


def _stmt_policy(scan, st, alphabets, matrices):
    policy = scan.token()
    if policy not in (STRICT, LENIENT):
        scan.error(f"policy must be strict or lenient, got {policy!r}")
    return replace(st, policy=policy)


_HANDLERS = {
    "agent": _stmt_agent,
    "alphabet": _stmt_alphabet,
    "matrix": _stmt_matrix,
    "promise": _stmt_promise,
    "superagent": _stmt_superagent,
    "scale": _stmt_scale,
    "tenancy": _stmt_tenancy,
    "namespace": _stmt_namespace,
    "lattice": _stmt_lattice,
    "tree": _stmt_tree,
    "clos": _stmt_clos,
    "adjacency": _stmt_adjacency,
    "gateway": _stmt_gateway,
    "policy": _stmt_policy,
}


# -- spacetime and directory text ------------------------------------------------------


def spacetime_to_statements(st: SemanticSpacetime) -> str:
    """Re-emit a snapshot as scenario statements (agents then promises)."""
    lines = []
    for aid in st.agent_ids():
        agent = st.agents[aid]
        if agent.name != aid:
            lines.append(f"agent {aid} as {agent.name}")
        else:
            lines.append(f"agent {aid}")
    for p in st.sorted_promises():
        lines.append("promise " + promise_to_text(p))
    return "\n".join(lines) + "\n"


def _language_of(body: Body) -> str:
    return ",".join(sorted(body.symbol_set)) if body.symbols else "-"


def directory_to_text(directory: Directory) -> str:
    """One text block per directory; entry lines sorted for byte stability."""
    lines = [f"directory {directory.owner}"]
    for agent in sorted(directory.member_agents, key=lambda a: a.id):
        line = f"member {agent.id}"
        if agent.residents:
            line += " residents(" + ",".join(sorted(agent.residents)) + ")"
        if agent.name != agent.id:
            line += f" {agent.name}"
        lines.append(line)
    entry_lines = []
    for tag in sorted(directory.entries):
        for p in directory.entries[tag]:
            entry_lines.append(f"{tag} | {promise_to_text(p)} | {_language_of(p.body)}")
    lines.extend(sorted(entry_lines))
    for p in sorted(directory.produced, key=lambda p: p.render()):
        lines.append("produced " + promise_to_text(p))
    return "\n".join(lines) + "\n"


def directories_to_text(dirs) -> str:
    return "\n".join(directory_to_text(d) for d in sorted(dirs, key=lambda d: d.owner))


def directories_from_text(text: str) -> tuple[Directory, ...]:
    dirs = []
    owner = None
    members: list[Agent] = []
    entries: dict[str, list[Promise]] = {}
    produced: list[Promise] = []

    def flush():
        nonlocal owner, members, entries, produced
        if owner is not None:
            dirs.append(
                Directory(
                    owner,
                    tuple(members),
                    {tag: tuple(ps) for tag, ps in entries.items()},
                    frozenset(produced),
                )
            )
        owner, members, entries, produced = None, [], {}, []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("directory "):
            flush()
            owner = line.split(None, 1)[1]
        elif line.startswith("member "):
            scan = _Scan(line, line_no)
            scan.token()
            aid = scan.token()
            residents = frozenset()
            scan.skip_ws()
            if scan.startswith("residents("):
                scan.take(len("residents("))
                inner = scan.balanced_until(")")
                residents = frozenset(x for x in _split_top(inner) if x)
            name = scan.text[scan.pos:].strip()
            members.append(Agent(aid, name, residents))
        elif line.startswith("produced "):
            produced.append(parse_promise_text(line[len("produced "):], line_no))
        else:
            first = line.index(" | ")
            last = line.rindex(" | ")
            if first == last:
                raise ScenarioParseError(line_no, 1, "malformed directory entry line")
            tag = line[:first]
            promise = parse_promise_text(line[first + 3:last], line_no)
            entries.setdefault(tag, []).append(promise)
    flush()
    return tuple(dirs)
