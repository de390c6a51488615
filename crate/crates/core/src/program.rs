//! Propositional SD-programs: surface syntax, validation and completion.
//!
//! Program files are sequences of clauses `head <- body.` where the body is
//! `true`, `false` or a `&`-separated conjunction of symbols. `%` starts a
//! comment running to the end of the line.
//!
//! Validation enforces the single-definition restriction (no two clauses
//! share a head) and completion closes the program: every symbol that occurs
//! anywhere but has no clause of its own receives `s <- false.`. The symbol
//! table orders symbols by first textual appearance, and the clauses of an
//! [`SDProgram`] are stored so that clause `i` defines symbol `i`.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Location, Result};

const RESERVED: [&str; 2] = ["true", "false"];

/// A propositional symbol. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Result<Self> {
        if !is_identifier(name) {
            return Err(Error::Syntax {
                location: Location::default(),
                message: format!("`{name}` is not a valid symbol name"),
            });
        }
        if RESERVED.contains(&name) {
            return Err(Error::ReservedHead {
                word: name.to_string(),
                location: Location::default(),
            });
        }
        Ok(Self(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A query atom: a symbol, ⊤ or ⊥.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Prop(Symbol),
    Top,
    Bottom,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Prop(s) => write!(f, "{s}"),
            Atom::Top => f.write_str("true"),
            Atom::Bottom => f.write_str("false"),
        }
    }
}

/// A nonempty conjunction of atoms with set semantics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query(BTreeSet<Atom>);

impl Query {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let atoms: BTreeSet<Atom> = atoms.into_iter().collect();
        if atoms.is_empty() {
            return Err(Error::EmptyQuery);
        }
        Ok(Self(atoms))
    }

    pub fn top() -> Self {
        Self(BTreeSet::from([Atom::Top]))
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    /// The query consisting only of ⊤.
    pub fn is_proved(&self) -> bool {
        self.0.len() == 1 && self.0.contains(&Atom::Top)
    }

    pub fn is_failed(&self) -> bool {
        self.0.contains(&Atom::Bottom)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for atom in &self.0 {
            if !first {
                f.write_str(" & ")?;
            }
            first = false;
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// Clause body. A conjunction holds distinct symbols in first-appearance order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Body {
    Conj(Vec<Symbol>),
    Top,
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefiniteClause {
    pub head: Symbol,
    pub body: Body,
}

impl DefiniteClause {
    pub fn new(head: Symbol, body: Body) -> Self {
        Self { head, body }
    }
}

impl fmt::Display for DefiniteClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- ", self.head)?;
        match &self.body {
            Body::Top => f.write_str("true")?,
            Body::Bottom => f.write_str("false")?,
            Body::Conj(symbols) => {
                for (i, s) in symbols.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{s}")?;
                }
            }
        }
        f.write_str(".")
    }
}

#[derive(Clone, Debug)]
pub struct DraftClause {
    pub clause: DefiniteClause,
    pub location: Location,
}

/// Parsed but unvalidated clause list, in source order.
#[derive(Clone, Debug, Default)]
pub struct ProgramDraft {
    pub clauses: Vec<DraftClause>,
}

impl ProgramDraft {
    pub fn clauses(&self) -> impl Iterator<Item = &DefiniteClause> {
        self.clauses.iter().map(|c| &c.clause)
    }
}

impl fmt::Display for ProgramDraft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}", c.clause)?;
        }
        Ok(())
    }
}

/// Canonical ordering of the `N` program symbols. Index `N` is ⊤ and `N + 1`
/// is ⊥ (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl SymbolTable {
    /// Builds a table from symbols in order; later duplicates are ignored.
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        let mut table = Self {
            symbols: Vec::new(),
            index: HashMap::new(),
        };
        for s in symbols {
            table.insert(s);
        }
        table
    }

    fn insert(&mut self, symbol: Symbol) {
        if !self.index.contains_key(&symbol) {
            self.index.insert(symbol.clone(), self.symbols.len());
            self.symbols.push(symbol);
        }
    }

    /// Number of program symbols `N`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Width of top-down vectors, `N + 2`.
    pub fn dim(&self) -> usize {
        self.symbols.len() + 2
    }

    pub fn top_index(&self) -> usize {
        self.symbols.len()
    }

    pub fn bottom_index(&self) -> usize {
        self.symbols.len() + 1
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> Option<&Symbol> {
        self.symbols.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn index_of_symbol(&self, symbol: &Symbol) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn atom_index(&self, atom: &Atom) -> Option<usize> {
        match atom {
            Atom::Prop(s) => self.index_of_symbol(s),
            Atom::Top => Some(self.top_index()),
            Atom::Bottom => Some(self.bottom_index()),
        }
    }

    pub fn atom_at(&self, index: usize) -> Option<Atom> {
        match index {
            i if i < self.symbols.len() => Some(Atom::Prop(self.symbols[i].clone())),
            i if i == self.top_index() => Some(Atom::Top),
            i if i == self.bottom_index() => Some(Atom::Bottom),
            _ => None,
        }
    }

    /// Atoms of `query` in table order.
    pub fn ordered_atoms(&self, query: &Query) -> Vec<Atom> {
        let mut atoms: Vec<Atom> = query.iter().cloned().collect();
        atoms.sort_by_key(|a| self.atom_index(a).unwrap_or(usize::MAX));
        atoms
    }

    /// Symbols of `set` in table order.
    pub fn ordered_symbols<'a>(&self, set: impl IntoIterator<Item = &'a Symbol>) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = set.into_iter().cloned().collect();
        out.sort_by_key(|s| self.index_of_symbol(s).unwrap_or(usize::MAX));
        out
    }
}

/// A validated, completed SD-program. Clause `i` defines symbol `i` of the
/// table and every symbol has exactly one clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SDProgram {
    table: SymbolTable,
    clauses: Vec<DefiniteClause>,
    synthesized: Vec<Symbol>,
}

impl SDProgram {
    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    pub fn clauses(&self) -> &[DefiniteClause] {
        &self.clauses
    }

    /// The defining clause of the symbol at `index`.
    pub fn clause(&self, index: usize) -> &DefiniteClause {
        &self.clauses[index]
    }

    pub fn clause_for(&self, symbol: &Symbol) -> Option<&DefiniteClause> {
        self.table.index_of_symbol(symbol).map(|i| &self.clauses[i])
    }

    /// Symbols that received a synthesized `s <- false.` clause.
    pub fn synthesized(&self) -> &[Symbol] {
        &self.synthesized
    }
}

impl fmt::Display for SDProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

// ------------------------------------------------------------------------------------------------
// Lexing
// ------------------------------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Arrow,
    Amp,
    Dot,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Arrow => f.write_str("`<-`"),
            Token::Amp => f.write_str("`&`"),
            Token::Dot => f.write_str("`.`"),
        }
    }
}

fn lex(text: &str, allow_comments: bool) -> Result<Vec<(Token, Location)>> {
    let mut tokens = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let loc = Location::new(line_no + 1, i + 1);
            match c {
                c if c.is_whitespace() => i += 1,
                '%' if allow_comments => break,
                '&' => {
                    tokens.push((Token::Amp, loc));
                    i += 1;
                }
                '.' => {
                    tokens.push((Token::Dot, loc));
                    i += 1;
                }
                '<' if chars.get(i + 1) == Some(&'-') => {
                    tokens.push((Token::Arrow, loc));
                    i += 2;
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    tokens.push((Token::Ident(chars[start..i].iter().collect()), loc));
                }
                other => {
                    return Err(Error::Syntax {
                        location: loc,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    Ok(tokens)
}

fn end_location(text: &str) -> Location {
    let line = text.lines().count().max(1);
    let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    Location::new(line, column)
}

struct Cursor<'a> {
    tokens: &'a [(Token, Location)],
    pos: usize,
    end: Location,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a (Token, Location)> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a (Token, Location)> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Token) -> Result<Location> {
        match self.next() {
            Some((t, loc)) if t == want => Ok(*loc),
            Some((t, loc)) => Err(Error::Syntax {
                location: *loc,
                message: format!("expected {want}, found {t}"),
            }),
            None => Err(Error::Syntax {
                location: self.end,
                message: format!("expected {want}, found end of input"),
            }),
        }
    }

    fn ident(&mut self) -> Result<(&'a str, Location)> {
        match self.next() {
            Some((Token::Ident(s), loc)) => Ok((s.as_str(), *loc)),
            Some((t, loc)) => Err(Error::Syntax {
                location: *loc,
                message: format!("expected an identifier, found {t}"),
            }),
            None => Err(Error::Syntax {
                location: self.end,
                message: "expected an identifier, found end of input".into(),
            }),
        }
    }
}

// ------------------------------------------------------------------------------------------------
// Parsing
// ------------------------------------------------------------------------------------------------

/// Parses program text into clauses in source order.
pub fn parse_program(text: &str) -> Result<ProgramDraft> {
    let tokens = lex(text, true)?;
    let mut cur = Cursor {
        tokens: &tokens,
        pos: 0,
        end: end_location(text),
    };
    let mut clauses = Vec::new();
    while cur.peek().is_some() {
        clauses.push(parse_clause(&mut cur)?);
    }
    Ok(ProgramDraft { clauses })
}

fn parse_clause(cur: &mut Cursor<'_>) -> Result<DraftClause> {
    let (head, location) = cur.ident()?;
    if RESERVED.contains(&head) {
        return Err(Error::ReservedHead {
            word: head.to_string(),
            location,
        });
    }
    let head = Symbol(Arc::from(head));
    cur.expect(&Token::Arrow)?;

    let body = match cur.peek() {
        Some((Token::Dot, _)) => return Err(Error::EmptyBody { location }),
        Some((Token::Ident(w), _)) if w == "true" || w == "false" => {
            let (w, _) = cur.ident()?;
            if let Some((Token::Amp, loc)) = cur.peek() {
                return Err(Error::Syntax {
                    location: *loc,
                    message: format!("`{w}` must be the whole clause body"),
                });
            }
            if w == "true" {
                Body::Top
            } else {
                Body::Bottom
            }
        }
        _ => {
            let mut symbols: Vec<Symbol> = Vec::new();
            loop {
                let (name, loc) = cur.ident()?;
                if RESERVED.contains(&name) {
                    return Err(Error::Syntax {
                        location: loc,
                        message: format!("`{name}` must be the whole clause body"),
                    });
                }
                if !symbols.iter().any(|s| s.as_str() == name) {
                    symbols.push(Symbol(Arc::from(name)));
                }
                match cur.peek() {
                    Some((Token::Amp, _)) => {
                        cur.next();
                    }
                    _ => break,
                }
            }
            Body::Conj(symbols)
        }
    };
    cur.expect(&Token::Dot)?;
    Ok(DraftClause {
        clause: DefiniteClause { head, body },
        location,
    })
}

/// Parses `atom ("&" atom)*` without resolving symbols. Duplicates collapse.
pub fn parse_query_atoms(text: &str) -> Result<Query> {
    let tokens = lex(text, false)?;
    let mut cur = Cursor {
        tokens: &tokens,
        pos: 0,
        end: end_location(text),
    };
    let mut atoms = Vec::new();
    loop {
        let (name, _) = cur.ident()?;
        atoms.push(match name {
            "true" => Atom::Top,
            "false" => Atom::Bottom,
            n => Atom::Prop(Symbol(Arc::from(n))),
        });
        match cur.next() {
            None => break,
            Some((Token::Amp, _)) => {}
            Some((t, loc)) => {
                return Err(Error::Syntax {
                    location: *loc,
                    message: format!("expected `&` or end of query, found {t}"),
                })
            }
        }
    }
    Query::new(atoms)
}

/// Parses a query and checks every symbol against `table`.
pub fn parse_query(text: &str, table: &SymbolTable) -> Result<Query> {
    let query = parse_query_atoms(text)?;
    for atom in query.iter() {
        if let Atom::Prop(s) = atom {
            if table.index_of_symbol(s).is_none() {
                return Err(Error::UnknownSymbol(s.to_string()));
            }
        }
    }
    Ok(query)
}

/// Symbols mentioned by a query, in first-appearance order.
pub fn query_symbols(query: &Query) -> Vec<Symbol> {
    query
        .iter()
        .filter_map(|a| match a {
            Atom::Prop(s) => Some(s.clone()),
            _ => None,
        })
        .collect()
}

// ------------------------------------------------------------------------------------------------
// Validation
// ------------------------------------------------------------------------------------------------

/// Rejects duplicate heads, builds the symbol table and completes the
/// program with `s <- false.` for every symbol lacking a clause.
///
/// `extra_symbols` are symbols that only appear in queries; they are appended
/// to the table after all program symbols.
pub fn validate_and_complete(
    draft: &ProgramDraft,
    extra_symbols: impl IntoIterator<Item = Symbol>,
) -> Result<SDProgram> {
    if draft.clauses.is_empty() {
        return Err(Error::EmptyProgram);
    }

    let mut defined: HashMap<&Symbol, (usize, Location)> = HashMap::new();
    for (i, dc) in draft.clauses.iter().enumerate() {
        if let Some((_, first)) = defined.insert(&dc.clause.head, (i, dc.location)) {
            return Err(Error::DuplicateHead {
                symbol: dc.clause.head.to_string(),
                first,
                second: dc.location,
            });
        }
    }

    let mut order = Vec::new();
    for dc in &draft.clauses {
        order.push(dc.clause.head.clone());
        if let Body::Conj(symbols) = &dc.clause.body {
            order.extend(symbols.iter().cloned());
        }
    }
    order.extend(extra_symbols);
    let table = SymbolTable::new(order);

    let mut synthesized = Vec::new();
    let clauses = table
        .symbols()
        .iter()
        .map(|s| match defined.get(s) {
            Some(&(i, _)) => draft.clauses[i].clause.clone(),
            None => {
                synthesized.push(s.clone());
                DefiniteClause::new(s.clone(), Body::Bottom)
            }
        })
        .collect();

    Ok(SDProgram {
        table,
        clauses,
        synthesized,
    })
}

/// Parses and validates program text in one go.
pub fn load_program(text: &str) -> Result<SDProgram> {
    validate_and_complete(&parse_program(text)?, std::iter::empty())
}
