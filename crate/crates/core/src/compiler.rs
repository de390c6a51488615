//! Compilation of SD-programs into attention parameters.
//!
//! Top-down derivation works in `N + 2` dimensions (the program symbols
//! followed by ⊤ and ⊥). Row `i` of the head matrix is the unit vector of the
//! head of clause `i`, which is the identity because clauses are aligned with
//! the symbol table. Row `i` of the body matrix is the indicator of that
//! clause's body, and the rows for ⊤ and ⊥ map each constant to itself.
//!
//! Bottom-up derivation works in `N` dimensions. Row `i` of the program
//! matrix spreads weight `1/M` over the `M` body symbols of clause `i`, holds a
//! single `1` on the diagonal for a fact, and is zero for a `false` body.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Rational};
use crate::program::{Atom, Body, Query, SDProgram, Symbol, SymbolTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledProgram {
    table: SymbolTable,
    head: Matrix,
    body: Matrix,
    program: Matrix,
    /// `I_N`: the head matrix without its ⊤/⊥ rows and columns.
    values_bottomup: Matrix,
    fact_heads: BTreeSet<usize>,
}

impl CompiledProgram {
    pub fn table(&self) -> &SymbolTable {
        &self.table
    }

    /// Keys for top-down attention, `(N+2)×(N+2)`.
    pub fn head_matrix(&self) -> &Matrix {
        &self.head
    }

    /// Values for top-down attention, `(N+2)×(N+2)`.
    pub fn body_matrix(&self) -> &Matrix {
        &self.body
    }

    /// Keys for bottom-up attention, `N×N`.
    pub fn program_matrix(&self) -> &Matrix {
        &self.program
    }

    /// Values for bottom-up attention, `I_N`.
    pub fn bottomup_values(&self) -> &Matrix {
        &self.values_bottomup
    }

    /// Indices of symbols whose clause body is `true`.
    pub fn fact_heads(&self) -> &BTreeSet<usize> {
        &self.fact_heads
    }
}

pub fn compile(program: &SDProgram) -> CompiledProgram {
    let table = program.table().clone();
    let n = table.len();
    let dim = table.dim();

    let mut body = Matrix::zeros(dim, dim);
    let mut pm = Matrix::zeros(n, n);
    let mut fact_heads = BTreeSet::new();

    for (i, clause) in program.clauses().iter().enumerate() {
        debug_assert_eq!(table.index_of_symbol(&clause.head), Some(i));
        match &clause.body {
            Body::Top => {
                body.set(i, table.top_index(), Rational::one());
                pm.set(i, i, Rational::one());
                fact_heads.insert(i);
            }
            Body::Bottom => {
                body.set(i, table.bottom_index(), Rational::one());
            }
            Body::Conj(symbols) => {
                let weight = Rational::new(1, symbols.len() as i64);
                for s in symbols {
                    let j = table
                        .index_of_symbol(s)
                        .expect("completed program mentions only table symbols");
                    body.set(i, j, Rational::one());
                    pm.set(i, j, weight);
                }
            }
        }
    }
    body.set(table.top_index(), table.top_index(), Rational::one());
    body.set(table.bottom_index(), table.bottom_index(), Rational::one());

    CompiledProgram {
        table,
        head: Matrix::identity(dim),
        body,
        program: pm,
        values_bottomup: Matrix::identity(n),
        fact_heads,
    }
}

/// 0/1 indicator of a query over the `N + 2` top-down dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QueryVector(Vec<bool>);

impl QueryVector {
    /// Accepts a 0/1 vector with at least one set entry.
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if !bits.iter().any(|&b| b) {
            return Err(Error::EmptyQuery);
        }
        Ok(Self(bits))
    }

    pub fn from_rationals(v: &[Rational]) -> Result<Self> {
        Self::from_bits(linalg::to_bits(v)?)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        linalg::from_bits(&self.0)
    }

    pub fn decode(&self, table: &SymbolTable) -> Query {
        let atoms = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .filter_map(|(i, _)| table.atom_at(i));
        Query::new(atoms).expect("query vectors have a set entry")
    }
}

/// 0/1 truth assignment over the `N` program symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interpretation(Vec<bool>);

impl Interpretation {
    pub fn empty(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn from_rationals(v: &[Rational]) -> Result<Self> {
        Ok(Self(linalg::to_bits(v)?))
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = vec![false; n];
        for i in indices {
            bits[i] = true;
        }
        Self(bits)
    }

    pub fn from_symbols<'a>(
        table: &SymbolTable,
        symbols: impl IntoIterator<Item = &'a Symbol>,
    ) -> Result<Self> {
        let mut bits = vec![false; table.len()];
        for s in symbols {
            let i = table
                .index_of_symbol(s)
                .ok_or_else(|| Error::UnknownSymbol(s.to_string()))?;
            bits[i] = true;
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        linalg::from_bits(&self.0)
    }

    pub fn union(&self, other: &Interpretation) -> Interpretation {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| *a || *b).collect())
    }

    pub fn is_subset(&self, other: &Interpretation) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| !*a || *b)
    }

    pub fn decode(&self, table: &SymbolTable) -> BTreeSet<Symbol> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .filter_map(|(i, _)| table.symbol(i).cloned())
            .collect()
    }
}

pub fn vectorize_query(query: &Query, table: &SymbolTable) -> Result<QueryVector> {
    let mut bits = vec![false; table.dim()];
    for atom in query.iter() {
        let i = table.atom_index(atom).ok_or_else(|| match atom {
            Atom::Prop(s) => Error::UnknownSymbol(s.to_string()),
            _ => unreachable!("constants always have an index"),
        })?;
        bits[i] = true;
    }
    QueryVector::from_bits(bits)
}

/// Inverse of [`vectorize_query`] for `N + 2`-dimensional 0/1 vectors.
pub fn devectorize_query(v: &[Rational], table: &SymbolTable) -> Result<Query> {
    if v.len() != table.dim() {
        return Err(Error::DimensionMismatch {
            expected: table.dim(),
            found: v.len(),
        });
    }
    Ok(QueryVector::from_rationals(v)?.decode(table))
}

/// Symbols set to 1 in an `N`-dimensional 0/1 vector.
pub fn devectorize_interpretation(v: &[Rational], table: &SymbolTable) -> Result<BTreeSet<Symbol>> {
    if v.len() != table.len() {
        return Err(Error::DimensionMismatch {
            expected: table.len(),
            found: v.len(),
        });
    }
    Ok(Interpretation::from_rationals(v)?.decode(table))
}

/// True when every row of `m` sums to exactly one or is entirely zero.
pub fn rows_are_stochastic_or_zero(m: &Matrix) -> bool {
    m.row_iter().all(|row| {
        let sum = row.iter().fold(Rational::zero(), |acc, x| acc + x);
        sum.is_one() || row.iter().all(Zero::is_zero)
    })
}
