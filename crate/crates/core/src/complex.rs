//! Filtered chain complexes over an exact field, their line-oriented text
//! format, and cellular `Z/p` actions with fixed-subcomplex extraction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::field::{format_rational, parse_rational, FieldError, FieldSpec, Rational, Scalar};
use crate::persistence::compute_barcode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantKind {
    /// `∂` must lower degree by exactly one.
    Degree,
    /// `∂∘∂ = 0`.
    BoundarySquared,
    /// Faces must not enter the filtration after their cofaces.
    Filtration,
    DuplicateId,
    UnknownGenerator,
    DuplicateBoundary,
    /// Coefficient does not belong to the declared field.
    FieldMismatch,
    ActionOrder,
    ActionDegree,
    ActionFiltration,
    ActionSign,
    ActionCommute,
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InvariantKind::Degree => "degree",
            InvariantKind::BoundarySquared => "boundary-squared",
            InvariantKind::Filtration => "filtration",
            InvariantKind::DuplicateId => "duplicate-id",
            InvariantKind::UnknownGenerator => "unknown-generator",
            InvariantKind::DuplicateBoundary => "duplicate-boundary",
            InvariantKind::FieldMismatch => "field-mismatch",
            InvariantKind::ActionOrder => "action-order",
            InvariantKind::ActionDegree => "action-degree",
            InvariantKind::ActionFiltration => "action-filtration",
            InvariantKind::ActionSign => "action-sign",
            InvariantKind::ActionCommute => "action-commute",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invariant violated ({kind}) at {generators:?}")]
    InvariantViolation {
        kind: InvariantKind,
        generators: Vec<String>,
    },
    #[error("fixed generators do not span a subcomplex: {generators:?}")]
    NotClosedUnderBoundary { generators: Vec<String> },
    #[error("action of order {order} requires a complex over F_{order}, found {found}")]
    WrongField { order: u32, found: FieldSpec },
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn violation(kind: InvariantKind, generators: Vec<String>) -> ComplexError {
    ComplexError::InvariantViolation { kind, generators }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
    pub filtration: Rational,
}

/// Sparse chain: `(generator index, coefficient)` sorted by index, no zeros.
pub type Chain = Vec<(usize, Scalar)>;

/// A validated filtered chain complex. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredChainComplex {
    field: FieldSpec,
    generators: Vec<Generator>,
    boundary: Vec<Chain>,
    index: HashMap<String, usize>,
}

/// Incremental construction of a complex; validation happens in [`ComplexBuilder::build`].
#[derive(Debug, Clone)]
pub struct ComplexBuilder {
    field: FieldSpec,
    generators: Vec<Generator>,
    boundary: Vec<(String, Vec<(Scalar, String)>)>,
}

impl ComplexBuilder {
    pub fn new(field: FieldSpec) -> Self {
        ComplexBuilder {
            field,
            generators: Vec::new(),
            boundary: Vec::new(),
        }
    }

    pub fn generator(mut self, id: &str, degree: i64, filtration: Rational) -> Self {
        self.generators.push(Generator {
            id: id.to_string(),
            degree,
            filtration,
        });
        self
    }

    /// `∂ id = Σ coef·face`, integer coefficients mapped into the field.
    pub fn boundary(mut self, id: &str, terms: &[(i64, &str)]) -> Self {
        let terms = terms
            .iter()
            .map(|(c, g)| (self.field.from_int(*c), g.to_string()))
            .collect();
        self.boundary.push((id.to_string(), terms));
        self
    }

    pub fn boundary_scalars(mut self, id: &str, terms: Vec<(Scalar, String)>) -> Self {
        self.boundary.push((id.to_string(), terms));
        self
    }

    pub fn build(self) -> Result<FilteredChainComplex, ComplexError> {
        FilteredChainComplex::new(self.field, self.generators, self.boundary)
    }
}

impl FilteredChainComplex {
    /// Validates every invariant: unique ids, degree rule, `∂∘∂ = 0`, filtration compatibility.
    pub fn new(
        field: FieldSpec,
        generators: Vec<Generator>,
        boundary: Vec<(String, Vec<(Scalar, String)>)>,
    ) -> Result<Self, ComplexError> {
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(violation(InvariantKind::DuplicateId, vec![g.id.clone()]));
            }
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| violation(InvariantKind::UnknownGenerator, vec![id.to_string()]))
        };
        let mut columns: Vec<Option<Chain>> = vec![None; generators.len()];
        for (id, terms) in boundary {
            let col = lookup(&id)?;
            if columns[col].is_some() {
                return Err(violation(InvariantKind::DuplicateBoundary, vec![id]));
            }
            let mut acc = BTreeMap::new();
            for (coef, face) in terms {
                if !field.contains(&coef) {
                    return Err(violation(InvariantKind::FieldMismatch, vec![id.clone()]));
                }
                let row = lookup(&face)?;
                accumulate(&mut acc, row, &coef);
            }
            columns[col] = Some(acc.into_iter().collect());
        }
        let boundary: Vec<Chain> = columns.into_iter().map(Option::unwrap_or_default).collect();
        let complex = FilteredChainComplex {
            field,
            generators,
            boundary,
            index,
        };
        complex.validate()?;
        Ok(complex)
    }

    fn validate(&self) -> Result<(), ComplexError> {
        for (j, col) in self.boundary.iter().enumerate() {
            let g = &self.generators[j];
            for (i, _) in col {
                let face = &self.generators[*i];
                if face.degree + 1 != g.degree {
                    return Err(violation(
                        InvariantKind::Degree,
                        vec![g.id.clone(), face.id.clone()],
                    ));
                }
                if face.filtration > g.filtration {
                    return Err(violation(
                        InvariantKind::Filtration,
                        vec![g.id.clone(), face.id.clone()],
                    ));
                }
            }
            let dd = self.apply_boundary(col);
            if !dd.is_empty() {
                return Err(violation(InvariantKind::BoundarySquared, vec![g.id.clone()]));
            }
        }
        Ok(())
    }

    /// `∂` applied to a chain.
    pub fn apply_boundary(&self, chain: &[(usize, Scalar)]) -> Chain {
        let mut acc = BTreeMap::new();
        for (i, c) in chain {
            for (k, b) in &self.boundary[*i] {
                accumulate(&mut acc, *k, &c.mul(b).expect("same field"));
            }
        }
        acc.into_iter().collect()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn boundary_of(&self, i: usize) -> &[(usize, Scalar)] {
        &self.boundary[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Same generators and incidences with coefficients mapped into another
    /// field. Only complexes over Q can be reinterpreted.
    pub fn over_field(&self, field: FieldSpec) -> Result<FilteredChainComplex, ComplexError> {
        if field == self.field {
            return Ok(self.clone());
        }
        if self.field != FieldSpec::Rationals {
            return Err(FieldError::FieldMismatch(self.field, field).into());
        }
        let boundary = self
            .boundary
            .iter()
            .enumerate()
            .map(|(j, col)| {
                let terms = col
                    .iter()
                    .map(|(i, c)| {
                        let q = match c {
                            Scalar::Rational(q) => q.clone(),
                            Scalar::Mod { .. } => unreachable!(),
                        };
                        Ok((field.from_rational(&q)?, self.generators[*i].id.clone()))
                    })
                    .collect::<Result<Vec<_>, FieldError>>()?;
                Ok((self.generators[j].id.clone(), terms))
            })
            .collect::<Result<Vec<_>, ComplexError>>()?;
        FilteredChainComplex::new(field, self.generators.clone(), boundary)
    }

    /// Serializes in the text format accepted by [`parse_complex`].
    pub fn to_text(&self, action: Option<&CyclicAction>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "field {}", self.field);
        for g in &self.generators {
            let _ = writeln!(out, "gen {} {} {}", g.id, g.degree, format_rational(&g.filtration));
        }
        for (j, col) in self.boundary.iter().enumerate() {
            if col.is_empty() {
                continue;
            }
            let _ = write!(out, "bnd {}", self.generators[j].id);
            for (i, c) in col {
                let _ = write!(out, " {} {}", c, self.generators[*i].id);
            }
            out.push('\n');
        }
        if let Some(a) = action {
            let _ = writeln!(out, "act {}", a.order);
            for (i, g) in self.generators.iter().enumerate() {
                if a.image[i] != i || a.sign[i] != self.field.one() {
                    let _ = writeln!(
                        out,
                        "perm {} {} {}",
                        g.id, self.generators[a.image[i]].id, a.sign[i]
                    );
                }
            }
        }
        out
    }
}

fn accumulate(acc: &mut BTreeMap<usize, Scalar>, idx: usize, coef: &Scalar) {
    if coef.is_zero() {
        return;
    }
    let sum = match acc.get(&idx) {
        Some(v) => v.add(coef).expect("same field"),
        None => coef.clone(),
    };
    if sum.is_zero() {
        acc.remove(&idx);
    } else {
        acc.insert(idx, sum);
    }
}

/// A cellular `Z/p` action `g·e_i = sign_i · e_{image_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicAction {
    order: u32,
    image: Vec<usize>,
    sign: Vec<Scalar>,
}

impl CyclicAction {
    /// Generators not mentioned are fixed with sign 1.
    pub fn new(
        complex: &FilteredChainComplex,
        order: u32,
        perm: &[(String, String, Scalar)],
    ) -> Result<Self, ComplexError> {
        let field = complex.field();
        if !crate::field::is_prime(order as u64) {
            return Err(violation(InvariantKind::ActionOrder, vec![]));
        }
        let mut image: Vec<usize> = (0..complex.len()).collect();
        let mut sign = vec![field.one(); complex.len()];
        let mut seen = vec![false; complex.len()];
        for (from, to, s) in perm {
            let i = complex
                .index_of(from)
                .ok_or_else(|| violation(InvariantKind::UnknownGenerator, vec![from.clone()]))?;
            let j = complex
                .index_of(to)
                .ok_or_else(|| violation(InvariantKind::UnknownGenerator, vec![to.clone()]))?;
            if seen[i] {
                return Err(violation(InvariantKind::ActionOrder, vec![from.clone()]));
            }
            if !field.contains(s) {
                return Err(violation(InvariantKind::FieldMismatch, vec![from.clone()]));
            }
            seen[i] = true;
            image[i] = j;
            sign[i] = s.clone();
        }
        let action = CyclicAction { order, image, sign };
        action.validate(complex)?;
        Ok(action)
    }

    /// The identity action of order `p`.
    pub fn trivial(complex: &FilteredChainComplex, order: u32) -> Result<Self, ComplexError> {
        CyclicAction::new(complex, order, &[])
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn image(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn sign(&self, i: usize) -> &Scalar {
        &self.sign[i]
    }

    fn validate(&self, c: &FilteredChainComplex) -> Result<(), ComplexError> {
        let gens = c.generators();
        let id = |i: usize| gens[i].id.clone();
        // Bijectivity.
        let mut hit = vec![false; c.len()];
        for &j in &self.image {
            if hit[j] {
                return Err(violation(InvariantKind::ActionOrder, vec![id(j)]));
            }
            hit[j] = true;
        }
        for i in 0..c.len() {
            let j = self.image[i];
            if self.sign[i].is_zero() {
                return Err(violation(InvariantKind::ActionSign, vec![id(i)]));
            }
            if gens[j].degree != gens[i].degree {
                return Err(violation(InvariantKind::ActionDegree, vec![id(i), id(j)]));
            }
            if gens[j].filtration != gens[i].filtration {
                return Err(violation(InvariantKind::ActionFiltration, vec![id(i), id(j)]));
            }
            // g^p e_i = e_i, signs included.
            let mut k = i;
            let mut coef = c.field().one();
            for _ in 0..self.order {
                coef = coef.mul(&self.sign[k])?;
                k = self.image[k];
            }
            if k != i || coef != c.field().one() {
                return Err(violation(InvariantKind::ActionOrder, vec![id(i)]));
            }
            // g ∂ e_i = ∂ g e_i.
            let g_of_boundary = self.apply(c.boundary_of(i));
            let boundary_of_g: Chain = c
                .boundary_of(j)
                .iter()
                .map(|(r, v)| (*r, v.mul(&self.sign[i]).expect("same field")))
                .collect();
            let mut diff = BTreeMap::new();
            for (r, v) in g_of_boundary {
                accumulate(&mut diff, r, &v);
            }
            for (r, v) in boundary_of_g {
                accumulate(&mut diff, r, &v.neg());
            }
            if !diff.is_empty() {
                return Err(violation(InvariantKind::ActionCommute, vec![id(i)]));
            }
        }
        Ok(())
    }

    fn apply(&self, chain: &[(usize, Scalar)]) -> Chain {
        let mut acc = BTreeMap::new();
        for (i, v) in chain {
            accumulate(&mut acc, self.image[*i], &v.mul(&self.sign[*i]).expect("same field"));
        }
        acc.into_iter().collect()
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.image[i] == i
    }
}

/// A complex as read from text, with its optional action block.
#[derive(Debug, Clone)]
pub struct ParsedComplex {
    pub complex: FilteredChainComplex,
    pub action: Option<CyclicAction>,
}

pub fn parse_complex(text: &str) -> Result<FilteredChainComplex, ComplexError> {
    parse_complex_with_action(text).map(|p| p.complex)
}

/// `(coefficient, face)` tokens of a `bnd` line before lookup.
type RawTerms = Vec<(String, String)>;

/// Parses the line format (`field`, `gen`, `bnd`, `act`/`perm`). Missing
/// `field` header means Q.
pub fn parse_complex_with_action(text: &str) -> Result<ParsedComplex, ComplexError> {
    let mut field: Option<FieldSpec> = None;
    let mut generators = Vec::new();
    let mut raw_boundary: Vec<(usize, String, RawTerms)> = Vec::new();
    let mut action_order: Option<u32> = None;
    let mut raw_perm: Vec<(usize, String, String, String)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: &str| ComplexError::Syntax {
            line: line_no,
            message: message.to_string(),
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "field" => {
                if tokens.len() != 2 {
                    return Err(syntax("expected `field <spec>`"));
                }
                if field.is_some() || !generators.is_empty() {
                    return Err(syntax("`field` must be a single header line"));
                }
                field = Some(
                    tokens[1]
                        .parse()
                        .map_err(|e: FieldError| syntax(&e.to_string()))?,
                );
            }
            "gen" => {
                if tokens.len() != 4 {
                    return Err(syntax("expected `gen <id> <degree> <filtration>`"));
                }
                let degree: i64 = tokens[2].parse().map_err(|_| syntax("bad degree"))?;
                let filtration =
                    parse_rational(tokens[3]).map_err(|_| syntax("bad filtration value"))?;
                generators.push(Generator {
                    id: tokens[1].to_string(),
                    degree,
                    filtration,
                });
            }
            "bnd" => {
                if tokens.len() < 4 || !(tokens.len() - 2).is_multiple_of(2) {
                    return Err(syntax("expected `bnd <id> (<coef> <id>)+`"));
                }
                let terms = tokens[2..]
                    .chunks(2)
                    .map(|pair| (pair[0].to_string(), pair[1].to_string()))
                    .collect();
                raw_boundary.push((line_no, tokens[1].to_string(), terms));
            }
            "act" => {
                if tokens.len() != 2 || action_order.is_some() {
                    return Err(syntax("expected a single `act <order>`"));
                }
                action_order = Some(tokens[1].parse().map_err(|_| syntax("bad action order"))?);
            }
            "perm" => {
                if action_order.is_none() {
                    return Err(syntax("`perm` outside an `act` block"));
                }
                if tokens.len() != 4 {
                    return Err(syntax("expected `perm <id> <id> <coef>`"));
                }
                raw_perm.push((
                    line_no,
                    tokens[1].to_string(),
                    tokens[2].to_string(),
                    tokens[3].to_string(),
                ));
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }

    let field = field.unwrap_or(FieldSpec::Rationals);
    let mut boundary = Vec::new();
    for (line, id, terms) in raw_boundary {
        let terms = terms
            .into_iter()
            .map(|(c, g)| {
                field
                    .parse_scalar(&c)
                    .map(|s| (s, g))
                    .map_err(|e| ComplexError::Syntax {
                        line,
                        message: format!("bad coefficient `{c}`: {e}"),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        boundary.push((id, terms));
    }
    let complex = FilteredChainComplex::new(field, generators, boundary)?;
    let action = match action_order {
        None => None,
        Some(order) => {
            let perm = raw_perm
                .into_iter()
                .map(|(line, a, b, c)| {
                    field
                        .parse_scalar(&c)
                        .map(|s| (a, b, s))
                        .map_err(|e| ComplexError::Syntax {
                            line,
                            message: format!("bad sign `{c}`: {e}"),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(CyclicAction::new(&complex, order, &perm)?)
        }
    };
    Ok(ParsedComplex { complex, action })
}

/// The subcomplex spanned by generators fixed by the permutation.
pub fn fixed_subcomplex(
    c: &FilteredChainComplex,
    a: &CyclicAction,
) -> Result<FilteredChainComplex, ComplexError> {
    let fixed: Vec<usize> = (0..c.len()).filter(|&i| a.is_fixed(i)).collect();
    let mut offenders = Vec::new();
    let mut boundary = Vec::new();
    for &i in &fixed {
        let col = c.boundary_of(i);
        if let Some((bad, _)) = col.iter().find(|(r, _)| !a.is_fixed(*r)) {
            offenders.push(c.generators()[i].id.clone());
            offenders.push(c.generators()[*bad].id.clone());
            continue;
        }
        if !col.is_empty() {
            let terms = col
                .iter()
                .map(|(r, v)| (v.clone(), c.generators()[*r].id.clone()))
                .collect();
            boundary.push((c.generators()[i].id.clone(), terms));
        }
    }
    if !offenders.is_empty() {
        return Err(ComplexError::NotClosedUnderBoundary {
            generators: offenders,
        });
    }
    let generators = fixed.iter().map(|&i| c.generators()[i].clone()).collect();
    FilteredChainComplex::new(c.field(), generators, boundary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmithReport {
    pub dim_total: usize,
    pub dim_fixed: usize,
    pub holds: bool,
}

/// Total homology dimension: the number of infinite bars.
pub fn total_homology_dimension(c: &FilteredChainComplex) -> usize {
    compute_barcode(c)
        .bars()
        .iter()
        .filter(|b| b.death.is_infinite())
        .map(|b| b.multiplicity as usize)
        .sum()
}

/// `dim H_*(X; F_p) ≥ dim H_*(X^{Z/p}; F_p)` on a cellular model.
pub fn smith_dimension_check(
    c: &FilteredChainComplex,
    a: &CyclicAction,
) -> Result<SmithReport, ComplexError> {
    if c.field() != FieldSpec::Prime(a.order()) {
        return Err(ComplexError::WrongField {
            order: a.order(),
            found: c.field(),
        });
    }
    let fixed = fixed_subcomplex(c, a)?;
    let dim_total = total_homology_dimension(c);
    let dim_fixed = total_homology_dimension(&fixed);
    Ok(SmithReport {
        dim_total,
        dim_fixed,
        holds: dim_total >= dim_fixed,
    })
}
