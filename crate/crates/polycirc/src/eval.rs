//! Concrete evaluation over a semiring, plus whole-function views.
//!
//! [`eval`] runs one input tuple through a circuit. [`function_table`]
//! enumerates a finite input space in lexicographic code order (subject to a
//! row budget), and [`extensionally_equal`] decides pointwise equality of two
//! circuits the same way, reporting the least counterexample.

use crate::circuit::{Circuit, Generator};
use crate::error::{Error, Result};
use crate::interp::{pop1, pop2, run, GenInterp};
use crate::semiring::Semiring;

/// Default ceiling on enumerated rows/cases for table-like operations.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

struct ConcreteEval<'a> {
    desc: &'a Semiring,
}

impl GenInterp for ConcreteEval<'_> {
    type Val = u64;

    fn apply(&mut self, g: Generator, vals: &mut Vec<u64>) -> Result<()> {
        match g {
            Generator::Add => {
                let (a, b) = pop2(vals);
                vals.push(self.desc.add(a, b)?);
            }
            Generator::Mul => {
                let (a, b) = pop2(vals);
                vals.push(self.desc.mul(a, b)?);
            }
            Generator::Zero => vals.push(self.desc.zero()),
            Generator::One => vals.push(self.desc.one()),
            Generator::Const(v) => {
                self.desc.check_value(v)?;
                vals.push(v);
            }
            Generator::Copy => {
                let a = pop1(vals);
                vals.push(a);
                vals.push(a);
            }
            Generator::Discard => {
                pop1(vals);
            }
            Generator::Identity => {}
            Generator::Twist => {
                let (a, b) = pop2(vals);
                vals.push(b);
                vals.push(a);
            }
            Generator::Compare => {
                let (a, b) = pop2(vals);
                vals.push(if a == b { self.desc.one() } else { self.desc.zero() });
            }
            Generator::Negate => {
                let a = pop1(vals);
                vals.push(self.desc.neg(a)?);
            }
        }
        Ok(())
    }
}

/// Evaluates `c` on one input tuple of carrier codes.
pub fn eval(desc: &Semiring, c: &Circuit, input: &[u64]) -> Result<Vec<u64>> {
    for &v in input {
        desc.check_value(v)?;
    }
    run(&mut ConcreteEval { desc }, c, input.to_vec())
}

// ---- tuple enumeration ----------------------------------------------------

/// `size^len` as a case count, or `None` on overflow.
pub fn count_tuples(size: u64, len: usize) -> Option<u128> {
    let mut out: u128 = 1;
    for _ in 0..len {
        out = out.checked_mul(size as u128)?;
    }
    Some(out)
}

/// In-place lexicographic odometer over `{0..size-1}^len`.
///
/// `advance` steps to the successor tuple and reports whether one exists;
/// starting from all zeros this visits the whole space in lexicographic
/// order (leftmost coordinate most significant).
pub(crate) struct Odometer {
    pub tuple: Vec<u64>,
    size: u64,
}

impl Odometer {
    pub fn new(size: u64, len: usize) -> Odometer {
        Odometer { tuple: vec![0; len], size }
    }

    pub fn advance(&mut self) -> bool {
        for i in (0..self.tuple.len()).rev() {
            self.tuple[i] += 1;
            if self.tuple[i] < self.size {
                return true;
            }
            self.tuple[i] = 0;
        }
        false
    }
}

/// All tuples of `{0..size-1}^len` in lexicographic order.
pub fn tuples(size: u64, len: usize) -> impl Iterator<Item = Vec<u64>> {
    let mut odo = Some(Odometer::new(size, len));
    std::iter::from_fn(move || {
        let o = odo.as_mut()?;
        let item = o.tuple.clone();
        if !o.advance() {
            odo = None;
        }
        Some(item)
    })
}

/// Lexicographic rank of `tuple` within `{0..size-1}^len`.
pub fn lex_rank(size: u64, tuple: &[u64]) -> u128 {
    let mut rank: u128 = 0;
    for &v in tuple {
        rank = rank * size as u128 + v as u128;
    }
    rank
}

/// Inverse of [`lex_rank`].
pub fn tuple_at(size: u64, len: usize, rank: u128) -> Vec<u64> {
    let mut out = vec![0u64; len];
    let mut r = rank;
    for i in (0..len).rev() {
        out[i] = (r % size as u128) as u64;
        r /= size as u128;
    }
    out
}

// ---- function tables -------------------------------------------------------

/// The full graph of a circuit over a finite carrier: one output tuple per
/// input tuple, stored in lexicographic input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    pub semiring: String,
    pub carrier_size: u64,
    pub arity: usize,
    pub coarity: usize,
    /// `rows[lex_rank(input)]` is the output tuple for `input`.
    pub rows: Vec<Vec<u64>>,
}

impl FunctionTable {
    /// The input tuple of row `rank`.
    pub fn input_at(&self, rank: usize) -> Vec<u64> {
        tuple_at(self.carrier_size, self.arity, rank as u128)
    }

    pub fn output_for(&self, input: &[u64]) -> &[u64] {
        &self.rows[lex_rank(self.carrier_size, input) as usize]
    }

    /// CSV with header `x0,..,x{m-1},y0,..,y{n-1}`, decimal codes, rows in
    /// lexicographic input order.
    pub fn to_csv(&self) -> Result<String> {
        if self.arity == 0 && self.coarity == 0 {
            return Err(Error::IncompleteTable(
                "a 0->0 table has no columns to write".into(),
            ));
        }
        let mut out = String::new();
        let header: Vec<String> = (0..self.arity)
            .map(|i| format!("x{i}"))
            .chain((0..self.coarity).map(|j| format!("y{j}")))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (rank, outputs) in self.rows.iter().enumerate() {
            let cells: Vec<String> = self
                .input_at(rank)
                .iter()
                .chain(outputs.iter())
                .map(|v| v.to_string())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    /// Parses and validates a CSV table: header names must be exactly
    /// `x0..,y0..`, every code must lie in the carrier, and the rows must
    /// enumerate the whole input space in lexicographic order.
    pub fn from_csv(desc: &Semiring, text: &str) -> Result<FunctionTable> {
        let size = desc.finite_size()?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::IncompleteTable("empty file".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let arity = cols.iter().take_while(|c| c.starts_with('x')).count();
        let coarity = cols.len() - arity;
        for (i, c) in cols.iter().enumerate() {
            let expected = if i < arity {
                format!("x{i}")
            } else {
                format!("y{}", i - arity)
            };
            if *c != expected {
                return Err(Error::IncompleteTable(format!(
                    "header column {} is `{c}`, expected `{expected}`",
                    i + 1
                )));
            }
        }
        let expected_rows = count_tuples(size, arity)
            .filter(|&n| n <= usize::MAX as u128)
            .ok_or_else(|| Error::IncompleteTable("input space too large".into()))?;
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != arity + coarity {
                return Err(Error::IncompleteTable(format!(
                    "row {} has {} cells, expected {}",
                    lineno + 1,
                    cells.len(),
                    arity + coarity
                )));
            }
            let parse = |cell: &str| -> Result<u64> {
                let v: u64 = cell.parse().map_err(|_| {
                    Error::IncompleteTable(format!("row {}: `{cell}` is not a code", lineno + 1))
                })?;
                desc.check_value(v)?;
                Ok(v)
            };
            let input: Vec<u64> = cells[..arity]
                .iter()
                .map(|c| parse(c))
                .collect::<Result<_>>()?;
            let output: Vec<u64> = cells[arity..]
                .iter()
                .map(|c| parse(c))
                .collect::<Result<_>>()?;
            let expected_input = tuple_at(size, arity, rows.len() as u128);
            if input != expected_input {
                return Err(Error::IncompleteTable(format!(
                    "row {} lists input {input:?}, expected {expected_input:?} \
                     (rows must cover the input space in lexicographic order)",
                    lineno + 1
                )));
            }
            rows.push(output);
        }
        if (rows.len() as u128) != expected_rows {
            return Err(Error::IncompleteTable(format!(
                "{} rows, expected {expected_rows}",
                rows.len()
            )));
        }
        Ok(FunctionTable {
            semiring: desc.id().to_string(),
            carrier_size: size,
            arity,
            coarity,
            rows,
        })
    }
}

/// Tabulates `c` over the whole input space (finite carriers only), with the
/// default row budget.
pub fn function_table(desc: &Semiring, c: &Circuit) -> Result<FunctionTable> {
    function_table_with_budget(desc, c, DEFAULT_BUDGET)
}

pub fn function_table_with_budget(
    desc: &Semiring,
    c: &Circuit,
    budget: u64,
) -> Result<FunctionTable> {
    let size = desc.finite_size()?;
    let needed = count_tuples(size, c.arity()).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut rows = Vec::with_capacity(needed as usize);
    let mut odo = Odometer::new(size, c.arity());
    loop {
        rows.push(eval(desc, c, &odo.tuple)?);
        if !odo.advance() {
            break;
        }
    }
    Ok(FunctionTable {
        semiring: desc.id().to_string(),
        carrier_size: size,
        arity: c.arity(),
        coarity: c.coarity(),
        rows,
    })
}

/// Result of an extensional comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// The lexicographically least input where the two circuits disagree.
    Differs {
        input: Vec<u64>,
        left: Vec<u64>,
        right: Vec<u64>,
    },
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }
}

/// Pointwise equality of two same-shaped circuits over a finite carrier,
/// with the default case budget.
pub fn extensionally_equal(desc: &Semiring, c1: &Circuit, c2: &Circuit) -> Result<Equivalence> {
    extensionally_equal_with_budget(desc, c1, c2, DEFAULT_BUDGET)
}

pub fn extensionally_equal_with_budget(
    desc: &Semiring,
    c1: &Circuit,
    c2: &Circuit,
    budget: u64,
) -> Result<Equivalence> {
    if c1.shape() != c2.shape() {
        return Err(Error::ShapeMismatch {
            left: c1.shape(),
            right: c2.shape(),
            context: "extensional equality".into(),
        });
    }
    let size = desc.finite_size()?;
    let needed = count_tuples(size, c1.arity()).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut odo = Odometer::new(size, c1.arity());
    loop {
        let left = eval(desc, c1, &odo.tuple)?;
        let right = eval(desc, c2, &odo.tuple)?;
        if left != right {
            return Ok(Equivalence::Differs { input: odo.tuple.clone(), left, right });
        }
        if !odo.advance() {
            break;
        }
    }
    Ok(Equivalence::Equal)
}
