//! Circuit synthesis from function tables.
//!
//! Over a finite carrier every function `S^m -> S^n` is computed by some
//! circuit once the comparator is available: match each possible input tuple
//! with a product of comparisons and sum the matched constants. This module
//! builds that encoding ([`synth_from_table`]), a comparator for prime
//! moduli written without the comparator generator ([`fermat_compare`]),
//! and the one-input spike that is `1` at zero ([`delta_circuit`]).

use crate::circuit::{Circuit, Generator};
use crate::error::{Error, Result};
use crate::eval::{count_tuples, tuple_at, FunctionTable, DEFAULT_BUDGET};
use crate::semiring::Semiring;

/// `k` block copies of an `m`-wire bundle, `m -> k*m`.
fn replicate(m: usize, k: usize) -> Circuit {
    if m == 0 {
        return Circuit::empty();
    }
    match k {
        0 => Circuit::discard_n(m),
        1 => Circuit::id(m),
        _ => {
            let left = k.div_ceil(2);
            let split = Circuit::tensor(&replicate(m, left), &replicate(m, k - left));
            Circuit::compose(&Circuit::copy_n(m), &split).expect("replication is well-shaped")
        }
    }
}

/// Balanced tree of additions, `k -> 1` (`k` must be at least 1).
fn sum_tree(k: usize) -> Circuit {
    match k {
        1 => Circuit::id(1),
        2 => Circuit::gen(Generator::Add),
        _ => {
            let left = k.div_ceil(2);
            let halves = Circuit::tensor(&sum_tree(left), &sum_tree(k - left));
            Circuit::compose(&halves, &Circuit::gen(Generator::Add))
                .expect("addition tree is well-shaped")
        }
    }
}

/// Balanced tree of multiplications, `k -> 1` (`k` must be at least 1).
fn prod_tree(k: usize) -> Circuit {
    match k {
        1 => Circuit::id(1),
        2 => Circuit::gen(Generator::Mul),
        _ => {
            let left = k.div_ceil(2);
            let halves = Circuit::tensor(&prod_tree(left), &prod_tree(k - left));
            Circuit::compose(&halves, &Circuit::gen(Generator::Mul))
                .expect("multiplication tree is well-shaped")
        }
    }
}

/// `1 -> 1` circuit testing the input against a fixed code: `x -> eq(s, x)`.
fn matches_const(s: u64) -> Circuit {
    Circuit::seq_list([
        Circuit::tensor(&Circuit::gen(Generator::Const(s)), &Circuit::id(1)),
        Circuit::gen(Generator::Compare),
    ])
    .expect("constant comparison is well-shaped")
}

/// Compile a complete function table into a circuit with the table's shape.
///
/// Each output is a sum over all input tuples `s` of the indicator
/// "the input equals `s`" (a product of componentwise comparisons) times the
/// tabled output constant, so the result evaluates exactly to the table.
/// Uses the default evaluation budget; see [`synth_from_table_with_budget`].
pub fn synth_from_table(desc: &Semiring, t: &FunctionTable) -> Result<Circuit> {
    synth_from_table_with_budget(desc, t, DEFAULT_BUDGET)
}

/// [`synth_from_table`] with an explicit bound on the table size.
pub fn synth_from_table_with_budget(
    desc: &Semiring,
    t: &FunctionTable,
    budget: u64,
) -> Result<Circuit> {
    let size = desc.finite_size()?;
    if t.carrier_size != size {
        return Err(Error::IncompleteTable(format!(
            "table carrier size {} does not match semiring `{}`",
            t.carrier_size,
            desc.id()
        )));
    }
    let needed = count_tuples(size, t.arity).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if t.rows.len() as u128 != needed {
        return Err(Error::IncompleteTable(format!(
            "expected {needed} rows, found {}",
            t.rows.len()
        )));
    }
    for (rank, row) in t.rows.iter().enumerate() {
        if row.len() != t.coarity {
            return Err(Error::IncompleteTable(format!(
                "row {rank} has {} outputs, expected {}",
                row.len(),
                t.coarity
            )));
        }
        for &code in row {
            desc.check_value(code)?;
        }
    }
    if t.arity == 0 {
        return Ok(Circuit::const_tuple(&t.rows[0]));
    }
    let rows = t.rows.len();
    let outputs = (0..t.coarity).map(|j| {
        let terms = (0..rows).map(|rank| {
            let input = tuple_at(size, t.arity, rank as u128);
            let row_match = Circuit::tensor_list(input.iter().map(|&s| matches_const(s)));
            Circuit::seq_list([
                row_match,
                prod_tree(t.arity),
                Circuit::tensor(&Circuit::id(1), &Circuit::gen(Generator::Const(t.rows[rank][j]))),
                Circuit::gen(Generator::Mul),
            ])
            .expect("table summand is well-shaped")
        });
        Circuit::seq_list([replicate(t.arity, rows), Circuit::tensor_list(terms), sum_tree(rows)])
            .expect("table output is well-shaped")
    });
    Circuit::seq_list([replicate(t.arity, t.coarity), Circuit::tensor_list(outputs)])
}

/// `1 -> 1` circuit computing `x^e` for `e >= 1`, built by repeated squaring.
fn power(e: u64) -> Circuit {
    if e == 1 {
        return Circuit::id(1);
    }
    if e.is_multiple_of(2) {
        let square = Circuit::compose(&Circuit::gen(Generator::Copy), &Circuit::gen(Generator::Mul))
            .expect("squaring is well-shaped");
        return Circuit::compose(&power(e / 2), &square).expect("powering is well-shaped");
    }
    Circuit::seq_list([
        Circuit::gen(Generator::Copy),
        Circuit::tensor(&power(e - 1), &Circuit::id(1)),
        Circuit::gen(Generator::Mul),
    ])
    .expect("powering is well-shaped")
}

/// The spike `(p-1)*x^(p-1) + 1`, which is `1` at zero and `0` elsewhere
/// modulo a prime `p`.
fn fermat_delta(p: u64) -> Circuit {
    Circuit::seq_list([
        power(p - 1),
        Circuit::tensor(&Circuit::gen(Generator::Const(p - 1)), &Circuit::id(1)),
        Circuit::gen(Generator::Mul),
        Circuit::tensor(&Circuit::id(1), &Circuit::gen(Generator::One)),
        Circuit::gen(Generator::Add),
    ])
    .expect("spike is well-shaped")
}

/// A `2 -> 1` comparator over the integers modulo a prime `p`, built without
/// the comparator generator.
///
/// By the little-Fermat identity `x^(p-1)` is `1` exactly on the nonzero
/// codes, so `d(x) = (p-1)*x^(p-1) + 1` spikes at zero, and
/// `sum over s of d(x1+s)*d(x2+s)` is `1` exactly when the inputs agree.
/// Errors with [`Error::NotPrime`] when `p` is not prime.
pub fn fermat_compare(p: u64) -> Result<Circuit> {
    Semiring::parse(&format!("zp:{p}"))?;
    let shifted_spike = |s: u64| {
        Circuit::seq_list([
            Circuit::tensor(&Circuit::id(1), &Circuit::gen(Generator::Const(s))),
            Circuit::gen(Generator::Add),
            fermat_delta(p),
        ])
        .expect("shifted spike is well-shaped")
    };
    let blocks = (0..p).map(|s| {
        Circuit::seq_list([
            Circuit::tensor(&shifted_spike(s), &shifted_spike(s)),
            Circuit::gen(Generator::Mul),
        ])
        .expect("comparator block is well-shaped")
    });
    Circuit::seq_list([
        replicate(2, p as usize),
        Circuit::tensor_list(blocks),
        sum_tree(p as usize),
    ])
}

/// The `1 -> 1` spike testing for zero: the comparator with one input capped
/// by the zero constant, so it evaluates to `1` at `0` and `0` elsewhere.
pub fn delta_circuit() -> Circuit {
    Circuit::seq_list([
        Circuit::tensor(&Circuit::gen(Generator::Zero), &Circuit::id(1)),
        Circuit::gen(Generator::Compare),
    ])
    .expect("spike is well-shaped")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Node;
    use crate::eval::{eval, extensionally_equal, function_table};
    use crate::rdiff::reverse;

    fn s(id: &str) -> Semiring {
        id.parse().unwrap()
    }

    fn table(desc: &Semiring, arity: usize, rows: Vec<Vec<u64>>) -> FunctionTable {
        FunctionTable {
            semiring: desc.id().to_string(),
            carrier_size: desc.size().unwrap(),
            arity,
            coarity: rows[0].len(),
            rows,
        }
    }

    fn uses_compare(c: &Circuit) -> bool {
        let mut stack = vec![c.clone()];
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Gen(Generator::Compare) => return true,
                Node::Gen(_) => {}
                Node::Seq(f, g) | Node::Par(f, g) => {
                    stack.push(f.clone());
                    stack.push(g.clone());
                }
            }
        }
        false
    }

    #[test]
    fn xor_synthesizes_to_addition() {
        let d = s("zmod:2");
        let t = table(&d, 2, vec![vec![0], vec![1], vec![1], vec![0]]);
        let c = synth_from_table(&d, &t).unwrap();
        let eq = extensionally_equal(&d, &c, &Circuit::gen(Generator::Add)).unwrap();
        assert!(eq.is_equal());
    }

    #[test]
    fn every_two_input_boolean_function_synthesizes() {
        let d = s("zmod:2");
        for bits in 0u8..16 {
            let rows = (0..4).map(|r| vec![u64::from(bits >> r) & 1]).collect();
            let t = table(&d, 2, rows);
            let c = synth_from_table(&d, &t).unwrap();
            assert_eq!(function_table(&d, &c).unwrap(), t, "function {bits:#06b}");
        }
    }

    #[test]
    fn successor_table_round_trips() {
        let d = s("zmod:3");
        let t = table(&d, 1, vec![vec![1], vec![2], vec![0]]);
        let c = synth_from_table(&d, &t).unwrap();
        assert_eq!(function_table(&d, &c).unwrap(), t);
    }

    #[test]
    fn multi_output_tables_synthesize() {
        let d = s("zmod:3");
        // (x, y) -> (x*y, x+y) tabulated by hand.
        let pairs = Circuit::seq_list([
            Circuit::copy_n(2),
            Circuit::tensor(&Circuit::gen(Generator::Mul), &Circuit::gen(Generator::Add)),
        ])
        .unwrap();
        let t = function_table(&d, &pairs).unwrap();
        let c = synth_from_table(&d, &t).unwrap();
        assert!(extensionally_equal(&d, &c, &pairs).unwrap().is_equal());
    }

    #[test]
    fn zero_input_tables_become_constant_tuples() {
        let d = s("zmod:5");
        let t = table(&d, 0, vec![vec![3, 0]]);
        let c = synth_from_table(&d, &t).unwrap();
        assert_eq!((c.arity(), c.coarity()), (0, 2));
        assert_eq!(eval(&d, &c, &[]).unwrap(), vec![3, 0]);
    }

    #[test]
    fn bad_tables_are_rejected() {
        let d = s("zmod:2");
        let short = table(&d, 2, vec![vec![0], vec![1]]);
        assert!(matches!(
            synth_from_table(&d, &short),
            Err(Error::IncompleteTable(_))
        ));

        let t = table(&d, 2, vec![vec![0], vec![1], vec![1], vec![0]]);
        assert!(matches!(
            synth_from_table_with_budget(&d, &t, 3),
            Err(Error::BudgetExceeded { needed: 4, budget: 3 })
        ));
        assert!(matches!(
            synth_from_table(&s("zmod:3"), &t),
            Err(Error::IncompleteTable(_))
        ));
        assert!(matches!(
            synth_from_table(&s("nat"), &t),
            Err(Error::InfiniteCarrier)
        ));
    }

    #[test]
    fn synthesized_circuits_differentiate_cleanly() {
        let d = s("zmod:3");
        let t = table(&d, 1, vec![vec![1], vec![2], vec![0]]);
        let c = synth_from_table(&d, &t).unwrap();
        let report = crate::verify::check_rdc_axioms(&d, &c).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn fermat_spike_hits_only_zero() {
        let d = s("zp:3");
        for (a, want) in [(0, 1), (1, 0), (2, 0)] {
            assert_eq!(eval(&d, &fermat_delta(3), &[a]).unwrap(), vec![want]);
        }
    }

    #[test]
    fn fermat_compare_matches_the_comparator() {
        for p in [2u64, 3, 5] {
            let d = s(&format!("zp:{p}"));
            let c = fermat_compare(p).unwrap();
            assert!(!uses_compare(&c), "p = {p}");
            let eq = extensionally_equal(&d, &c, &Circuit::gen(Generator::Compare)).unwrap();
            assert!(eq.is_equal(), "p = {p}");
        }
    }

    #[test]
    fn fermat_compare_over_two_is_xnor() {
        let d = s("zp:2");
        let xnor = Circuit::seq_list([
            Circuit::gen(Generator::Add),
            Circuit::tensor(&Circuit::id(1), &Circuit::gen(Generator::One)),
            Circuit::gen(Generator::Add),
        ])
        .unwrap();
        let eq = extensionally_equal(&d, &fermat_compare(2).unwrap(), &xnor).unwrap();
        assert!(eq.is_equal());
    }

    #[test]
    fn composite_moduli_are_rejected() {
        assert!(matches!(fermat_compare(4), Err(Error::NotPrime(4))));
        assert!(matches!(fermat_compare(1), Err(Error::NotPrime(1))));
    }

    #[test]
    fn delta_spikes_at_zero() {
        let d = s("zmod:5");
        assert_eq!(eval(&d, &delta_circuit(), &[0]).unwrap(), vec![1]);
        assert_eq!(eval(&d, &delta_circuit(), &[3]).unwrap(), vec![0]);
    }

    #[test]
    fn delta_differentiates_like_the_identity() {
        let d = s("zmod:5");
        let straight_through = reverse(&Circuit::gen(Generator::Identity));
        let eq = extensionally_equal(&d, &reverse(&delta_circuit()), &straight_through).unwrap();
        assert!(eq.is_equal());
    }
}
