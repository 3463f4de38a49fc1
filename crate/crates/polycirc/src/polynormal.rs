//! Polynomial normal forms for compare-free circuits.
//!
//! Every circuit built without the comparison generator denotes a tuple of
//! multivariate polynomials over the active semiring. This module computes
//! that normal form by evaluating the circuit with polynomials as the value
//! domain, and builds on it:
//!
//! * formal partial derivatives ([`formal_partial`]),
//! * the Jacobian-transpose action ([`jt_apply`], [`JacobianTranspose`]),
//!   which serves as an independent oracle for the reverse-derivative
//!   transformation,
//! * formal equality of normal forms ([`poly_equal`]).
//!
//! Exponents are formal: nothing here reduces `x²` to `x` over `zmod:2`, so
//! formal equality is sound but not complete for extensional equality over a
//! finite carrier. Over `nat` the polynomial semantics is faithful and
//! [`poly_equal`] does decide extensional equality. Coefficients, on the
//! other hand, always live in the carrier and fold with its arithmetic: the
//! normal form of `const(2) * const(2) ; add` over `zmod:3` is the constant
//! polynomial `1`.

use std::collections::BTreeMap;
use std::fmt;

use crate::circuit::{Circuit, Generator, Shape};
use crate::error::{Error, Result};
use crate::eval::DEFAULT_BUDGET;
use crate::interp::{pop1, pop2, run, GenInterp};
use crate::semiring::Semiring;

/// A monomial as a vector of formal exponents, one per input variable.
///
/// Ordered graded-lexicographically: first by total degree, then by the
/// exponent vector, so `x0²` > `x0·x1` > `x1²` > `x0` > ... > `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exponents: Vec<u64>,
}

impl Monomial {
    pub fn new(exponents: Vec<u64>) -> Monomial {
        Monomial { exponents }
    }

    /// The monomial `1` in `arity` variables.
    pub fn one(arity: usize) -> Monomial {
        Monomial { exponents: vec![0; arity] }
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn degree(&self) -> u64 {
        self.exponents.iter().sum()
    }

    /// Product of two monomials (exponents add).
    fn times(&self, other: &Monomial) -> Result<Monomial> {
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow { op: "exponent" }))
            .collect::<Result<_>>()?;
        Ok(Monomial { exponents })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exponents.cmp(&other.exponents))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in normal form: a map from monomials to nonzero coefficient
/// codes, over a fixed number of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    arity: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl Polynomial {
    pub fn zero(arity: usize) -> Polynomial {
        Polynomial { arity, terms: BTreeMap::new() }
    }

    pub fn constant(desc: &Semiring, code: u64, arity: usize) -> Result<Polynomial> {
        desc.check_value(code)?;
        let mut p = Polynomial::zero(arity);
        if code != desc.zero() {
            p.terms.insert(Monomial::one(arity), code);
        }
        Ok(p)
    }

    /// The variable `x_i`.
    pub fn var(arity: usize, i: usize) -> Result<Polynomial> {
        if i >= arity {
            return Err(Error::IndexOutOfRange { index: i, arity });
        }
        let mut exponents = vec![0; arity];
        exponents[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial { exponents }, 1);
        Ok(Polynomial { arity, terms })
    }

    /// Build a polynomial from raw `(exponents, coefficient)` pairs,
    /// validating lengths and codes and folding duplicate monomials.
    pub fn from_terms(
        desc: &Semiring,
        arity: usize,
        terms: &[(Vec<u64>, u64)],
    ) -> Result<Polynomial> {
        let mut p = Polynomial::zero(arity);
        for (exponents, coeff) in terms {
            if exponents.len() != arity {
                return Err(Error::Invalid(format!(
                    "monomial with {} exponents in a polynomial over {} variables",
                    exponents.len(),
                    arity
                )));
            }
            desc.check_value(*coeff)?;
            p.add_term(desc, Monomial::new(exponents.clone()), *coeff)?;
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Add `coeff · m` in place, pruning the term if the sum cancels.
    fn add_term(&mut self, desc: &Semiring, m: Monomial, coeff: u64) -> Result<()> {
        if coeff == desc.zero() {
            return Ok(());
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                let sum = desc.add(*c, coeff)?;
                if sum == desc.zero() {
                    self.terms.remove(&m);
                } else {
                    *c = sum;
                }
            }
            None => {
                self.terms.insert(m, coeff);
            }
        }
        Ok(())
    }

    fn check_same_arity(&self, other: &Polynomial, what: &str) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::Invalid(format!(
                "{what} of polynomials over {} and {} variables",
                self.arity, other.arity
            )));
        }
        Ok(())
    }

    pub fn add(&self, desc: &Semiring, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_arity(other, "sum")?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(desc, m.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn mul(&self, desc: &Semiring, other: &Polynomial) -> Result<Polynomial> {
        self.mul_bounded(desc, other, u64::MAX)
    }

    /// Multiplication with a cap on intermediate term counts. The cap guards
    /// the accumulating product, so a result whose final normal form is small
    /// can still trip it if an intermediate sum is wide.
    pub(crate) fn mul_bounded(
        &self,
        desc: &Semiring,
        other: &Polynomial,
        budget: u64,
    ) -> Result<Polynomial> {
        self.check_same_arity(other, "product")?;
        let mut out = Polynomial::zero(self.arity);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let coeff = desc.mul(*c1, *c2)?;
                out.add_term(desc, m1.times(m2)?, coeff)?;
                if out.terms.len() as u64 > budget {
                    return Err(Error::BudgetExceeded {
                        needed: out.terms.len() as u128,
                        budget,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Multiply every coefficient by `code`.
    fn scale(&self, desc: &Semiring, code: u64) -> Result<Polynomial> {
        let mut out = Polynomial::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(desc, m.clone(), desc.mul(*c, code)?)?;
        }
        Ok(out)
    }

    /// Evaluate at a point of the carrier.
    pub fn eval(&self, desc: &Semiring, x: &[u64]) -> Result<u64> {
        if x.len() != self.arity {
            return Err(Error::ShapeMismatch {
                left: Shape::new(0, x.len()),
                right: Shape::new(0, self.arity),
                context: "polynomial evaluation".into(),
            });
        }
        for &v in x {
            desc.check_value(v)?;
        }
        let mut acc = desc.zero();
        for (m, c) in &self.terms {
            let mut term = *c;
            for (xi, ei) in x.iter().zip(&m.exponents) {
                if *ei > 0 {
                    term = desc.mul(term, desc.pow(*xi, *ei)?)?;
                }
            }
            acc = desc.add(acc, term)?;
        }
        Ok(acc)
    }
}

/// A tuple of polynomials sharing one variable set: the normal form of an
/// `m → n` circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    arity: usize,
    polys: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(arity: usize, polys: Vec<Polynomial>) -> Result<PolyMap> {
        for p in &polys {
            if p.arity != arity {
                return Err(Error::Invalid(format!(
                    "polynomial over {} variables in a map over {}",
                    p.arity, arity
                )));
            }
        }
        Ok(PolyMap { arity, polys })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coarity(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Evaluate all component polynomials at a point.
    pub fn eval(&self, desc: &Semiring, x: &[u64]) -> Result<Vec<u64>> {
        self.polys.iter().map(|p| p.eval(desc, x)).collect()
    }
}

/// Polynomial-valued generator semantics; `budget` caps term counts. All
/// wire values are polynomials in the enclosing circuit's `arity` input
/// variables, which nullary generators need to mint constants of the right
/// variable count (the value stack may be empty when they fire).
struct PolyLift<'a> {
    desc: &'a Semiring,
    budget: u64,
    arity: usize,
}

impl<'a> GenInterp for PolyLift<'a> {
    type Val = Polynomial;

    fn apply(&mut self, g: Generator, vals: &mut Vec<Polynomial>) -> Result<()> {
        let desc = self.desc;
        match g {
            Generator::Add => {
                let (a, b) = pop2(vals);
                let sum = a.add(desc, &b)?;
                if sum.terms.len() as u64 > self.budget {
                    return Err(Error::BudgetExceeded {
                        needed: sum.terms.len() as u128,
                        budget: self.budget,
                    });
                }
                vals.push(sum);
            }
            Generator::Mul => {
                let (a, b) = pop2(vals);
                vals.push(a.mul_bounded(desc, &b, self.budget)?);
            }
            Generator::Zero => vals.push(Polynomial::zero(self.arity)),
            Generator::One => vals.push(Polynomial::constant(desc, desc.one(), self.arity)?),
            Generator::Const(s) => vals.push(Polynomial::constant(desc, s, self.arity)?),
            Generator::Copy => {
                let a = pop1(vals);
                vals.push(a.clone());
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
                return Err(Error::NonPolynomialGenerator("eq".into()));
            }
            Generator::Negate => {
                let a = pop1(vals);
                // neg(p) = (-1)·p; the semiring reports the availability of
                // negation and the code of -1.
                let minus_one = desc.neg(desc.one())?;
                vals.push(a.scale(desc, minus_one)?);
            }
        }
        Ok(())
    }
}

/// Normal form of a compare-free circuit, with the default term budget.
pub fn to_poly(desc: &Semiring, c: &Circuit) -> Result<PolyMap> {
    to_poly_with_budget(desc, c, DEFAULT_BUDGET)
}

/// Normal form with an explicit cap on per-polynomial term counts.
pub fn to_poly_with_budget(desc: &Semiring, c: &Circuit, budget: u64) -> Result<PolyMap> {
    let m = c.arity();
    let vars: Vec<Polynomial> =
        (0..m).map(|i| Polynomial::var(m, i)).collect::<Result<_>>()?;
    let mut lift = PolyLift { desc, budget, arity: m };
    let polys = run(&mut lift, c, vars)?;
    PolyMap::new(m, polys)
}

/// Formal partial derivative with respect to `x_i`: `c·x^e` maps to
/// `(e_i summed copies of c)·x^(e - 1_i)`, dropping terms where `x_i` is
/// absent or the natural multiple vanishes.
pub fn formal_partial(desc: &Semiring, p: &Polynomial, i: usize) -> Result<Polynomial> {
    if i >= p.arity {
        return Err(Error::IndexOutOfRange { index: i, arity: p.arity });
    }
    let mut out = Polynomial::zero(p.arity);
    for (m, c) in &p.terms {
        let e = m.exponents[i];
        if e == 0 {
            continue;
        }
        let coeff = desc.natural_multiple(e, *c)?;
        let mut exponents = m.exponents.clone();
        exponents[i] = e - 1;
        out.add_term(desc, Monomial { exponents }, coeff)?;
    }
    Ok(out)
}

/// The Jacobian transpose of a polynomial map, with all partial derivatives
/// precomputed: row `i` holds `∂p_j/∂x_i` for each output `j`.
pub struct JacobianTranspose {
    arity: usize,
    coarity: usize,
    partials: Vec<Vec<Polynomial>>,
}

impl JacobianTranspose {
    pub fn new(desc: &Semiring, pm: &PolyMap) -> Result<JacobianTranspose> {
        let partials = (0..pm.arity)
            .map(|i| pm.polys.iter().map(|p| formal_partial(desc, p, i)).collect())
            .collect::<Result<_>>()?;
        Ok(JacobianTranspose { arity: pm.arity, coarity: pm.polys.len(), partials })
    }

    /// `result_i = Σ_j δ_j · (∂p_j/∂x_i)(x)`.
    pub fn apply(&self, desc: &Semiring, x: &[u64], delta: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.arity || delta.len() != self.coarity {
            return Err(Error::ShapeMismatch {
                left: Shape::new(x.len(), delta.len()),
                right: Shape::new(self.arity, self.coarity),
                context: "Jacobian-transpose application".into(),
            });
        }
        let mut out = Vec::with_capacity(self.arity);
        for row in &self.partials {
            let mut acc = desc.zero();
            for (dp, &dj) in row.iter().zip(delta) {
                acc = desc.add(acc, desc.mul(dj, dp.eval(desc, x)?)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

/// One-shot Jacobian-transpose action `Σ_j δ_j·(∂p_j/∂x_i)(x)`; precompute a
/// [`JacobianTranspose`] instead when applying the same map many times.
pub fn jt_apply(desc: &Semiring, pm: &PolyMap, x: &[u64], delta: &[u64]) -> Result<Vec<u64>> {
    JacobianTranspose::new(desc, pm)?.apply(desc, x, delta)
}

/// Formal (coefficient-wise) equality of normal forms. Over a finite carrier
/// this is sound but not complete for extensional equality — `x²` and `x`
/// differ formally over `zmod:2` yet agree as functions; over `nat` the two
/// notions coincide.
pub fn poly_equal(pm1: &PolyMap, pm2: &PolyMap) -> Result<bool> {
    if pm1.arity != pm2.arity || pm1.polys.len() != pm2.polys.len() {
        return Err(Error::ShapeMismatch {
            left: Shape::new(pm1.arity, pm1.polys.len()),
            right: Shape::new(pm2.arity, pm2.polys.len()),
            context: "polynomial-map comparison".into(),
        });
    }
    Ok(pm1.polys == pm2.polys)
}

impl fmt::Display for Polynomial {
    /// Terms in descending graded-lex order: `3·x0^2 + x0·x1 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let constant_term = m.degree() == 0;
            if *c != 1 || constant_term {
                write!(f, "{c}")?;
            }
            let mut first = *c == 1 && !constant_term;
            for (j, e) in m.exponents.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "·")?;
                }
                first = false;
                write!(f, "x{j}")?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for PolyMap {
    /// One `y_j = ...` line per output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, p) in self.polys.iter().enumerate() {
            writeln!(f, "y{j} = {p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Generator as G;
    use crate::dsl::parse_expr;
    use crate::eval::{eval, extensionally_equal};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(id: &str) -> Semiring {
        id.parse().unwrap()
    }

    fn np(desc: &Semiring, text: &str) -> PolyMap {
        to_poly(desc, &parse_expr(desc, text).unwrap()).unwrap()
    }

    #[test]
    fn squaring_normalizes_to_a_square() {
        let d = s("zmod:2");
        let pm = np(&d, "copy ; mul");
        assert_eq!(pm.arity(), 1);
        assert_eq!(pm.coarity(), 1);
        let want = Polynomial::from_terms(&d, 1, &[(vec![2], 1)]).unwrap();
        assert_eq!(pm.polys()[0], want);
        assert_eq!(pm.to_string(), "y0 = x0^2\n");
    }

    #[test]
    fn constants_fold_in_the_carrier() {
        let d = s("zmod:3");
        let pm = np(&d, "const(2) * const(2) ; add");
        let want = Polynomial::constant(&d, 1, 0).unwrap();
        assert_eq!(pm.polys()[0], want);
        assert_eq!(pm.to_string(), "y0 = 1\n");
        // 1 + 2 = 0 in Z₃: the zero polynomial stores no terms.
        let pm = np(&d, "one * const(2) ; add");
        assert!(pm.polys()[0].is_zero());
        assert_eq!(pm.to_string(), "y0 = 0\n");
    }

    #[test]
    fn compare_has_no_normal_form() {
        let d = s("zmod:2");
        let err = to_poly(&d, &Circuit::gen(G::Compare)).unwrap_err();
        assert_eq!(err, Error::NonPolynomialGenerator("eq".into()));
    }

    #[test]
    fn negate_becomes_the_minus_one_coefficient() {
        let d = s("zmod:3");
        let pm = np(&d, "neg");
        let want = Polynomial::from_terms(&d, 1, &[(vec![1], 2)]).unwrap();
        assert_eq!(pm.polys()[0], want);
        assert!(matches!(
            to_poly(&s("sat:3"), &Circuit::gen(G::Negate)),
            Err(Error::UnsupportedGenerator { .. })
        ));
    }

    #[test]
    fn formal_partials_match_hand_derivatives() {
        let d2 = s("zmod:2");
        let square = np(&d2, "copy ; mul").polys()[0].clone();
        // ∂(x²)/∂x = 2x = 0 over Z₂.
        assert!(formal_partial(&d2, &square, 0).unwrap().is_zero());

        let d5 = s("zmod:5");
        let square5 = np(&d5, "copy ; mul").polys()[0].clone();
        let want = Polynomial::from_terms(&d5, 1, &[(vec![1], 2)]).unwrap();
        assert_eq!(formal_partial(&d5, &square5, 0).unwrap(), want);

        let product = np(&d5, "mul").polys()[0].clone();
        let x1 = Polynomial::var(2, 1).unwrap();
        let x0 = Polynomial::var(2, 0).unwrap();
        assert_eq!(formal_partial(&d5, &product, 0).unwrap(), x1);
        assert_eq!(formal_partial(&d5, &product, 1).unwrap(), x0);

        let constant = Polynomial::constant(&d5, 3, 2).unwrap();
        assert!(formal_partial(&d5, &constant, 0).unwrap().is_zero());
        assert_eq!(
            formal_partial(&d5, &constant, 7).unwrap_err(),
            Error::IndexOutOfRange { index: 7, arity: 2 }
        );
    }

    #[test]
    fn jacobian_transpose_matches_hand_computation() {
        let d = s("zmod:5");
        let pm = np(&d, "mul");
        // R[mul] at x=(2,3), δ=1 is (δ·x1, δ·x0) = (3,2).
        assert_eq!(jt_apply(&d, &pm, &[2, 3], &[1]).unwrap(), vec![3, 2]);
        assert_eq!(jt_apply(&d, &pm, &[2, 3], &[0]).unwrap(), vec![0, 0]);

        let add = np(&d, "add");
        for x in [[0, 0], [2, 3], [4, 4]] {
            for delta in 0..5 {
                assert_eq!(jt_apply(&d, &add, &x, &[delta]).unwrap(), vec![delta, delta]);
            }
        }

        assert!(matches!(
            jt_apply(&d, &pm, &[1], &[1]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn formal_equality_is_finer_than_extensional() {
        let d = s("zmod:2");
        let square = np(&d, "copy ; mul");
        let ident = np(&d, "id");
        assert!(!poly_equal(&square, &ident).unwrap());
        let c1 = parse_expr(&d, "copy ; mul").unwrap();
        let c2 = parse_expr(&d, "id").unwrap();
        assert!(extensionally_equal(&d, &c1, &c2).unwrap().is_equal());

        // Commutativity folds both variants to one normal form.
        let a = np(&d, "copy ; mul");
        let b = np(&d, "copy ; swap ; mul");
        assert!(poly_equal(&a, &b).unwrap());
        assert!(poly_equal(&a, &a).unwrap());
        assert!(matches!(
            poly_equal(&a, &np(&d, "mul")),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn polynomial_evaluation_agrees_with_circuit_evaluation() {
        for id in ["zmod:3", "sat:3", "zmod:5"] {
            let d = s(id);
            let programs = [
                "copy ; mul",
                "copy ; copy * id ; mul * id ; add",
                "mul * id ; add",
                "copy * copy ; id * swap * id ; mul * mul ; add",
                "const(2) * id ; mul",
                "zero * id ; add",
            ];
            for text in programs {
                let c = parse_expr(&d, text).unwrap();
                let pm = to_poly(&d, &c).unwrap();
                for x in crate::eval::tuples(d.finite_size().unwrap(), c.arity()) {
                    assert_eq!(
                        pm.eval(&d, &x).unwrap(),
                        eval(&d, &c, &x).unwrap(),
                        "normal form of `{text}` diverges at {x:?} over {id}"
                    );
                }
            }
        }
    }

    #[test]
    fn leibniz_law_holds_on_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1e1b);
        for id in ["zmod:6", "sat:4", "zmod:5"] {
            let d = s(id);
            let size = d.finite_size().unwrap();
            for _ in 0..40 {
                let arity = rng.gen_range(1..=3usize);
                let mut sample = || {
                    let n_terms = rng.gen_range(0..=4usize);
                    let terms: Vec<(Vec<u64>, u64)> = (0..n_terms)
                        .map(|_| {
                            let exps: Vec<u64> =
                                (0..arity).map(|_| rng.gen_range(0..=3u64)).collect();
                            (exps, rng.gen_range(0..size))
                        })
                        .collect();
                    Polynomial::from_terms(&d, arity, &terms).unwrap()
                };
                let p = sample();
                let q = sample();
                let pq = p.mul(&d, &q).unwrap();
                for i in 0..arity {
                    let lhs = formal_partial(&d, &pq, i).unwrap();
                    let rhs = formal_partial(&d, &p, i)
                        .unwrap()
                        .mul(&d, &q)
                        .unwrap()
                        .add(&d, &p.mul(&d, &formal_partial(&d, &q, i).unwrap()).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs, "Leibniz law failed over {id}");
                }
            }
        }
    }

    #[test]
    fn nat_normal_forms_decide_function_equality() {
        let d = s("nat");
        let doubled = np(&d, "copy ; add");
        let scaled = np(&d, "const(2) * id ; mul");
        assert!(poly_equal(&doubled, &scaled).unwrap());
        let square = np(&d, "copy ; mul");
        let ident = np(&d, "id");
        assert!(!poly_equal(&square, &ident).unwrap());
    }

    #[test]
    fn term_budget_is_enforced() {
        let d = s("nat");
        // ((x+1)²)²)² = (x+1)⁸ has nine terms over nat.
        let c = parse_expr(&d, "(id * one ; add) ; copy ; mul ; copy ; mul ; copy ; mul")
            .unwrap();
        let pm = to_poly(&d, &c).unwrap();
        assert_eq!(pm.polys()[0].term_count(), 9);
        assert!(matches!(
            to_poly_with_budget(&d, &c, 4),
            Err(Error::BudgetExceeded { budget: 4, .. })
        ));
    }

    #[test]
    fn rendering_orders_terms_by_descending_degree() {
        let d = s("zmod:5");
        let p = Polynomial::from_terms(
            &d,
            2,
            &[(vec![0, 0], 4), (vec![2, 0], 3), (vec![1, 1], 1), (vec![0, 1], 2)],
        )
        .unwrap();
        assert_eq!(p.to_string(), "3·x0^2 + x0·x1 + 2·x1 + 4");
        let zero = Polynomial::zero(2);
        assert_eq!(zero.to_string(), "0");
    }

    #[test]
    fn zero_arity_circuits_normalize_to_constants() {
        let d = s("zmod:5");
        let pm = np(&d, "const(2) * const(3)");
        assert_eq!(pm.arity(), 0);
        assert_eq!(pm.eval(&d, &[]).unwrap(), vec![2, 3]);
        assert_eq!(pm.to_string(), "y0 = 2\ny1 = 3\n");
    }

    #[test]
    fn exponents_track_squaring_chains_past_32_bits() {
        let d = s("zmod:2");
        // 34 squarings: x^(2^34) — the exponent exceeds u32.
        let mut c = Circuit::id(1);
        for _ in 0..34 {
            c = Circuit::compose(&c, &parse_expr(&d, "copy ; mul").unwrap()).unwrap();
        }
        let pm = to_poly(&d, &c).unwrap();
        let m = Monomial::new(vec![1u64 << 34]);
        assert_eq!(pm.polys()[0].coefficient(&m), 1);
    }
}
