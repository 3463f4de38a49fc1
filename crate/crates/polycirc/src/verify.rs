//! Brute-force verification of the reverse-derivative laws.
//!
//! Everything here answers one question: does a proposed reverse derivative
//! behave like a derivative?  Four entry points cover the four ways the
//! question comes up:
//!
//! * [`check_rdc_axioms`] — run the axiom battery against the reverse
//!   transformation of an ordinary circuit;
//! * [`check_extension`] — run it against a user-proposed reverse rule for a
//!   new generator, plus well-definedness of the rule with respect to the
//!   generator's defining equations;
//! * [`check_preservation`] — check that composing circuits sequentially or
//!   in parallel preserves the axioms whenever the components satisfy them;
//! * [`check_presentation`] — evaluate the equational presentation of the
//!   active semiring (monoid/comonoid laws, distributivity, constant tables,
//!   comparator behaviour on constants).
//!
//! All checks are finite sweeps over the carrier.  When the input space of a
//! law has at most [`EXHAUSTION_THRESHOLD`] points it is enumerated
//! completely in lexicographic order, so a reported counterexample is the
//! least one.  Larger spaces are sampled with [`SAMPLED_CASES`] seeded draws;
//! the seed is recorded in the report and the least failing sample is kept,
//! so failures stay reproducible.  Infinite carriers are rejected with
//! [`Error::InfiniteCarrier`].
//!
//! The sweeps never interpret the derived terms structurally: second
//! derivatives of reversed circuits grow far too large for a tree walk per
//! input.  Each law is compiled once into a stack program and replayed per
//! case.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Generator, Node, Shape};
use crate::dsl;
use crate::error::{Error, Result};
use crate::eval::{count_tuples, eval, tuples};
use crate::rdiff::{forward, forward_direct, partial, reverse};
use crate::semiring::Semiring;
use crate::vm::{compile, Compiled, LowerNode, Lowerable};

/// Input spaces at most this large are swept exhaustively.
pub const EXHAUSTION_THRESHOLD: u128 = 1 << 16;

/// Number of random cases drawn when a space is too large to exhaust.
pub const SAMPLED_CASES: u64 = 10_000;

/// Seed used by the non-`_seeded` entry points.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Reversed circuits with term trees up to this size additionally get the
/// literal linearity comparison (materialized partial derivative against the
/// projected circuit).  Beyond it the compiled sweep alone decides, since the
/// materialized form grows by orders of magnitude per derivative level.
const LITERAL_TREE_LIMIT: u128 = 200;

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Verdict of a single law check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One named block of a counterexample input, e.g. the base point or one of
/// the change vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputBlock {
    pub name: String,
    pub values: Vec<u64>,
}

/// A failing input together with the two sides that disagreed on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub blocks: Vec<InputBlock>,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

/// Outcome of one law: its verdict, how many cases ran, the sampling seed if
/// the sweep was sampled rather than exhaustive, and the least counterexample
/// found on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub status: Status,
    pub cases: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// A bundle of law checks for one subject over one semiring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub semiring: String,
    pub subject: String,
    pub passed: bool,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    /// Look up a check by its law name.
    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

// ---------------------------------------------------------------------------
// Sweep engine
// ---------------------------------------------------------------------------

fn split_blocks(blocks: &[(&str, usize)], case: &[u64]) -> Vec<InputBlock> {
    let mut out = Vec::with_capacity(blocks.len());
    let mut at = 0;
    for &(name, width) in blocks {
        out.push(InputBlock {
            name: name.into(),
            values: case[at..at + width].to_vec(),
        });
        at += width;
    }
    out
}

/// Sweep one equation-shaped law.  `sides` maps a flat input (the named
/// blocks concatenated) to the two values that must agree.  Small spaces are
/// exhausted in lexicographic order and stop at the first (hence least)
/// failure; large spaces draw [`SAMPLED_CASES`] inputs from the given seed
/// and keep the lexicographically least failure.
fn check_equation<F>(
    desc: &Semiring,
    axiom: &str,
    blocks: &[(&str, usize)],
    seed: u64,
    mut sides: F,
) -> Result<AxiomCheck>
where
    F: FnMut(&[u64]) -> Result<(Vec<u64>, Vec<u64>)>,
{
    let size = desc.finite_size()?;
    let slots: usize = blocks.iter().map(|&(_, w)| w).sum();
    let exhaustive = matches!(count_tuples(size, slots), Some(t) if t <= EXHAUSTION_THRESHOLD);
    if exhaustive {
        let mut cases = 0u64;
        for case in tuples(size, slots) {
            cases += 1;
            let (left, right) = sides(&case)?;
            if left != right {
                return Ok(AxiomCheck {
                    axiom: axiom.into(),
                    status: Status::Fail,
                    cases,
                    seed: None,
                    counterexample: Some(Counterexample {
                        blocks: split_blocks(blocks, &case),
                        left,
                        right,
                    }),
                });
            }
        }
        return Ok(AxiomCheck {
            axiom: axiom.into(),
            status: Status::Pass,
            cases,
            seed: None,
            counterexample: None,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<(Vec<u64>, Counterexample)> = None;
    for _ in 0..SAMPLED_CASES {
        let case: Vec<u64> = (0..slots).map(|_| rng.gen_range(0..size)).collect();
        let (left, right) = sides(&case)?;
        if left != right && worst.as_ref().is_none_or(|(least, _)| case < *least) {
            let found = Counterexample {
                blocks: split_blocks(blocks, &case),
                left,
                right,
            };
            worst = Some((case, found));
        }
    }
    Ok(AxiomCheck {
        axiom: axiom.into(),
        status: if worst.is_some() { Status::Fail } else { Status::Pass },
        cases: SAMPLED_CASES,
        seed: Some(seed),
        counterexample: worst.map(|(_, cex)| cex),
    })
}

// ---------------------------------------------------------------------------
// Circuits over an extended signature
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum ExtNode {
    Gen(Generator),
    Symbol,
    Seq(ExtCircuit, ExtCircuit),
    Par(ExtCircuit, ExtCircuit),
}

#[derive(Debug)]
struct ExtInner {
    shape: Shape,
    node: ExtNode,
}

/// A circuit term over the signature extended with one opaque generator (the
/// "symbol").  Used to state a proposed reverse rule and defining equations
/// for a new generator before it has any built-in support.
#[derive(Clone, Debug)]
pub struct ExtCircuit(Arc<ExtInner>);

impl ExtCircuit {
    fn make(shape: Shape, node: ExtNode) -> ExtCircuit {
        ExtCircuit(Arc::new(ExtInner { shape, node }))
    }

    /// A built-in generator as an extended term.
    pub fn gen(g: Generator) -> ExtCircuit {
        ExtCircuit::make(Circuit::gen(g).shape(), ExtNode::Gen(g))
    }

    /// The new generator itself, with the given shape.
    pub fn symbol(arity: usize, coarity: usize) -> ExtCircuit {
        ExtCircuit::make(Shape::new(arity, coarity), ExtNode::Symbol)
    }

    /// Embed an ordinary circuit.
    pub fn lift(c: &Circuit) -> ExtCircuit {
        enum Task {
            Visit(Circuit),
            Build(Circuit),
        }
        let mut memo: HashMap<usize, ExtCircuit> = HashMap::new();
        let mut stack = vec![Task::Visit(c.clone())];
        while let Some(task) = stack.pop() {
            match task {
                Task::Visit(c) => {
                    if memo.contains_key(&c.key()) {
                        continue;
                    }
                    match c.node() {
                        Node::Gen(g) => {
                            memo.insert(c.key(), ExtCircuit::gen(*g));
                        }
                        Node::Seq(f, g) | Node::Par(f, g) => {
                            let (f, g) = (f.clone(), g.clone());
                            stack.push(Task::Build(c.clone()));
                            stack.push(Task::Visit(g));
                            stack.push(Task::Visit(f));
                        }
                    }
                }
                Task::Build(c) => {
                    if memo.contains_key(&c.key()) {
                        continue;
                    }
                    let lifted = match c.node() {
                        Node::Gen(_) => unreachable!("generators are lifted at visit time"),
                        Node::Seq(f, g) => ExtCircuit::make(
                            c.shape(),
                            ExtNode::Seq(memo[&f.key()].clone(), memo[&g.key()].clone()),
                        ),
                        Node::Par(f, g) => ExtCircuit::make(
                            c.shape(),
                            ExtNode::Par(memo[&f.key()].clone(), memo[&g.key()].clone()),
                        ),
                    };
                    memo.insert(c.key(), lifted);
                }
            }
        }
        memo.remove(&c.key()).expect("the root circuit was lifted")
    }

    /// Sequential composition; the wire counts must meet.
    pub fn compose(f: &ExtCircuit, g: &ExtCircuit) -> Result<ExtCircuit> {
        if f.coarity() != g.arity() {
            return Err(Error::ShapeMismatch {
                left: f.shape(),
                right: g.shape(),
                context: "compose".into(),
            });
        }
        Ok(ExtCircuit::make(
            Shape::new(f.arity(), g.coarity()),
            ExtNode::Seq(f.clone(), g.clone()),
        ))
    }

    /// Parallel (side-by-side) composition.
    pub fn tensor(f: &ExtCircuit, g: &ExtCircuit) -> ExtCircuit {
        ExtCircuit::make(
            Shape::new(f.arity() + g.arity(), f.coarity() + g.coarity()),
            ExtNode::Par(f.clone(), g.clone()),
        )
    }

    /// Right-nested tensor with zero-wire terms skipped, mirroring
    /// [`Circuit::tensor_list`].
    pub fn tensor_list<I>(parts: I) -> ExtCircuit
    where
        I: IntoIterator<Item = ExtCircuit>,
    {
        let parts: Vec<ExtCircuit> = parts
            .into_iter()
            .filter(|c| c.arity() != 0 || c.coarity() != 0)
            .collect();
        match parts.len() {
            0 => ExtCircuit::lift(&Circuit::empty()),
            _ => {
                let mut it = parts.into_iter().rev();
                let mut acc = it.next().unwrap();
                for c in it {
                    acc = ExtCircuit::tensor(&c, &acc);
                }
                acc
            }
        }
    }

    /// Right-nested sequential composition of a non-empty list.
    pub fn seq_list<I>(parts: I) -> Result<ExtCircuit>
    where
        I: IntoIterator<Item = ExtCircuit>,
    {
        let parts: Vec<ExtCircuit> = parts.into_iter().collect();
        let mut it = parts.into_iter().rev();
        let mut acc = it
            .next()
            .ok_or_else(|| Error::Invalid("seq_list of no circuits".into()))?;
        for c in it {
            acc = ExtCircuit::compose(&c, &acc)?;
        }
        Ok(acc)
    }

    pub fn shape(&self) -> Shape {
        self.0.shape
    }

    pub fn arity(&self) -> usize {
        self.0.shape.arity
    }

    pub fn coarity(&self) -> usize {
        self.0.shape.coarity
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }
}

impl Drop for ExtInner {
    fn drop(&mut self) {
        // Deep terms would overflow the stack under the derived recursive
        // drop; unlink children iteratively instead.
        let mut stack: Vec<ExtCircuit> = Vec::new();
        match std::mem::replace(&mut self.node, ExtNode::Gen(Generator::Identity)) {
            ExtNode::Gen(_) | ExtNode::Symbol => {}
            ExtNode::Seq(a, b) | ExtNode::Par(a, b) => {
                stack.push(a);
                stack.push(b);
            }
        }
        while let Some(ExtCircuit(arc)) = stack.pop() {
            if let Some(inner) = Arc::into_inner(arc) {
                let mut inner = inner;
                match std::mem::replace(&mut inner.node, ExtNode::Gen(Generator::Identity)) {
                    ExtNode::Gen(_) | ExtNode::Symbol => {}
                    ExtNode::Seq(a, b) | ExtNode::Par(a, b) => {
                        stack.push(a);
                        stack.push(b);
                    }
                }
            }
        }
    }
}

impl Lowerable for ExtCircuit {
    fn shape(&self) -> Shape {
        self.0.shape
    }

    fn view(&self) -> LowerNode<ExtCircuit> {
        match &self.0.node {
            ExtNode::Gen(g) => LowerNode::Gen(*g),
            ExtNode::Symbol => LowerNode::Opaque {
                args: self.arity(),
                outs: self.coarity(),
            },
            ExtNode::Seq(f, g) => LowerNode::Seq(f.clone(), g.clone()),
            ExtNode::Par(f, g) => LowerNode::Par(f.clone(), g.clone()),
        }
    }
}

/// Every symbol occurrence in `t` must carry the declared shape.
fn assert_symbol_shape(t: &ExtCircuit, arity: usize, coarity: usize) -> Result<()> {
    let want = Shape::new(arity, coarity);
    let mut stack = vec![t.clone()];
    while let Some(c) = stack.pop() {
        match &c.0.node {
            ExtNode::Symbol if c.shape() != want => {
                return Err(Error::ShapeMismatch {
                    left: c.shape(),
                    right: want,
                    context: "extension symbol".into(),
                });
            }
            ExtNode::Symbol | ExtNode::Gen(_) => {}
            ExtNode::Seq(a, b) | ExtNode::Par(a, b) => {
                stack.push(a.clone());
                stack.push(b.clone());
            }
        }
    }
    Ok(())
}

// The reverse transformation on extended terms mirrors the ordinary one
// constructor by constructor; the only new case is the symbol, which is
// rewritten to the proposed rule verbatim (the rule may mention the symbol
// itself — it is substituted once, not expanded recursively).

fn reverse_seq_ext(f: &ExtCircuit, g: &ExtCircuit, rf: &ExtCircuit, rg: &ExtCircuit) -> ExtCircuit {
    let m = f.arity();
    let n = g.coarity();
    ExtCircuit::seq_list([
        ExtCircuit::lift(&Circuit::tensor_list([Circuit::copy_n(m), Circuit::id(n)])),
        ExtCircuit::tensor_list([
            ExtCircuit::lift(&Circuit::id(m)),
            f.clone(),
            ExtCircuit::lift(&Circuit::id(n)),
        ]),
        ExtCircuit::tensor_list([ExtCircuit::lift(&Circuit::id(m)), rg.clone()]),
        rf.clone(),
    ])
    .expect("reversal of a composite is well-shaped")
}

fn reverse_par_ext(f: &ExtCircuit, g: &ExtCircuit, rf: &ExtCircuit, rg: &ExtCircuit) -> ExtCircuit {
    let shuffle = ExtCircuit::lift(&Circuit::tensor_list([
        Circuit::id(f.arity()),
        Circuit::swap_block(g.arity(), f.coarity()),
        Circuit::id(g.coarity()),
    ]));
    let parts = ExtCircuit::tensor_list([rf.clone(), rg.clone()]);
    ExtCircuit::compose(&shuffle, &parts).expect("reversal of a tensor is well-shaped")
}

fn reverse_ext(c: &ExtCircuit, rule: &ExtCircuit) -> ExtCircuit {
    enum Task {
        Visit(ExtCircuit),
        Build(ExtCircuit),
    }
    let mut memo: HashMap<usize, ExtCircuit> = HashMap::new();
    let mut stack = vec![Task::Visit(c.clone())];
    while let Some(task) = stack.pop() {
        match task {
            Task::Visit(c) => {
                if memo.contains_key(&c.key()) {
                    continue;
                }
                match &c.0.node {
                    ExtNode::Gen(g) => {
                        memo.insert(c.key(), ExtCircuit::lift(&reverse(&Circuit::gen(*g))));
                    }
                    ExtNode::Symbol => {
                        memo.insert(c.key(), rule.clone());
                    }
                    ExtNode::Seq(f, g) | ExtNode::Par(f, g) => {
                        let (f, g) = (f.clone(), g.clone());
                        stack.push(Task::Build(c.clone()));
                        stack.push(Task::Visit(g));
                        stack.push(Task::Visit(f));
                    }
                }
            }
            Task::Build(c) => {
                if memo.contains_key(&c.key()) {
                    continue;
                }
                let rc = match &c.0.node {
                    ExtNode::Gen(_) | ExtNode::Symbol => {
                        unreachable!("leaves are reversed at visit time")
                    }
                    ExtNode::Seq(f, g) => reverse_seq_ext(f, g, &memo[&f.key()], &memo[&g.key()]),
                    ExtNode::Par(f, g) => reverse_par_ext(f, g, &memo[&f.key()], &memo[&g.key()]),
                };
                memo.insert(c.key(), rc);
            }
        }
    }
    memo.remove(&c.key()).expect("the root term was reversed")
}

/// Forward derivative of an extended term, built from the double reversal
/// exactly like the ordinary construction.
fn forward_ext(c: &ExtCircuit, rule: &ExtCircuit) -> ExtCircuit {
    let m = c.arity();
    let n = c.coarity();
    let rr = reverse_ext(&reverse_ext(c, rule), rule);
    let pad = ExtCircuit::lift(&Circuit::tensor_list([
        Circuit::id(m),
        Circuit::zero_n(n),
        Circuit::id(m),
    ]));
    let strip = ExtCircuit::lift(&Circuit::tensor_list([
        Circuit::discard_n(m),
        Circuit::id(n),
    ]));
    ExtCircuit::seq_list([pad, rr, strip]).expect("forward wiring is well-shaped")
}

// ---------------------------------------------------------------------------
// Generator extensions
// ---------------------------------------------------------------------------

/// A proposed new generator: evaluation semantics, a reverse rule of shape
/// `arity + coarity → arity`, and optional defining equations that the
/// generator is meant to satisfy.
pub struct GeneratorExtension {
    pub name: String,
    pub arity: usize,
    pub coarity: usize,
    /// Evaluation semantics, given one value per input wire.
    pub eval: fn(&Semiring, &[u64]) -> Result<Vec<u64>>,
    /// The proposed reverse derivative.  May mention the symbol itself.
    pub reverse: ExtCircuit,
    /// Defining equations `lhs = rhs` over the extended signature.
    pub equations: Vec<(ExtCircuit, ExtCircuit)>,
}

/// Negation as an extension: `R[neg] = discard * neg`, defined by
/// `x + neg(x) = 0`.
pub fn negate_extension() -> GeneratorExtension {
    let symbol = ExtCircuit::symbol(1, 1);
    let lhs = ExtCircuit::seq_list([
        ExtCircuit::gen(Generator::Copy),
        ExtCircuit::tensor(&ExtCircuit::gen(Generator::Identity), &symbol),
        ExtCircuit::gen(Generator::Add),
    ])
    .expect("x + neg(x) is well-shaped");
    let zero_map = Circuit::compose(&Circuit::gen(Generator::Discard), &Circuit::gen(Generator::Zero))
        .expect("discard ; zero is well-shaped");
    GeneratorExtension {
        name: "negate".into(),
        arity: 1,
        coarity: 1,
        eval: |d, args| Ok(vec![d.neg(args[0])?]),
        reverse: ExtCircuit::tensor(&ExtCircuit::gen(Generator::Discard), &symbol),
        equations: vec![(lhs, ExtCircuit::lift(&zero_map))],
    }
}

/// The comparator as an extension with the straight-through reverse rule
/// `R[eq] = discard * discard * copy` (the changes pass as through addition),
/// defined by its value on every pair of constants.
pub fn compare_extension(desc: &Semiring) -> Result<GeneratorExtension> {
    let size = desc.finite_size()?;
    let symbol = ExtCircuit::symbol(2, 1);
    let mut equations = Vec::new();
    for s in 0..size {
        for t in 0..size {
            let pair = Circuit::tensor(
                &Circuit::gen(Generator::Const(s)),
                &Circuit::gen(Generator::Const(t)),
            );
            let lhs = ExtCircuit::compose(&ExtCircuit::lift(&pair), &symbol)?;
            let rhs = ExtCircuit::gen(if s == t { Generator::One } else { Generator::Zero });
            equations.push((lhs, rhs));
        }
    }
    Ok(GeneratorExtension {
        name: "compare".into(),
        arity: 2,
        coarity: 1,
        eval: |d, args| Ok(vec![if args[0] == args[1] { d.one() } else { d.zero() }]),
        reverse: ExtCircuit::lift(&Circuit::tensor_list([
            Circuit::gen(Generator::Discard),
            Circuit::gen(Generator::Discard),
            Circuit::gen(Generator::Copy),
        ])),
        equations,
    })
}

/// A deliberately broken proposal: squaring with the non-additive rule
/// `R[g](x, d) = d·d`.  Fails the additivity law.
pub fn broken_square_extension() -> GeneratorExtension {
    let square = Circuit::compose(&Circuit::gen(Generator::Copy), &Circuit::gen(Generator::Mul))
        .expect("copy ; mul is well-shaped");
    GeneratorExtension {
        name: "broken-square".into(),
        arity: 1,
        coarity: 1,
        eval: |d, args| Ok(vec![d.mul(args[0], args[0])?]),
        reverse: ExtCircuit::lift(&Circuit::tensor(&Circuit::gen(Generator::Discard), &square)),
        equations: Vec::new(),
    }
}

/// A proposal that satisfies the axioms but is not well defined with respect
/// to its own defining equation: the constant-zero map with a reverse rule
/// that leaks the incoming change.
pub fn leaky_zero_extension() -> GeneratorExtension {
    let symbol = ExtCircuit::symbol(1, 1);
    let zero_map = Circuit::compose(&Circuit::gen(Generator::Discard), &Circuit::gen(Generator::Zero))
        .expect("discard ; zero is well-shaped");
    GeneratorExtension {
        name: "leaky-zero".into(),
        arity: 1,
        coarity: 1,
        eval: |d, _| Ok(vec![d.zero()]),
        reverse: ExtCircuit::lift(&Circuit::tensor(
            &Circuit::gen(Generator::Discard),
            &Circuit::id(1),
        )),
        equations: vec![(symbol, ExtCircuit::lift(&zero_map))],
    }
}

// ---------------------------------------------------------------------------
// Axiom batteries
// ---------------------------------------------------------------------------

/// Compiled programs for one subject's axiom sweep.
struct AxiomSubject<'a> {
    m: usize,
    n: usize,
    /// The reverse derivative `m + n → m`.
    rev: Compiled,
    /// Forward derivative of the reverse, `2(m+n) → m`.
    lin: Compiled,
    /// Second forward derivative of the subject, `4m → n`.
    fwd2: Compiled,
    /// Directly-built and doubly-reversed forward derivatives, `2m → n` each;
    /// present only for ordinary circuits, where both constructions exist.
    agreement: Option<(Compiled, Compiled)>,
    /// Materialized partial derivative of the reverse and the projected
    /// reverse, for the literal linearity comparison on small terms.
    literal: Option<(Compiled, Compiled)>,
    ext: Option<&'a GeneratorExtension>,
}

impl AxiomSubject<'_> {
    fn run(&self, desc: &Semiring, prog: &Compiled, mut buf: Vec<u64>) -> Result<Vec<u64>> {
        match self.ext {
            Some(e) => {
                let apply = e.eval;
                let hook = move |d: &Semiring, args: &[u64]| apply(d, args);
                prog.run_buf(desc, &mut buf, Some(&hook))?;
            }
            None => prog.run_buf(desc, &mut buf, None)?,
        }
        Ok(buf)
    }

    fn axiom_checks(&self, desc: &Semiring, seed: u64) -> Result<Vec<AxiomCheck>> {
        let (m, n) = (self.m, self.n);
        let mut checks = Vec::new();

        // R[f](x, d1 + d2) = R[f](x, d1) + R[f](x, d2)
        checks.push(check_equation(
            desc,
            "additivity-of-change",
            &[("base", m), ("change-1", n), ("change-2", n)],
            seed,
            |case| {
                let (x, rest) = case.split_at(m);
                let (d1, d2) = rest.split_at(n);
                let mut joint = Vec::with_capacity(m + n);
                joint.extend_from_slice(x);
                for i in 0..n {
                    joint.push(desc.add(d1[i], d2[i])?);
                }
                let left = self.run(desc, &self.rev, joint)?;
                let first = self.run(desc, &self.rev, [x, d1].concat())?;
                let second = self.run(desc, &self.rev, [x, d2].concat())?;
                let mut right = Vec::with_capacity(m);
                for i in 0..m {
                    right.push(desc.add(first[i], second[i])?);
                }
                Ok((left, right))
            },
        )?);

        // R[f](x, 0) = 0
        checks.push(check_equation(desc, "zero-change", &[("base", m)], seed, |case| {
            let mut input = case.to_vec();
            input.extend(std::iter::repeat_n(desc.zero(), n));
            let left = self.run(desc, &self.rev, input)?;
            Ok((left, vec![desc.zero(); m]))
        })?);

        // The derivative of R[f] with respect to its change block alone is
        // R[f] again on that change: R[f] is linear in the change.
        checks.push(check_equation(
            desc,
            "linearity-of-change",
            &[("base", m), ("at", n), ("change", n)],
            seed,
            |case| {
                let (x, rest) = case.split_at(m);
                let (b, db) = rest.split_at(n);
                let mut padded = Vec::with_capacity(2 * (m + n));
                padded.extend_from_slice(x);
                padded.extend_from_slice(b);
                padded.extend(std::iter::repeat_n(desc.zero(), m));
                padded.extend_from_slice(db);
                let left = self.run(desc, &self.lin, padded)?;
                let right = self.run(desc, &self.rev, [x, db].concat())?;
                if left != right {
                    return Ok((left, right));
                }
                if let Some((part, proj)) = &self.literal {
                    let lp = self.run(desc, part, case.to_vec())?;
                    let rp = self.run(desc, proj, case.to_vec())?;
                    if lp != rp {
                        return Ok((lp, rp));
                    }
                }
                Ok((left, right))
            },
        )?);

        // The directly-built forward derivative agrees with the
        // doubly-reversed one, tying the sweeps above to the reverse
        // transformation itself.
        if let Some((direct, doubled)) = &self.agreement {
            checks.push(check_equation(
                desc,
                "forward-agreement",
                &[("base", m), ("change", m)],
                seed,
                |case| {
                    Ok((
                        self.run(desc, direct, case.to_vec())?,
                        self.run(desc, doubled, case.to_vec())?,
                    ))
                },
            )?);
        }

        // D²[f]((a, b), (c, d)) = D²[f]((a, c), (b, d))
        checks.push(check_equation(
            desc,
            "symmetry-of-second-derivative",
            &[("a", m), ("b", m), ("c", m), ("d", m)],
            seed,
            |case| {
                let left = self.run(desc, &self.fwd2, case.to_vec())?;
                let mut swapped = case.to_vec();
                for i in 0..m {
                    swapped.swap(m + i, 2 * m + i);
                }
                let right = self.run(desc, &self.fwd2, swapped)?;
                Ok((left, right))
            },
        )?);

        Ok(checks)
    }
}

fn plain_subject(desc: &Semiring, c: &Circuit) -> Result<AxiomSubject<'static>> {
    let m = c.arity();
    let n = c.coarity();
    let rc = reverse(c);
    let fd = forward_direct(c);
    let literal = if rc.tree_size() <= LITERAL_TREE_LIMIT {
        let part = partial(&rc, m)?;
        let keep = Circuit::tensor_list([Circuit::id(m), Circuit::discard_n(n), Circuit::id(n)]);
        let proj = Circuit::compose(&keep, &rc)?;
        Some((compile(desc, &part)?, compile(desc, &proj)?))
    } else {
        None
    };
    Ok(AxiomSubject {
        m,
        n,
        rev: compile(desc, &rc)?,
        lin: compile(desc, &forward_direct(&rc))?,
        fwd2: compile(desc, &forward_direct(&fd))?,
        agreement: Some((compile(desc, &fd)?, compile(desc, &forward(c))?)),
        literal,
        ext: None,
    })
}

fn ext_subject<'a>(desc: &Semiring, ext: &'a GeneratorExtension) -> Result<AxiomSubject<'a>> {
    let rule = &ext.reverse;
    let symbol = ExtCircuit::symbol(ext.arity, ext.coarity);
    let fwd = forward_ext(&symbol, rule);
    Ok(AxiomSubject {
        m: ext.arity,
        n: ext.coarity,
        rev: compile(desc, rule)?,
        lin: compile(desc, &forward_ext(rule, rule))?,
        fwd2: compile(desc, &forward_ext(&fwd, rule))?,
        agreement: None,
        literal: None,
        ext: Some(ext),
    })
}

/// Check the derivative laws for the reverse transformation of `c`,
/// sampling (where needed) from the default seed.
pub fn check_rdc_axioms(desc: &Semiring, c: &Circuit) -> Result<AxiomReport> {
    check_rdc_axioms_seeded(desc, c, DEFAULT_SEED)
}

/// As [`check_rdc_axioms`] with an explicit sampling seed.
pub fn check_rdc_axioms_seeded(desc: &Semiring, c: &Circuit, seed: u64) -> Result<AxiomReport> {
    desc.finite_size()?;
    let subject = plain_subject(desc, c)?;
    let checks = subject.axiom_checks(desc, seed)?;
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(AxiomReport {
        semiring: desc.id().into(),
        subject: dsl::render(c),
        passed,
        checks,
    })
}

/// Check a proposed generator extension: the derivative laws for its reverse
/// rule, and for each defining equation both that the equation holds under
/// the extension's evaluation semantics and that the two sides get the same
/// reverse derivative (the rule is well defined on the quotient).
pub fn check_extension(desc: &Semiring, ext: &GeneratorExtension) -> Result<AxiomReport> {
    check_extension_seeded(desc, ext, DEFAULT_SEED)
}

/// As [`check_extension`] with an explicit sampling seed.
pub fn check_extension_seeded(
    desc: &Semiring,
    ext: &GeneratorExtension,
    seed: u64,
) -> Result<AxiomReport> {
    desc.finite_size()?;
    let want = Shape::new(ext.arity + ext.coarity, ext.arity);
    if ext.reverse.shape() != want {
        return Err(Error::ShapeMismatch {
            left: ext.reverse.shape(),
            right: want,
            context: "proposed reverse rule".into(),
        });
    }
    assert_symbol_shape(&ext.reverse, ext.arity, ext.coarity)?;
    for (lhs, rhs) in &ext.equations {
        assert_symbol_shape(lhs, ext.arity, ext.coarity)?;
        assert_symbol_shape(rhs, ext.arity, ext.coarity)?;
        if lhs.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch {
                left: lhs.shape(),
                right: rhs.shape(),
                context: "defining equation".into(),
            });
        }
    }
    let subject = ext_subject(desc, ext)?;
    let mut checks = subject.axiom_checks(desc, seed)?;
    for (i, (lhs, rhs)) in ext.equations.iter().enumerate() {
        let pl = compile(desc, lhs)?;
        let pr = compile(desc, rhs)?;
        checks.push(check_equation(
            desc,
            &format!("equation-{}-holds", i + 1),
            &[("input", lhs.arity())],
            seed,
            |case| {
                Ok((
                    subject.run(desc, &pl, case.to_vec())?,
                    subject.run(desc, &pr, case.to_vec())?,
                ))
            },
        )?);
        let rl = compile(desc, &reverse_ext(lhs, &ext.reverse))?;
        let rr = compile(desc, &reverse_ext(rhs, &ext.reverse))?;
        checks.push(check_equation(
            desc,
            &format!("equation-{}-reverse-well-defined", i + 1),
            &[("base", lhs.arity()), ("change", lhs.coarity())],
            seed,
            |case| {
                Ok((
                    subject.run(desc, &rl, case.to_vec())?,
                    subject.run(desc, &rr, case.to_vec())?,
                ))
            },
        )?);
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(AxiomReport {
        semiring: desc.id().into(),
        subject: ext.name.clone(),
        passed,
        checks,
    })
}

fn prefixed_checks(
    desc: &Semiring,
    c: &Circuit,
    seed: u64,
    prefix: &str,
) -> Result<Vec<AxiomCheck>> {
    let subject = plain_subject(desc, c)?;
    let mut checks = subject.axiom_checks(desc, seed)?;
    for check in &mut checks {
        check.axiom = format!("{prefix}/{}", check.axiom);
    }
    Ok(checks)
}

/// Check that the derivative laws survive composition: run the battery on
/// `f`, on `g`, on `f ; g` (when composable) and on `f * g`.  The report
/// passes when the composites pass whenever both components do.
pub fn check_preservation(desc: &Semiring, f: &Circuit, g: &Circuit) -> Result<AxiomReport> {
    check_preservation_seeded(desc, f, g, DEFAULT_SEED)
}

/// As [`check_preservation`] with an explicit sampling seed.
pub fn check_preservation_seeded(
    desc: &Semiring,
    f: &Circuit,
    g: &Circuit,
    seed: u64,
) -> Result<AxiomReport> {
    desc.finite_size()?;
    let mut checks = prefixed_checks(desc, f, seed, "component-f")?;
    checks.extend(prefixed_checks(desc, g, seed, "component-g")?);
    match Circuit::compose(f, g) {
        Ok(h) => checks.extend(prefixed_checks(desc, &h, seed, "composite-seq")?),
        Err(_) => checks.push(AxiomCheck {
            axiom: "composite-seq/not-composable".into(),
            status: Status::Skipped,
            cases: 0,
            seed: None,
            counterexample: None,
        }),
    }
    checks.extend(prefixed_checks(desc, &Circuit::tensor(f, g), seed, "composite-par")?);
    let components_pass = checks
        .iter()
        .filter(|c| c.axiom.starts_with("component-"))
        .all(|c| c.status != Status::Fail);
    let composites_pass = checks
        .iter()
        .filter(|c| c.axiom.starts_with("composite-"))
        .all(|c| c.status != Status::Fail);
    Ok(AxiomReport {
        semiring: desc.id().into(),
        subject: format!("pair({}, {})", dsl::render(f), dsl::render(g)),
        passed: !components_pass || composites_pass,
        checks,
    })
}

// ---------------------------------------------------------------------------
// Presentation of the semiring
// ---------------------------------------------------------------------------

/// `k`-fold sum `x + x + … + x` as a circuit `1 → 1`, `k ≥ 1`.
fn n_fold_sum(k: usize) -> Circuit {
    let mut fan = Circuit::id(1);
    let mut sum = Circuit::id(1);
    for i in 1..k {
        fan = Circuit::compose(
            &Circuit::gen(Generator::Copy),
            &Circuit::tensor(&Circuit::id(1), &fan),
        )
        .expect("fan-out is well-shaped");
        sum = Circuit::compose(
            &Circuit::tensor_list([Circuit::gen(Generator::Add), Circuit::id(i - 1)]),
            &sum,
        )
        .expect("fold-in is well-shaped");
    }
    Circuit::compose(&fan, &sum).expect("k-fold sum is well-shaped")
}

/// The plain (non-family) equations presented for `desc`.
fn presented_equations(desc: &Semiring) -> Vec<(String, Circuit, Circuit)> {
    let gi = Circuit::gen;
    use Generator as G;
    let id1 = Circuit::id(1);
    let seq = |a: &Circuit, b: &Circuit| Circuit::compose(a, b).expect("presented equation is well-shaped");
    let ten = Circuit::tensor;
    let mut eqs: Vec<(String, Circuit, Circuit)> = Vec::new();
    let push = |eqs: &mut Vec<(String, Circuit, Circuit)>, name: String, l: Circuit, r: Circuit| {
        debug_assert_eq!(l.shape(), r.shape(), "{name}");
        eqs.push((name, l, r));
    };

    // Copying and discarding form a commutative comonoid.
    push(
        &mut eqs,
        "copy-coassociative".into(),
        seq(&gi(G::Copy), &ten(&gi(G::Copy), &id1)),
        seq(&gi(G::Copy), &ten(&id1, &gi(G::Copy))),
    );
    push(
        &mut eqs,
        "copy-counit-left".into(),
        seq(&gi(G::Copy), &ten(&gi(G::Discard), &id1)),
        id1.clone(),
    );
    push(
        &mut eqs,
        "copy-counit-right".into(),
        seq(&gi(G::Copy), &ten(&id1, &gi(G::Discard))),
        id1.clone(),
    );
    push(
        &mut eqs,
        "copy-commutative".into(),
        seq(&gi(G::Copy), &gi(G::Twist)),
        gi(G::Copy),
    );

    // Addition is a commutative monoid with unit zero.
    push(
        &mut eqs,
        "add-associative".into(),
        seq(&ten(&gi(G::Add), &id1), &gi(G::Add)),
        seq(&ten(&id1, &gi(G::Add)), &gi(G::Add)),
    );
    push(
        &mut eqs,
        "add-commutative".into(),
        seq(&gi(G::Twist), &gi(G::Add)),
        gi(G::Add),
    );
    push(
        &mut eqs,
        "add-unit-left".into(),
        seq(&ten(&gi(G::Zero), &id1), &gi(G::Add)),
        id1.clone(),
    );
    push(
        &mut eqs,
        "add-unit-right".into(),
        seq(&ten(&id1, &gi(G::Zero)), &gi(G::Add)),
        id1.clone(),
    );

    // Multiplication is a commutative monoid with unit one.
    push(
        &mut eqs,
        "mul-associative".into(),
        seq(&ten(&gi(G::Mul), &id1), &gi(G::Mul)),
        seq(&ten(&id1, &gi(G::Mul)), &gi(G::Mul)),
    );
    push(
        &mut eqs,
        "mul-commutative".into(),
        seq(&gi(G::Twist), &gi(G::Mul)),
        gi(G::Mul),
    );
    push(
        &mut eqs,
        "mul-unit-left".into(),
        seq(&ten(&gi(G::One), &id1), &gi(G::Mul)),
        id1.clone(),
    );
    push(
        &mut eqs,
        "mul-unit-right".into(),
        seq(&ten(&id1, &gi(G::One)), &gi(G::Mul)),
        id1.clone(),
    );

    // Multiplication distributes over addition and absorbs zero.
    let spread = Circuit::seq_list([
        Circuit::tensor_list([gi(G::Copy), Circuit::id(2)]),
        Circuit::tensor_list([id1.clone(), gi(G::Twist), id1.clone()]),
        ten(&gi(G::Mul), &gi(G::Mul)),
        gi(G::Add),
    ])
    .expect("distributed product is well-shaped");
    push(
        &mut eqs,
        "distributivity".into(),
        seq(&ten(&id1, &gi(G::Add)), &gi(G::Mul)),
        spread,
    );
    push(
        &mut eqs,
        "annihilation".into(),
        seq(&ten(&gi(G::Zero), &id1), &gi(G::Mul)),
        seq(&gi(G::Discard), &gi(G::Zero)),
    );

    // The constants for zero and one denote the units.
    push(&mut eqs, "constant-zero".into(), gi(G::Const(desc.zero())), gi(G::Zero));
    push(&mut eqs, "constant-one".into(), gi(G::Const(desc.one())), gi(G::One));

    // Every operation is a plain function: it commutes with copying and is
    // absorbed by discarding.
    let mut ops: Vec<(String, Circuit)> = vec![
        ("add".into(), gi(G::Add)),
        ("mul".into(), gi(G::Mul)),
        ("zero".into(), gi(G::Zero)),
        ("one".into(), gi(G::One)),
        ("compare".into(), gi(G::Compare)),
    ];
    if desc.has_neg() {
        ops.push(("negate".into(), gi(G::Negate)));
    }
    if let Some(size) = desc.size() {
        for s in 0..size {
            ops.push((format!("constant-{s}"), gi(G::Const(s))));
        }
    }
    for (label, c) in ops {
        let m = c.arity();
        let n = c.coarity();
        push(
            &mut eqs,
            format!("{label}-copy-natural"),
            seq(&c, &Circuit::copy_n(n)),
            seq(&Circuit::copy_n(m), &ten(&c, &c)),
        );
        push(
            &mut eqs,
            format!("{label}-discard-natural"),
            seq(&c, &Circuit::discard_n(n)),
            Circuit::discard_n(m),
        );
    }

    // With additive inverses the carrier's addition is a finite group, so
    // summing any element size-many times returns to zero.
    if desc.has_neg() {
        if let Some(size) = desc.size() {
            push(
                &mut eqs,
                "characteristic".into(),
                n_fold_sum(size as usize),
                seq(&gi(G::Discard), &gi(G::Zero)),
            );
        }
        push(
            &mut eqs,
            "negation-cancels".into(),
            Circuit::seq_list([
                gi(G::Copy),
                ten(&id1, &gi(G::Negate)),
                gi(G::Add),
            ])
            .expect("x + (-x) is well-shaped"),
            seq(&gi(G::Discard), &gi(G::Zero)),
        );
    }

    eqs
}

/// Evaluate every presented equation of the semiring, including the
/// constant-sum, constant-product and comparator-constant families (one
/// check per family, swept over all pairs of carrier elements).
pub fn check_presentation(desc: &Semiring) -> Result<AxiomReport> {
    desc.finite_size()?;
    let mut checks = Vec::new();
    for (name, lhs, rhs) in presented_equations(desc) {
        let pl = compile(desc, &lhs)?;
        let pr = compile(desc, &rhs)?;
        checks.push(check_equation(
            desc,
            &name,
            &[("input", lhs.arity())],
            DEFAULT_SEED,
            |case| Ok((pl.run(desc, case)?, pr.run(desc, case)?)),
        )?);
    }
    let blocks = [("left-constant", 1), ("right-constant", 1)];
    checks.push(check_equation(desc, "constant-sums", &blocks, DEFAULT_SEED, |case| {
        let (s, t) = (case[0], case[1]);
        let pair = Circuit::tensor(
            &Circuit::gen(Generator::Const(s)),
            &Circuit::gen(Generator::Const(t)),
        );
        let c = Circuit::compose(&pair, &Circuit::gen(Generator::Add))
            .expect("constant sum is well-shaped");
        Ok((eval(desc, &c, &[])?, vec![desc.add(s, t)?]))
    })?);
    checks.push(check_equation(desc, "constant-products", &blocks, DEFAULT_SEED, |case| {
        let (s, t) = (case[0], case[1]);
        let pair = Circuit::tensor(
            &Circuit::gen(Generator::Const(s)),
            &Circuit::gen(Generator::Const(t)),
        );
        let c = Circuit::compose(&pair, &Circuit::gen(Generator::Mul))
            .expect("constant product is well-shaped");
        Ok((eval(desc, &c, &[])?, vec![desc.mul(s, t)?]))
    })?);
    checks.push(check_equation(desc, "comparator-constants", &blocks, DEFAULT_SEED, |case| {
        let (s, t) = (case[0], case[1]);
        let pair = Circuit::tensor(
            &Circuit::gen(Generator::Const(s)),
            &Circuit::gen(Generator::Const(t)),
        );
        let c = Circuit::compose(&pair, &Circuit::gen(Generator::Compare))
            .expect("constant comparison is well-shaped");
        let want = if s == t { desc.one() } else { desc.zero() };
        Ok((eval(desc, &c, &[])?, vec![want]))
    })?);
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(AxiomReport {
        semiring: desc.id().into(),
        subject: "presented equations".into(),
        passed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Semiring;

    fn s(spec: &str) -> Semiring {
        Semiring::parse(spec).unwrap()
    }

    fn shipped_finite() -> Vec<Semiring> {
        ["zmod:2", "zmod:3", "zmod:5", "sat:2", "sat:3", "sat:4"]
            .iter()
            .map(|id| s(id))
            .collect()
    }

    #[test]
    fn generators_satisfy_the_axioms_on_every_finite_semiring() {
        use Generator as G;
        for d in shipped_finite() {
            let size = d.finite_size().unwrap();
            let mut gens = vec![
                G::Add,
                G::Mul,
                G::Copy,
                G::Discard,
                G::Identity,
                G::Twist,
                G::Zero,
                G::One,
                G::Compare,
                G::Const(0),
                G::Const(size - 1),
            ];
            if d.has_neg() {
                gens.push(G::Negate);
            }
            for g in gens {
                let report = check_rdc_axioms(&d, &Circuit::gen(g)).unwrap();
                assert!(report.passed, "{g:?} over {}: {report:?}", d.id());
                for check in &report.checks {
                    assert_eq!(check.status, Status::Pass, "{g:?} over {}", d.id());
                    assert!(check.cases > 0);
                }
                assert!(report.check("forward-agreement").is_some());
            }
        }
    }

    #[test]
    fn broken_square_fails_additivity_with_the_least_counterexample() {
        let d = s("zmod:3");
        let report = check_extension(&d, &broken_square_extension()).unwrap();
        assert!(!report.passed);
        let additivity = report.check("additivity-of-change").unwrap();
        assert_eq!(additivity.status, Status::Fail);
        let cex = additivity.counterexample.as_ref().unwrap();
        let blocks: Vec<(&str, &[u64])> = cex
            .blocks
            .iter()
            .map(|b| (b.name.as_str(), b.values.as_slice()))
            .collect();
        assert_eq!(
            blocks,
            vec![
                ("base", &[0][..]),
                ("change-1", &[1][..]),
                ("change-2", &[1][..]),
            ]
        );
        assert_eq!(cex.left, vec![1]);
        assert_eq!(cex.right, vec![2]);
    }

    #[test]
    fn negation_extension_passes_wherever_negation_exists() {
        for id in ["zmod:2", "zmod:3", "zmod:5"] {
            let d = s(id);
            let report = check_extension(&d, &negate_extension()).unwrap();
            assert!(report.passed, "{id}: {report:?}");
            assert!(report.check("equation-1-holds").is_some());
            assert!(report.check("equation-1-reverse-well-defined").is_some());
        }
    }

    #[test]
    fn comparator_extension_passes_on_the_shipped_finite_semirings() {
        for d in shipped_finite() {
            let ext = compare_extension(&d).unwrap();
            assert_eq!(ext.equations.len(), (d.finite_size().unwrap() as usize).pow(2));
            let report = check_extension(&d, &ext).unwrap();
            assert!(report.passed, "{}: {report:?}", d.id());
        }
    }

    #[test]
    fn leaky_zero_fails_only_the_reverse_side_of_its_equation() {
        let d = s("zmod:3");
        let report = check_extension(&d, &leaky_zero_extension()).unwrap();
        assert!(!report.passed);
        for check in &report.checks {
            let want = if check.axiom == "equation-1-reverse-well-defined" {
                Status::Fail
            } else {
                Status::Pass
            };
            assert_eq!(check.status, want, "{}", check.axiom);
        }
        let cex = report
            .check("equation-1-reverse-well-defined")
            .unwrap()
            .counterexample
            .as_ref()
            .unwrap();
        assert_eq!(cex.left, vec![1]);
        assert_eq!(cex.right, vec![0]);
    }

    #[test]
    fn presentation_holds_for_the_shipped_semirings() {
        for id in ["zmod:2", "zmod:5", "sat:3", "sat:8"] {
            let d = s(id);
            let report = check_presentation(&d).unwrap();
            assert!(report.passed, "{id}: {report:?}");
            assert!(report.check("distributivity").is_some());
            assert!(report.check("constant-sums").is_some());
            if d.has_neg() {
                assert!(report.check("characteristic").is_some());
            }
        }
    }

    #[test]
    fn preservation_holds_for_simple_pairs() {
        let d = s("zmod:2");
        let copy = Circuit::gen(Generator::Copy);
        let mul = Circuit::gen(Generator::Mul);
        let report = check_preservation(&d, &copy, &mul).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.check("composite-seq/additivity-of-change").is_some());
        assert!(report.check("composite-par/symmetry-of-second-derivative").is_some());

        // A pair that does not compose sequentially still checks the tensor.
        let add = Circuit::gen(Generator::Add);
        let report = check_preservation(&d, &add, &mul).unwrap();
        assert!(report.passed);
        let skipped = report.check("composite-seq/not-composable").unwrap();
        assert_eq!(skipped.status, Status::Skipped);
    }

    #[test]
    fn sampled_sweeps_are_reproducible() {
        let d = s("zmod:5");
        let mul = Circuit::gen(Generator::Mul);
        let first = check_rdc_axioms_seeded(&d, &mul, 7).unwrap();
        let second = check_rdc_axioms_seeded(&d, &mul, 7).unwrap();
        assert_eq!(first, second);
        let symmetry = first.check("symmetry-of-second-derivative").unwrap();
        assert_eq!(symmetry.seed, Some(7), "an eight-slot sweep over zmod:5 is sampled");
        assert_eq!(symmetry.cases, SAMPLED_CASES);
    }

    #[test]
    fn infinite_carriers_are_rejected() {
        let d = s("nat");
        let err = check_rdc_axioms(&d, &Circuit::gen(Generator::Add)).unwrap_err();
        assert_eq!(err, Error::InfiniteCarrier);
        let err = check_presentation(&d).unwrap_err();
        assert_eq!(err, Error::InfiniteCarrier);
    }

    #[test]
    fn extension_shape_errors_are_reported() {
        let d = s("zmod:2");
        let mut ext = negate_extension();
        ext.reverse = ExtCircuit::gen(Generator::Copy);
        let err = check_extension(&d, &ext).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }
}
