//! The reverse-derivative transformation and its derived forms.
//!
//! [`reverse`] turns any circuit `c : m → n` into a circuit
//! `reverse(c) : m+n → m` computing the reverse derivative: the first `m`
//! inputs are the base point `x`, the last `n` the change `δ`, and the output
//! is the pullback of `δ` along `c` at `x` — the Jacobian-transpose action
//! for polynomial circuits. It is a purely structural compiler pass: the
//! result is again a circuit, so it can be differentiated again, serialized,
//! or trained against.
//!
//! From iterated reversals come the forward derivative [`forward`]
//! (`2m → n`, validated against the formal Jacobian from the polynomial
//! normal form), the partial derivative [`partial`] with respect to a trailing
//! input block, and the linearity predicates [`is_linear`]/[`is_linear_in`].
//!
//! The comparison generator is differentiated with the same rule as addition
//! (its change travels straight through), and negation reverses to negation
//! of the change.
//!
//! Derivative circuits share structure aggressively: [`reverse`] memoizes on
//! the input's interior sharing, and the transformation itself embeds each
//! subcircuit's reversal exactly once. Everything here is iterative — deep
//! chains neither overflow the stack during construction nor during the
//! evaluations performed by the linearity predicates.

use std::collections::HashMap;

use crate::circuit::{Circuit, Generator, Node};
#[cfg(test)]
use crate::circuit::Shape;
use crate::error::{Error, Result};
use crate::eval::extensionally_equal;
#[cfg(test)]
use crate::interp::{pop1, pop2, run, GenInterp};
use crate::semiring::Semiring;

fn seq(f: &Circuit, g: &Circuit) -> Circuit {
    Circuit::compose(f, g).expect("derivative wiring is well-shaped")
}

/// Reverse derivative of a single generator, in the `(base, change)` input
/// layout.
fn reverse_gen(g: Generator) -> Circuit {
    use Generator as G;
    let gen = Circuit::gen;
    match g {
        // (x, δ) ↦ δ
        G::Identity => Circuit::tensor(&gen(G::Discard), &gen(G::Identity)),
        // ((x₁,x₂), (δ₁,δ₂)) ↦ (δ₂,δ₁)
        G::Twist => Circuit::tensor_list([gen(G::Discard), gen(G::Discard), gen(G::Twist)]),
        // (x, (δ₁,δ₂)) ↦ δ₁+δ₂
        G::Copy => Circuit::tensor(&gen(G::Discard), &gen(G::Add)),
        // x ↦ 0
        G::Discard => seq(&gen(G::Discard), &gen(G::Zero)),
        // ((x₁,x₂), δ) ↦ (δ,δ); comparison uses the same straight-through rule
        G::Add | G::Compare => {
            Circuit::tensor_list([gen(G::Discard), gen(G::Discard), gen(G::Copy)])
        }
        // δ ↦ ()
        G::Zero | G::One | G::Const(_) => gen(G::Discard),
        // ((x₁,x₂), δ) ↦ (x₂·δ, x₁·δ)
        G::Mul => {
            let spread = Circuit::tensor(&Circuit::id(2), &gen(G::Copy));
            let route = Circuit::permutation(&[2, 0, 1, 3]).expect("a permutation of 4 wires");
            let mults = Circuit::tensor(&gen(G::Mul), &gen(G::Mul));
            Circuit::seq_list([spread, route, mults]).expect("product rule is well-shaped")
        }
        // (x, δ) ↦ neg(δ)
        G::Negate => Circuit::tensor(&gen(G::Discard), &gen(G::Negate)),
    }
}

/// Chain rule: with `f : m → k`, `g : k → n`,
/// `R[f;g](x, δ) = R[f](x, R[g](f(x), δ))`, laid out as
/// `(copy x) ; (run f on the second copy) ; (pull δ back through g) ; R[f]`.
fn reverse_seq(f: &Circuit, g: &Circuit, rf: &Circuit, rg: &Circuit) -> Circuit {
    let m = f.arity();
    let n = g.coarity();
    let dup = Circuit::tensor_list([Circuit::copy_n(m), Circuit::id(n)]);
    let apply_f = Circuit::tensor_list([Circuit::id(m), f.clone(), Circuit::id(n)]);
    let pull_g = Circuit::tensor_list([Circuit::id(m), rg.clone()]);
    Circuit::seq_list([dup, apply_f, pull_g, rf.clone()])
        .expect("chain-rule wiring is well-shaped")
}

/// Tensor rule: with `f : m₁ → n₁`, `g : m₂ → n₂`, route
/// `(x₁,x₂,δ₁,δ₂) ↦ (x₁,δ₁,x₂,δ₂)` and reverse the halves independently.
fn reverse_par(f: &Circuit, g: &Circuit, rf: &Circuit, rg: &Circuit) -> Circuit {
    let route = Circuit::tensor_list([
        Circuit::id(f.arity()),
        Circuit::swap_block(g.arity(), f.coarity()),
        Circuit::id(g.coarity()),
    ]);
    let halves = Circuit::tensor_list([rf.clone(), rg.clone()]);
    seq(&route, &halves)
}

/// The reverse derivative `reverse(c) : m+n → m` of `c : m → n`.
///
/// Total on the circuit language; negation is only rejected later, at
/// evaluation time, when the active semiring lacks it. Interior sharing in
/// `c` is preserved: each distinct subterm is reversed once.
pub fn reverse(c: &Circuit) -> Circuit {
    enum Task {
        Visit(Circuit),
        Build(Circuit),
    }
    let mut memo: HashMap<usize, Circuit> = HashMap::new();
    let mut stack = vec![Task::Visit(c.clone())];
    while let Some(task) = stack.pop() {
        match task {
            Task::Visit(c) => {
                if memo.contains_key(&c.key()) {
                    continue;
                }
                match c.node() {
                    Node::Gen(g) => {
                        memo.insert(c.key(), reverse_gen(*g));
                    }
                    Node::Seq(f, g) | Node::Par(f, g) => {
                        stack.push(Task::Build(c.clone()));
                        stack.push(Task::Visit(g.clone()));
                        stack.push(Task::Visit(f.clone()));
                    }
                }
            }
            Task::Build(c) => {
                if memo.contains_key(&c.key()) {
                    continue;
                }
                let rc = match c.node() {
                    Node::Gen(_) => unreachable!("generators are reversed at visit time"),
                    Node::Seq(f, g) => reverse_seq(f, g, &memo[&f.key()], &memo[&g.key()]),
                    Node::Par(f, g) => reverse_par(f, g, &memo[&f.key()], &memo[&g.key()]),
                };
                memo.insert(c.key(), rc);
            }
        }
    }
    memo.remove(&c.key()).expect("the root circuit was reversed")
}

/// The forward derivative `forward(c) : 2m → n`: inputs `(x, dx)`, output the
/// Jacobian of `c` at `x` applied to `dx`.
///
/// Built from the double reversal: feed `((x, 0ⁿ), dx)` to
/// `reverse(reverse(c)) : (m+n)+m → m+n` and keep the last `n` outputs.
pub fn forward(c: &Circuit) -> Circuit {
    let m = c.arity();
    let n = c.coarity();
    let rr = reverse(&reverse(c));
    let pad = Circuit::tensor_list([Circuit::id(m), Circuit::zero_n(n), Circuit::id(m)]);
    let strip = Circuit::tensor_list([Circuit::discard_n(m), Circuit::id(n)]);
    Circuit::seq_list([pad, rr, strip]).expect("forward wiring is well-shaped")
}

/// The augmented carrier of the direct forward transform: `aug(c) : 2a → 2b`
/// maps `(x, dx)` to `(c(x), D[c](x, dx))` with the base and change blocks
/// kept side by side.
fn aug_gen(g: Generator) -> Circuit {
    let gi = |g| Circuit::gen(g);
    match g {
        Generator::Identity => Circuit::id(2),
        Generator::Twist => {
            Circuit::permutation(&[1, 0, 3, 2]).expect("twist augmentation permutes 4 wires")
        }
        Generator::Add => Circuit::tensor(&gi(Generator::Add), &gi(Generator::Add)),
        Generator::Negate => Circuit::tensor(&gi(Generator::Negate), &gi(Generator::Negate)),
        Generator::Copy => Circuit::tensor(&gi(Generator::Copy), &gi(Generator::Copy)),
        Generator::Discard => Circuit::tensor(&gi(Generator::Discard), &gi(Generator::Discard)),
        Generator::Compare => Circuit::tensor(&gi(Generator::Compare), &gi(Generator::Add)),
        Generator::Zero => Circuit::tensor(&gi(Generator::Zero), &gi(Generator::Zero)),
        Generator::One => Circuit::tensor(&gi(Generator::One), &gi(Generator::Zero)),
        Generator::Const(s) => Circuit::tensor(&gi(Generator::Const(s)), &gi(Generator::Zero)),
        Generator::Mul => {
            // (x₁,x₂,d₁,d₂) ↦ (x₁x₂, x₁d₂ + x₂d₁), the product rule.
            let spread = Circuit::tensor_list([
                gi(Generator::Copy),
                gi(Generator::Copy),
                Circuit::id(2),
            ]);
            let align = Circuit::permutation(&[0, 2, 1, 4, 5, 3])
                .expect("product-rule alignment permutes 6 wires");
            let mults = Circuit::tensor_list([
                gi(Generator::Mul),
                gi(Generator::Mul),
                gi(Generator::Mul),
            ]);
            let fold = Circuit::tensor_list([Circuit::id(1), gi(Generator::Add)]);
            Circuit::seq_list([spread, align, mults, fold])
                .expect("product-rule wiring is well-shaped")
        }
    }
}

fn aug_seq(af: &Circuit, ag: &Circuit) -> Circuit {
    seq(af, ag)
}

fn aug_par(f: &Circuit, g: &Circuit, af: &Circuit, ag: &Circuit) -> Circuit {
    let (m1, n1) = (f.arity(), f.coarity());
    let (m2, n2) = (g.arity(), g.coarity());
    let gather = Circuit::tensor_list([
        Circuit::id(m1),
        Circuit::swap_block(m2, m1),
        Circuit::id(m2),
    ]);
    let scatter = Circuit::tensor_list([
        Circuit::id(n1),
        Circuit::swap_block(n1, n2),
        Circuit::id(n2),
    ]);
    Circuit::seq_list([gather, Circuit::tensor(af, ag), scatter])
        .expect("augmented tensor wiring is well-shaped")
}

/// The forward derivative built by direct structural rules instead of the
/// double reversal. Extensionally equal to [`forward`], but its size grows
/// linearly in the circuit, so verification sweeps can afford to evaluate it
/// once per case.
pub(crate) fn forward_direct(c: &Circuit) -> Circuit {
    enum Task {
        Visit(Circuit),
        Build(Circuit),
    }
    let mut memo: HashMap<usize, Circuit> = HashMap::new();
    let mut stack = vec![Task::Visit(c.clone())];
    while let Some(task) = stack.pop() {
        match task {
            Task::Visit(c) => {
                if memo.contains_key(&c.key()) {
                    continue;
                }
                match c.node() {
                    Node::Gen(g) => {
                        memo.insert(c.key(), aug_gen(*g));
                    }
                    Node::Seq(f, g) | Node::Par(f, g) => {
                        stack.push(Task::Build(c.clone()));
                        stack.push(Task::Visit(g.clone()));
                        stack.push(Task::Visit(f.clone()));
                    }
                }
            }
            Task::Build(c) => {
                if memo.contains_key(&c.key()) {
                    continue;
                }
                let ac = match c.node() {
                    Node::Gen(_) => unreachable!("generators are augmented at visit time"),
                    Node::Seq(f, g) => aug_seq(&memo[&f.key()], &memo[&g.key()]),
                    Node::Par(f, g) => aug_par(f, g, &memo[&f.key()], &memo[&g.key()]),
                };
                memo.insert(c.key(), ac);
            }
        }
    }
    let aug = memo.remove(&c.key()).expect("the root circuit was augmented");
    let strip = Circuit::tensor_list([Circuit::discard_n(c.coarity()), Circuit::id(c.coarity())]);
    seq(&aug, &strip)
}

/// Partial derivative with respect to the trailing input block: for
/// `c : a+b → n` with `split = a`, the result maps `((x_A,x_B), db)` to
/// `D[c]((x_A,x_B), (0ᵃ, db))` and has shape `(a+b)+b → n`.
pub fn partial(c: &Circuit, split: usize) -> Result<Circuit> {
    let total = c.arity();
    if split > total {
        return Err(Error::SplitOutOfRange { split, arity: total });
    }
    let b = total - split;
    let pad = Circuit::tensor_list([
        Circuit::id(total),
        Circuit::zero_n(split),
        Circuit::id(b),
    ]);
    Ok(seq(&pad, &forward(c)))
}

/// Whether `c`'s forward derivative ignores the base point and equals `c` on
/// the change: `D[c](x, dx) = c(dx)` for all `x`, `dx` in the carrier.
pub fn is_linear(desc: &Semiring, c: &Circuit) -> Result<bool> {
    let m = c.arity();
    let rhs = seq(&Circuit::proj_second(m, m), c);
    Ok(extensionally_equal(desc, &forward(c), &rhs)?.is_equal())
}

/// Whether `c : a+b → n` is linear in its trailing `b`-block:
/// `D_B[c]((x_A,x_B), db) = c(x_A, db)` for all values in the carrier.
pub fn is_linear_in(desc: &Semiring, c: &Circuit, split: usize) -> Result<bool> {
    let total = c.arity();
    if split > total {
        return Err(Error::SplitOutOfRange { split, arity: total });
    }
    let b = total - split;
    let keep = Circuit::tensor_list([
        Circuit::id(split),
        Circuit::discard_n(b),
        Circuit::id(b),
    ]);
    let rhs = seq(&keep, c);
    Ok(extensionally_equal(desc, &partial(c, split)?, &rhs)?.is_equal())
}

// ---------------------------------------------------------------------------
// Derivative interpreters (test oracles)
// ---------------------------------------------------------------------------
//
// Two interpreter value domains recompute the derivatives of this module's
// transformations in one pass over the *source* circuit, giving the tests an
// independent cross-check on the materialized terms:
//
// * dual numbers (v, dv): running a circuit on duals equals running its
//   `forward` on the tangents (first derivative);
// * second-order jets (v, dt, ds, dts), the coefficients of
//   `f(a + t·b + s·c + ts·d)` modulo t² = s² = 0: the `ts` coefficient is the
//   mixed second derivative b·H(a)·c + J(a)·d.
//
// They stay test-only deliberately. In particular, checking symmetry of the
// second derivative on jets would be vacuous — every jet product rule is
// symmetric in the two tangent directions by construction — so the axiom
// sweeps in the verification module run on materialized circuits instead.

#[cfg(test)]
struct DualEval<'a> {
    desc: &'a Semiring,
}

#[cfg(test)]
impl GenInterp for DualEval<'_> {
    type Val = (u64, u64);

    fn apply(&mut self, g: Generator, vals: &mut Vec<(u64, u64)>) -> Result<()> {
        let d = self.desc;
        match g {
            Generator::Add => {
                let ((v1, t1), (v2, t2)) = pop2(vals);
                vals.push((d.add(v1, v2)?, d.add(t1, t2)?));
            }
            Generator::Mul => {
                let ((v1, t1), (v2, t2)) = pop2(vals);
                let tangent = d.add(d.mul(v1, t2)?, d.mul(t1, v2)?)?;
                vals.push((d.mul(v1, v2)?, tangent));
            }
            Generator::Zero => vals.push((d.zero(), d.zero())),
            Generator::One => vals.push((d.one(), d.zero())),
            Generator::Const(s) => {
                d.check_value(s)?;
                vals.push((s, d.zero()));
            }
            Generator::Copy => {
                let v = pop1(vals);
                vals.push(v);
                vals.push(v);
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
                let ((v1, t1), (v2, t2)) = pop2(vals);
                let primal = if v1 == v2 { d.one() } else { d.zero() };
                // Straight-through: the change passes as through addition.
                vals.push((primal, d.add(t1, t2)?));
            }
            Generator::Negate => {
                let (v, t) = pop1(vals);
                vals.push((d.neg(v)?, d.neg(t)?));
            }
        }
        Ok(())
    }
}

/// Evaluate `c` on dual numbers: returns `(c(x), D[c](x, dx))` as the primal
/// and tangent parts.
#[cfg(test)]
fn eval_dual(
    desc: &Semiring,
    c: &Circuit,
    primal: &[u64],
    tangent: &[u64],
) -> Result<(Vec<u64>, Vec<u64>)> {
    if primal.len() != tangent.len() {
        return Err(Error::ShapeMismatch {
            left: Shape::new(0, primal.len()),
            right: Shape::new(0, tangent.len()),
            context: "dual evaluation input".into(),
        });
    }
    for &v in primal.iter().chain(tangent) {
        desc.check_value(v)?;
    }
    let input: Vec<(u64, u64)> = primal.iter().copied().zip(tangent.iter().copied()).collect();
    let out = run(&mut DualEval { desc }, c, input)?;
    Ok(out.into_iter().unzip())
}

/// A second-order jet: the coefficients of `v + dt·t + ds·s + dts·ts` with
/// `t² = s² = 0`.
#[cfg(test)]
type Jet2 = [u64; 4];

#[cfg(test)]
struct Jet2Eval<'a> {
    desc: &'a Semiring,
}

#[cfg(test)]
impl GenInterp for Jet2Eval<'_> {
    type Val = Jet2;

    fn apply(&mut self, g: Generator, vals: &mut Vec<Jet2>) -> Result<()> {
        let d = self.desc;
        match g {
            Generator::Add => {
                let (u, w) = pop2(vals);
                vals.push([
                    d.add(u[0], w[0])?,
                    d.add(u[1], w[1])?,
                    d.add(u[2], w[2])?,
                    d.add(u[3], w[3])?,
                ]);
            }
            Generator::Mul => {
                let (u, w) = pop2(vals);
                let v = d.mul(u[0], w[0])?;
                let dt = d.add(d.mul(u[0], w[1])?, d.mul(u[1], w[0])?)?;
                let ds = d.add(d.mul(u[0], w[2])?, d.mul(u[2], w[0])?)?;
                // Product rule for the ts term; the t·t and s·s products
                // vanish in the quotient.
                let dts = d.add(
                    d.add(d.mul(u[0], w[3])?, d.mul(u[1], w[2])?)?,
                    d.add(d.mul(u[2], w[1])?, d.mul(u[3], w[0])?)?,
                )?;
                vals.push([v, dt, ds, dts]);
            }
            Generator::Zero => vals.push([d.zero(); 4]),
            Generator::One => vals.push([d.one(), d.zero(), d.zero(), d.zero()]),
            Generator::Const(s) => {
                d.check_value(s)?;
                vals.push([s, d.zero(), d.zero(), d.zero()]);
            }
            Generator::Copy => {
                let v = pop1(vals);
                vals.push(v);
                vals.push(v);
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
                let (u, w) = pop2(vals);
                let primal = if u[0] == w[0] { d.one() } else { d.zero() };
                vals.push([
                    primal,
                    d.add(u[1], w[1])?,
                    d.add(u[2], w[2])?,
                    d.add(u[3], w[3])?,
                ]);
            }
            Generator::Negate => {
                let u = pop1(vals);
                vals.push([d.neg(u[0])?, d.neg(u[1])?, d.neg(u[2])?, d.neg(u[3])?]);
            }
        }
        Ok(())
    }
}

/// Evaluate `c` on second-order jets.
#[cfg(test)]
fn eval_jet2(desc: &Semiring, c: &Circuit, input: Vec<Jet2>) -> Result<Vec<Jet2>> {
    for jet in &input {
        for &v in jet {
            desc.check_value(v)?;
        }
    }
    run(&mut Jet2Eval { desc }, c, input)
}
