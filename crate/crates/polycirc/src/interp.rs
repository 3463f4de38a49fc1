//! A single iterative evaluation engine, generic over the value domain.
//!
//! Concrete evaluation, polynomial lifting, and the dual-number evaluators
//! all walk circuits the same way; only the meaning of each generator
//! differs. The engine here does the walking with an explicit frame stack so
//! that arbitrarily deep terms (reverse derivatives of reverse derivatives)
//! evaluate without touching the call stack.

use crate::circuit::{Circuit, Generator, Node, Shape};
use crate::error::{Error, Result};

/// Generator semantics over a value domain.
pub(crate) trait GenInterp {
    type Val: Clone;

    /// Pops the generator's inputs off the tail of `vals` (in wire order:
    /// last popped = first wire) and pushes its outputs.
    fn apply(&mut self, g: Generator, vals: &mut Vec<Self::Val>) -> Result<()>;
}

enum Frame {
    Enter(Circuit),
    /// A `Par` whose left half has been evaluated; fields are the right half,
    /// its arity, and the left half's coarity (the tail currently holds the
    /// right half's inputs below the left half's outputs).
    ParRight(Circuit, usize, usize),
}

/// Runs `c` on `input` under the given generator semantics.
///
/// Value-stack discipline: on entry to a subcircuit its inputs are the last
/// `arity` entries of `vals` in wire order; on exit they have been replaced
/// by its outputs. `Seq` is evaluated in tail position; `Par` rotates the
/// tail so each half sees its own inputs on top.
pub(crate) fn run<I: GenInterp>(
    interp: &mut I,
    c: &Circuit,
    input: Vec<I::Val>,
) -> Result<Vec<I::Val>> {
    if input.len() != c.arity() {
        return Err(Error::ShapeMismatch {
            left: Shape::new(0, input.len()),
            right: c.shape(),
            context: "evaluation input".into(),
        });
    }
    let mut vals = input;
    let mut stack = vec![Frame::Enter(c.clone())];
    while let Some(frame) = stack.pop() {
        match frame {
            Frame::Enter(c) => match c.node() {
                Node::Gen(g) => interp.apply(*g, &mut vals)?,
                Node::Seq(f, g) => {
                    stack.push(Frame::Enter(g.clone()));
                    stack.push(Frame::Enter(f.clone()));
                }
                Node::Par(f, g) => {
                    // Tail is (x1, x2); bring x1 to the top for f.
                    let (a1, a2) = (f.arity(), g.arity());
                    let len = vals.len();
                    vals[len - a1 - a2..].rotate_left(a1);
                    stack.push(Frame::ParRight(g.clone(), a2, f.coarity()));
                    stack.push(Frame::Enter(f.clone()));
                }
            },
            Frame::ParRight(g, a2, n1) => {
                // Tail is (x2, f_out); bring x2 to the top for g. Afterwards
                // the tail reads (f_out, g_out), which is the Par output.
                let len = vals.len();
                vals[len - a2 - n1..].rotate_left(a2);
                stack.push(Frame::Enter(g));
            }
        }
    }
    debug_assert_eq!(vals.len(), c.coarity());
    Ok(vals)
}

/// Pops `n` values off the tail in wire order.
pub(crate) fn pop2<V>(vals: &mut Vec<V>) -> (V, V) {
    let b = vals.pop().expect("arity checked by construction");
    let a = vals.pop().expect("arity checked by construction");
    (a, b)
}

pub(crate) fn pop1<V>(vals: &mut Vec<V>) -> V {
    vals.pop().expect("arity checked by construction")
}
