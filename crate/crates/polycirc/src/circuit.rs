//! The circuit IR: a typed term language over a fixed generator set.
//!
//! A [`Circuit`] is an immutable tree of generators combined by sequential
//! composition (`Seq`, diagrammatic order: `f` then `g`) and parallel
//! composition (`Par`). Every node caches its [`Shape`] (input/output wire
//! counts), so construction is where shape errors surface and everything
//! downstream can assume well-typedness.
//!
//! Subterms are reference-counted and freely shared; the derivative
//! transformations in [`crate::rdiff`] lean on that sharing heavily, so the
//! traversals here (equality, sizes, printing) are all iterative and safe on
//! very deep terms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Wire counts of a circuit: `arity` inputs, `coarity` outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    pub arity: usize,
    pub coarity: usize,
}

impl Shape {
    pub const fn new(arity: usize, coarity: usize) -> Shape {
        Shape { arity, coarity }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.arity, self.coarity)
    }
}

/// The generators. `Const` carries a carrier code; whether `Negate` (and, for
/// polynomial interpretations, `Compare`) is meaningful depends on the active
/// semiring and is checked at evaluation time, not construction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `2->1`, semiring addition.
    Add,
    /// `0->1`, the additive unit.
    Zero,
    /// `2->1`, semiring multiplication.
    Mul,
    /// `0->1`, the multiplicative unit.
    One,
    /// `1->2`, duplication.
    Copy,
    /// `1->0`, deletion.
    Discard,
    /// `1->1`.
    Identity,
    /// `2->2`, wire crossing.
    Twist,
    /// `0->1`, an embedded carrier element.
    Const(u64),
    /// `2->1`, equality test: `1` if the inputs agree, else `0`.
    Compare,
    /// `1->1`, additive inverse (rings only).
    Negate,
}

impl Generator {
    pub fn shape(&self) -> Shape {
        match self {
            Generator::Add | Generator::Mul | Generator::Compare => Shape::new(2, 1),
            Generator::Zero | Generator::One | Generator::Const(_) => Shape::new(0, 1),
            Generator::Copy => Shape::new(1, 2),
            Generator::Discard => Shape::new(1, 0),
            Generator::Identity | Generator::Negate => Shape::new(1, 1),
            Generator::Twist => Shape::new(2, 2),
        }
    }

    /// Surface-syntax name (shared by the DSL and the JSON encoding).
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Add => "add",
            Generator::Zero => "zero",
            Generator::Mul => "mul",
            Generator::One => "one",
            Generator::Copy => "copy",
            Generator::Discard => "discard",
            Generator::Identity => "id",
            Generator::Twist => "swap",
            Generator::Const(_) => "const",
            Generator::Compare => "eq",
            Generator::Negate => "neg",
        }
    }

    /// Inverse of [`Generator::name`] for the nullary-or-fixed generators;
    /// `const` is handled by the parsers themselves (it carries an argument).
    pub fn from_name(name: &str) -> Option<Generator> {
        Some(match name {
            "add" => Generator::Add,
            "zero" => Generator::Zero,
            "mul" => Generator::Mul,
            "one" => Generator::One,
            "copy" => Generator::Copy,
            "discard" => Generator::Discard,
            "id" => Generator::Identity,
            "swap" => Generator::Twist,
            "eq" => Generator::Compare,
            "neg" => Generator::Negate,
            _ => return None,
        })
    }
}

/// One constructor's worth of structure.
#[derive(Debug, Clone)]
pub enum Node {
    Gen(Generator),
    Seq(Circuit, Circuit),
    Par(Circuit, Circuit),
}

struct Inner {
    node: Node,
    shape: Shape,
}

/// Recursive drops would overflow the stack on the very deep chains the
/// derivative transformations produce, so tear terms down with a worklist.
impl Drop for Inner {
    fn drop(&mut self) {
        let mut stack: Vec<Circuit> = Vec::new();
        match std::mem::replace(&mut self.node, Node::Gen(Generator::Identity)) {
            Node::Gen(_) => {}
            Node::Seq(a, b) | Node::Par(a, b) => {
                stack.push(a);
                stack.push(b);
            }
        }
        while let Some(Circuit(arc)) = stack.pop() {
            if let Some(inner) = Arc::into_inner(arc) {
                let mut inner = inner;
                match std::mem::replace(&mut inner.node, Node::Gen(Generator::Identity)) {
                    Node::Gen(_) => {}
                    Node::Seq(a, b) | Node::Par(a, b) => {
                        stack.push(a);
                        stack.push(b);
                    }
                }
            }
        }
    }
}

/// An immutable, cheaply clonable circuit term.
#[derive(Clone)]
pub struct Circuit(Arc<Inner>);

impl Circuit {
    /// A single generator.
    pub fn gen(g: Generator) -> Circuit {
        Circuit(Arc::new(Inner { node: Node::Gen(g), shape: g.shape() }))
    }

    /// Sequential composition `f ; g` (run `f`, feed its outputs to `g`).
    pub fn compose(f: &Circuit, g: &Circuit) -> Result<Circuit> {
        if f.coarity() != g.arity() {
            return Err(Error::ShapeMismatch {
                left: f.shape(),
                right: g.shape(),
                context: "compose".into(),
            });
        }
        let shape = Shape::new(f.arity(), g.coarity());
        Ok(Circuit(Arc::new(Inner { node: Node::Seq(f.clone(), g.clone()), shape })))
    }

    /// Parallel composition `f * g` (side by side, `f` on the upper wires).
    pub fn tensor(f: &Circuit, g: &Circuit) -> Circuit {
        let shape = Shape::new(f.arity() + g.arity(), f.coarity() + g.coarity());
        Circuit(Arc::new(Inner { node: Node::Par(f.clone(), g.clone()), shape }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
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

    /// Stable key for pointer-identity memoization over shared subterms.
    pub(crate) fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    // ---- derived constructors -------------------------------------------

    /// The empty circuit `0->0` (canonically `zero ; discard`).
    pub fn empty() -> Circuit {
        Circuit::compose(&Circuit::gen(Generator::Zero), &Circuit::gen(Generator::Discard))
            .expect("zero;discard is well-shaped")
    }

    /// `n` identity wires.
    pub fn id(n: usize) -> Circuit {
        Circuit::tensor_list((0..n).map(|_| Circuit::gen(Generator::Identity)))
    }

    /// Block duplication `n -> 2n`: `(x) -> (x, x)` with the two copies laid
    /// out block-wise, so `copy_n(2)` maps `(a,b)` to `(a,b,a,b)`.
    pub fn copy_n(n: usize) -> Circuit {
        if n == 0 {
            return Circuit::empty();
        }
        if n == 1 {
            return Circuit::gen(Generator::Copy);
        }
        // (Copy * copy_{n-1}) ; (id1 * swap_block(1, n-1) * id_{n-1})
        let head = Circuit::tensor(&Circuit::gen(Generator::Copy), &Circuit::copy_n(n - 1));
        let fixup = Circuit::pad_tensor(1, &Circuit::swap_block(1, n - 1), n - 1);
        Circuit::compose(&head, &fixup).expect("copy_n wiring is well-shaped")
    }

    /// Block addition `2n -> n`: `(x, y) -> x + y` componentwise.
    pub fn add_n(n: usize) -> Circuit {
        if n == 0 {
            return Circuit::empty();
        }
        if n == 1 {
            return Circuit::gen(Generator::Add);
        }
        // (id1 * swap_block(n-1, 1) * id_{n-1}) ; (Add * add_{n-1})
        let fixup = Circuit::pad_tensor(1, &Circuit::swap_block(n - 1, 1), n - 1);
        let tail = Circuit::tensor(&Circuit::gen(Generator::Add), &Circuit::add_n(n - 1));
        Circuit::compose(&fixup, &tail).expect("add_n wiring is well-shaped")
    }

    /// `n` zero wires, `0 -> n`.
    pub fn zero_n(n: usize) -> Circuit {
        Circuit::tensor_list((0..n).map(|_| Circuit::gen(Generator::Zero)))
    }

    /// Deletes `n` wires, `n -> 0`.
    pub fn discard_n(n: usize) -> Circuit {
        Circuit::tensor_list((0..n).map(|_| Circuit::gen(Generator::Discard)))
    }

    /// Exchanges a leading `m`-block with a trailing `n`-block.
    pub fn swap_block(m: usize, n: usize) -> Circuit {
        let perm: Vec<usize> = (0..m).map(|i| n + i).chain(0..n).collect();
        Circuit::permutation(&perm).expect("block swap is a permutation")
    }

    /// Keeps the first `m` of `m+n` wires.
    pub fn proj_first(m: usize, n: usize) -> Circuit {
        Circuit::tensor_list([Circuit::id(m), Circuit::discard_n(n)])
    }

    /// Keeps the last `n` of `m+n` wires.
    pub fn proj_second(m: usize, n: usize) -> Circuit {
        Circuit::tensor_list([Circuit::discard_n(m), Circuit::id(n)])
    }

    /// `0 -> k` constant tuple.
    pub fn const_tuple(values: &[u64]) -> Circuit {
        Circuit::tensor_list(values.iter().map(|&v| Circuit::gen(Generator::Const(v))))
    }

    /// The wire permutation sending input `i` to output position `perm[i]`,
    /// realized as the bubble-sort sequence of adjacent twists (deterministic
    /// canonical form; the identity permutation yields plain `id`).
    pub fn permutation(perm: &[usize]) -> Result<Circuit> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::Invalid(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut arr: Vec<usize> = perm.to_vec();
        let mut layers: Vec<Circuit> = Vec::new();
        let mut swapped = true;
        while swapped {
            swapped = false;
            for k in 0..n.saturating_sub(1) {
                if arr[k] > arr[k + 1] {
                    arr.swap(k, k + 1);
                    layers.push(Circuit::pad_tensor(k, &Circuit::gen(Generator::Twist), n - k - 2));
                    swapped = true;
                }
            }
        }
        if layers.is_empty() {
            return Ok(Circuit::id(n));
        }
        Ok(Circuit::seq_list(layers).expect("twist layers share the wire count"))
    }

    /// Right-nested tensor of the given circuits; zero-wire terms are skipped
    /// and an empty product is the empty circuit.
    pub fn tensor_list<I>(parts: I) -> Circuit
    where
        I: IntoIterator<Item = Circuit>,
    {
        let parts: Vec<Circuit> = parts
            .into_iter()
            .filter(|c| c.arity() != 0 || c.coarity() != 0)
            .collect();
        match parts.len() {
            0 => Circuit::empty(),
            _ => {
                let mut it = parts.into_iter().rev();
                let mut acc = it.next().unwrap();
                for c in it {
                    acc = Circuit::tensor(&c, &acc);
                }
                acc
            }
        }
    }

    /// Right-nested sequential composition of a non-empty list.
    pub fn seq_list<I>(parts: I) -> Result<Circuit>
    where
        I: IntoIterator<Item = Circuit>,
    {
        let parts: Vec<Circuit> = parts.into_iter().collect();
        let mut it = parts.into_iter().rev();
        let mut acc = it
            .next()
            .ok_or_else(|| Error::Invalid("seq_list of no circuits".into()))?;
        for c in it {
            acc = Circuit::compose(&c, &acc)?;
        }
        Ok(acc)
    }

    /// `id(left) * c * id(right)` with zero-width pads skipped.
    pub fn pad_tensor(left: usize, c: &Circuit, right: usize) -> Circuit {
        Circuit::tensor_list([Circuit::id(left), c.clone(), Circuit::id(right)])
    }

    // ---- measurements ----------------------------------------------------

    /// Number of generator occurrences counted over the *unfolded* tree
    /// (shared subterms count once per occurrence). Saturates at `u128::MAX`.
    pub fn tree_size(&self) -> u128 {
        let mut memo: HashMap<usize, u128> = HashMap::new();
        let mut stack: Vec<(Circuit, bool)> = vec![(self.clone(), false)];
        while let Some((c, ready)) = stack.pop() {
            if memo.contains_key(&c.key()) {
                continue;
            }
            match c.node() {
                Node::Gen(_) => {
                    memo.insert(c.key(), 1);
                }
                Node::Seq(a, b) | Node::Par(a, b) => {
                    if ready {
                        let sa = memo[&a.key()];
                        let sb = memo[&b.key()];
                        memo.insert(c.key(), sa.saturating_add(sb));
                    } else {
                        stack.push((c.clone(), true));
                        stack.push((a.clone(), false));
                        stack.push((b.clone(), false));
                    }
                }
            }
        }
        memo[&self.key()]
    }

    /// Number of *distinct* nodes (the term graph size under sharing).
    pub fn dag_size(&self) -> usize {
        let mut seen: HashMap<usize, ()> = HashMap::new();
        let mut stack = vec![self.clone()];
        while let Some(c) = stack.pop() {
            if seen.insert(c.key(), ()).is_some() {
                continue;
            }
            if let Node::Seq(a, b) | Node::Par(a, b) = c.node() {
                stack.push(a.clone());
                stack.push(b.clone());
            }
        }
        seen.len()
    }
}

/// Structural equality, iterative and pruned by pointer identity so that it
/// stays cheap (and stack-safe) on heavily shared derivative outputs.
impl PartialEq for Circuit {
    fn eq(&self, other: &Circuit) -> bool {
        let mut stack = vec![(self.clone(), other.clone())];
        while let Some((a, b)) = stack.pop() {
            if Arc::ptr_eq(&a.0, &b.0) {
                continue;
            }
            if a.shape() != b.shape() {
                return false;
            }
            match (a.node(), b.node()) {
                (Node::Gen(x), Node::Gen(y)) => {
                    if x != y {
                        return false;
                    }
                }
                (Node::Seq(x1, x2), Node::Seq(y1, y2))
                | (Node::Par(x1, x2), Node::Par(y1, y2)) => {
                    stack.push((x1.clone(), y1.clone()));
                    stack.push((x2.clone(), y2.clone()));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Circuit {}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Tok {
            C(Circuit),
            S(&'static str),
        }
        write!(f, "Circuit[{}] ", self.shape())?;
        let mut stack = vec![Tok::C(self.clone())];
        let mut budget = 80usize;
        while let Some(tok) = stack.pop() {
            match tok {
                Tok::S(s) => f.write_str(s)?,
                Tok::C(c) => {
                    if budget == 0 {
                        f.write_str("...")?;
                        break;
                    }
                    budget -= 1;
                    match c.node() {
                        Node::Gen(Generator::Const(v)) => write!(f, "const({v})")?,
                        Node::Gen(g) => f.write_str(g.name())?,
                        Node::Seq(a, b) => {
                            f.write_str("(")?;
                            stack.push(Tok::S(")"));
                            stack.push(Tok::C(b.clone()));
                            stack.push(Tok::S(" ; "));
                            stack.push(Tok::C(a.clone()));
                        }
                        Node::Par(a, b) => {
                            f.write_str("(")?;
                            stack.push(Tok::S(")"));
                            stack.push(Tok::C(b.clone()));
                            stack.push(Tok::S(" * "));
                            stack.push(Tok::C(a.clone()));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_shapes() {
        assert_eq!(Generator::Add.shape(), Shape::new(2, 1));
        assert_eq!(Generator::Copy.shape(), Shape::new(1, 2));
        assert_eq!(Generator::Const(3).shape(), Shape::new(0, 1));
        assert_eq!(Generator::Twist.shape(), Shape::new(2, 2));
    }

    #[test]
    fn compose_checks_shapes() {
        let id1 = Circuit::gen(Generator::Identity);
        let seq = Circuit::compose(&id1, &id1).unwrap();
        assert_eq!(seq.shape(), Shape::new(1, 1));
        assert!(matches!(seq.node(), Node::Seq(_, _)));

        let add = Circuit::gen(Generator::Add);
        let err = Circuit::compose(&add, &add).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn derived_constructor_shapes() {
        for n in 0..5 {
            assert_eq!(Circuit::id(n).shape(), Shape::new(n, n));
            assert_eq!(Circuit::copy_n(n).shape(), Shape::new(n, 2 * n));
            assert_eq!(Circuit::add_n(n).shape(), Shape::new(2 * n, n));
            assert_eq!(Circuit::zero_n(n).shape(), Shape::new(0, n));
            assert_eq!(Circuit::discard_n(n).shape(), Shape::new(n, 0));
        }
        assert_eq!(Circuit::swap_block(2, 3).shape(), Shape::new(5, 5));
        assert_eq!(Circuit::proj_first(2, 3).shape(), Shape::new(5, 2));
        assert_eq!(Circuit::proj_second(2, 3).shape(), Shape::new(5, 3));
        assert_eq!(Circuit::const_tuple(&[1, 0, 2]).shape(), Shape::new(0, 3));
        assert_eq!(Circuit::empty().shape(), Shape::new(0, 0));
    }

    #[test]
    fn permutation_rejects_non_permutations() {
        assert!(Circuit::permutation(&[0, 0]).is_err());
        assert!(Circuit::permutation(&[1, 2]).is_err());
        assert_eq!(Circuit::permutation(&[0, 1, 2]).unwrap(), Circuit::id(3));
    }

    #[test]
    fn structural_equality_distinguishes_nesting() {
        let a = Circuit::gen(Generator::Identity);
        let left = Circuit::compose(&Circuit::compose(&a, &a).unwrap(), &a).unwrap();
        let right = Circuit::compose(&a, &Circuit::compose(&a, &a).unwrap()).unwrap();
        assert_ne!(left, right);
        assert_eq!(left, left.clone());
        let rebuilt = Circuit::compose(&Circuit::compose(&a, &a).unwrap(), &a).unwrap();
        assert_eq!(left, rebuilt);
    }

    #[test]
    fn sizes_track_sharing() {
        let add = Circuit::gen(Generator::Add);
        let pair = Circuit::tensor(&add, &add);
        let big = Circuit::tensor(&pair, &pair);
        assert_eq!(big.tree_size(), 4);
        // add, pair, big: shared nodes counted once.
        assert_eq!(big.dag_size(), 3);
    }

    #[test]
    fn deep_chains_do_not_overflow_the_stack() {
        let mut c = Circuit::gen(Generator::Identity);
        for _ in 0..200_000 {
            c = Circuit::compose(&c, &Circuit::gen(Generator::Identity)).unwrap();
        }
        assert_eq!(c.tree_size(), 200_001);
        assert_eq!(c, c.clone());
        let _ = format!("{c:?}");
    }
}
