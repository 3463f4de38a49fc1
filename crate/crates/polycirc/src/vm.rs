//! Compiled evaluation for hot verification sweeps.
//!
//! The structural interpreter re-walks a circuit's term tree on every call,
//! allocating frames as it goes; axiom sweeps evaluate the same circuit on
//! tens of thousands of inputs, where that overhead dominates. [`compile`]
//! flattens a term once and [`Compiled::run_buf`] replays it per input.
//!
//! Lowering simulates the wire stack symbolically: wires are register ids,
//! and the structural generators — identities, twists, block rotations,
//! copies, discards — only rearrange ids at compile time, costing nothing at
//! run time. Only semantic operations survive as instructions over a flat
//! register file, written in single-assignment order, and a final liveness
//! pass prunes instructions whose results cannot reach an output (reversed
//! and doubly-differentiated terms discard large sub-computations).
//!
//! Lowering is generic over [`Lowerable`] so that verification circuits
//! carrying an opaque extension generator compile to the same programs, with
//! the extension dispatched through a caller-supplied hook.

use std::collections::HashMap;

use crate::circuit::{Circuit, Generator, Node, Shape};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

/// One instruction: an operation on register ids and the register its result
/// is written to. Constants are resolved at compile time.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Instr {
    Const { dst: u32, value: u64 },
    Add { dst: u32, a: u32, b: u32 },
    Mul { dst: u32, a: u32, b: u32 },
    Eq { dst: u32, a: u32, b: u32 },
    Neg { dst: u32, a: u32 },
    /// Apply the opaque generator via the hook: reads `args`, writes the
    /// `outs` registers starting at `dst`.
    Opaque { dst: u32, outs: u32, args: Box<[u32]> },
}

/// A term shape the compiler can lower: a generator leaf, an opaque leaf, or
/// a sequential/parallel composite.
pub(crate) enum LowerNode<T> {
    Gen(Generator),
    Opaque { args: usize, outs: usize },
    Seq(T, T),
    Par(T, T),
}

pub(crate) trait Lowerable: Clone {
    fn shape(&self) -> Shape;
    fn view(&self) -> LowerNode<Self>;
}

impl Lowerable for Circuit {
    fn shape(&self) -> Shape {
        Circuit::shape(self)
    }

    fn view(&self) -> LowerNode<Circuit> {
        match self.node() {
            Node::Gen(g) => LowerNode::Gen(*g),
            Node::Seq(f, g) => LowerNode::Seq(f.clone(), g.clone()),
            Node::Par(f, g) => LowerNode::Par(f.clone(), g.clone()),
        }
    }
}

/// Evaluation callback for the opaque generator.
pub(crate) type OpaqueHook<'a> = dyn Fn(&Semiring, &[u64]) -> Result<Vec<u64>> + 'a;

#[derive(Debug)]
pub(crate) struct Compiled {
    arity: usize,
    coarity: usize,
    /// Register-file size: the inputs followed by every instruction result.
    slots: usize,
    instrs: Vec<Instr>,
    /// Registers holding the outputs, in wire order.
    outputs: Vec<u32>,
}

fn intern_const(
    value: u64,
    consts: &mut HashMap<u64, u32>,
    instrs: &mut Vec<Instr>,
    slots: &mut u32,
) -> u32 {
    match consts.get(&value) {
        Some(&id) => id,
        None => {
            let dst = *slots;
            instrs.push(Instr::Const { dst, value });
            consts.insert(value, dst);
            *slots += 1;
            dst
        }
    }
}

/// Flatten a term into a register program.
pub(crate) fn compile<T: Lowerable>(desc: &Semiring, c: &T) -> Result<Compiled> {
    enum Task<T> {
        Node(T),
        Roll { depth: usize, split: usize },
    }

    let shape = c.shape();
    let mut instrs: Vec<Instr> = Vec::new();
    let mut wires: Vec<u32> = (0..shape.arity as u32).collect();
    let mut slots = shape.arity as u32;
    let mut consts: HashMap<u64, u32> = HashMap::new();
    let mut stack = vec![Task::Node(c.clone())];
    while let Some(task) = stack.pop() {
        let t = match task {
            Task::Roll { depth, split } => {
                if depth > 1 && split % depth > 0 {
                    let at = wires.len() - depth;
                    wires[at..].rotate_right(split % depth);
                }
                continue;
            }
            Task::Node(t) => t,
        };
        match t.view() {
            LowerNode::Gen(g) => match g {
                Generator::Identity => {}
                Generator::Twist => {
                    let len = wires.len();
                    wires.swap(len - 1, len - 2);
                }
                Generator::Copy => {
                    let top = *wires.last().expect("copy has an input wire");
                    wires.push(top);
                }
                Generator::Discard => {
                    wires.pop().expect("discard has an input wire");
                }
                Generator::Add | Generator::Mul | Generator::Compare => {
                    let b = wires.pop().expect("binary generator has two input wires");
                    let a = wires.pop().expect("binary generator has two input wires");
                    let dst = slots;
                    instrs.push(match g {
                        Generator::Add => Instr::Add { dst, a, b },
                        Generator::Mul => Instr::Mul { dst, a, b },
                        _ => Instr::Eq { dst, a, b },
                    });
                    wires.push(dst);
                    slots += 1;
                }
                Generator::Negate => {
                    if !desc.has_neg() {
                        return Err(Error::UnsupportedGenerator {
                            gen: "neg".into(),
                            semiring: desc.id().into(),
                        });
                    }
                    let a = wires.pop().expect("negation has an input wire");
                    let dst = slots;
                    instrs.push(Instr::Neg { dst, a });
                    wires.push(dst);
                    slots += 1;
                }
                Generator::Zero => {
                    let id = intern_const(desc.zero(), &mut consts, &mut instrs, &mut slots);
                    wires.push(id);
                }
                Generator::One => {
                    let id = intern_const(desc.one(), &mut consts, &mut instrs, &mut slots);
                    wires.push(id);
                }
                Generator::Const(s) => {
                    desc.check_value(s)?;
                    let id = intern_const(s, &mut consts, &mut instrs, &mut slots);
                    wires.push(id);
                }
            },
            LowerNode::Opaque { args, outs } => {
                let at = wires.len() - args;
                let argv: Box<[u32]> = wires[at..].to_vec().into_boxed_slice();
                wires.truncate(at);
                instrs.push(Instr::Opaque { dst: slots, outs: outs as u32, args: argv });
                for k in 0..outs as u32 {
                    wires.push(slots + k);
                }
                slots += outs as u32;
            }
            LowerNode::Seq(f, g) => {
                stack.push(Task::Node(g));
                stack.push(Task::Node(f));
            }
            LowerNode::Par(f, g) => {
                let (fs, gs) = (f.shape(), g.shape());
                // Processed order: g on the top block, rotate g's outputs
                // below f's untouched inputs, then f, then rotate back.
                stack.push(Task::Roll {
                    depth: fs.coarity + gs.coarity,
                    split: fs.coarity,
                });
                stack.push(Task::Node(f));
                stack.push(Task::Roll { depth: fs.arity + gs.coarity, split: gs.coarity });
                stack.push(Task::Node(g));
            }
        }
    }
    debug_assert_eq!(wires.len(), shape.coarity);
    Ok(prune(Compiled {
        arity: shape.arity,
        coarity: shape.coarity,
        slots: slots as usize,
        instrs,
        outputs: wires,
    }))
}

/// Drop instructions whose results cannot reach an output and pack the
/// surviving registers. Input registers keep their slots so that loading a
/// case stays a plain copy.
fn prune(c: Compiled) -> Compiled {
    let mut live = vec![false; c.slots];
    for &o in &c.outputs {
        live[o as usize] = true;
    }
    let mut keep = vec![false; c.instrs.len()];
    for (i, instr) in c.instrs.iter().enumerate().rev() {
        let wanted = match instr {
            Instr::Const { dst, .. }
            | Instr::Add { dst, .. }
            | Instr::Mul { dst, .. }
            | Instr::Eq { dst, .. }
            | Instr::Neg { dst, .. } => live[*dst as usize],
            Instr::Opaque { dst, outs, .. } => (*dst..*dst + *outs).any(|s| live[s as usize]),
        };
        if !wanted {
            continue;
        }
        keep[i] = true;
        match instr {
            Instr::Const { .. } => {}
            Instr::Add { a, b, .. } | Instr::Mul { a, b, .. } | Instr::Eq { a, b, .. } => {
                live[*a as usize] = true;
                live[*b as usize] = true;
            }
            Instr::Neg { a, .. } => live[*a as usize] = true,
            Instr::Opaque { args, .. } => {
                for &a in args.iter() {
                    live[a as usize] = true;
                }
            }
        }
    }
    let mut map: Vec<u32> = vec![u32::MAX; c.slots];
    for (i, slot) in map.iter_mut().enumerate().take(c.arity) {
        *slot = i as u32;
    }
    let mut next = c.arity as u32;
    let mut instrs = Vec::with_capacity(keep.iter().filter(|&&k| k).count());
    for (i, instr) in c.instrs.into_iter().enumerate() {
        if !keep[i] {
            continue;
        }
        instrs.push(match instr {
            Instr::Const { dst, value } => {
                map[dst as usize] = next;
                next += 1;
                Instr::Const { dst: next - 1, value }
            }
            Instr::Add { dst, a, b } => {
                map[dst as usize] = next;
                next += 1;
                Instr::Add { dst: next - 1, a: map[a as usize], b: map[b as usize] }
            }
            Instr::Mul { dst, a, b } => {
                map[dst as usize] = next;
                next += 1;
                Instr::Mul { dst: next - 1, a: map[a as usize], b: map[b as usize] }
            }
            Instr::Eq { dst, a, b } => {
                map[dst as usize] = next;
                next += 1;
                Instr::Eq { dst: next - 1, a: map[a as usize], b: map[b as usize] }
            }
            Instr::Neg { dst, a } => {
                map[dst as usize] = next;
                next += 1;
                Instr::Neg { dst: next - 1, a: map[a as usize] }
            }
            Instr::Opaque { dst, outs, args } => {
                let base = next;
                for k in 0..outs {
                    map[(dst + k) as usize] = base + k;
                }
                next += outs;
                Instr::Opaque {
                    dst: base,
                    outs,
                    args: args.iter().map(|&a| map[a as usize]).collect(),
                }
            }
        });
    }
    let outputs = c.outputs.iter().map(|&o| map[o as usize]).collect();
    Compiled {
        arity: c.arity,
        coarity: c.coarity,
        slots: next as usize,
        instrs,
        outputs,
    }
}

impl Compiled {
    /// Run the program on the wires in `stack` (exactly `arity` values),
    /// leaving the `coarity` outputs there. Input codes are assumed valid for
    /// the carrier. Values feeding only discarded wires are never computed.
    pub(crate) fn run_buf(
        &self,
        desc: &Semiring,
        stack: &mut Vec<u64>,
        hook: Option<&OpaqueHook>,
    ) -> Result<()> {
        if stack.len() != self.arity {
            return Err(Error::ShapeMismatch {
                left: Shape::new(0, stack.len()),
                right: Shape::new(self.arity, self.coarity),
                context: "compiled evaluation input".into(),
            });
        }
        let mut regs = vec![0u64; self.slots];
        regs[..self.arity].copy_from_slice(stack);
        for instr in &self.instrs {
            match instr {
                &Instr::Const { dst, value } => regs[dst as usize] = value,
                &Instr::Add { dst, a, b } => {
                    regs[dst as usize] = desc.add(regs[a as usize], regs[b as usize])?;
                }
                &Instr::Mul { dst, a, b } => {
                    regs[dst as usize] = desc.mul(regs[a as usize], regs[b as usize])?;
                }
                &Instr::Eq { dst, a, b } => {
                    regs[dst as usize] = if regs[a as usize] == regs[b as usize] {
                        desc.one()
                    } else {
                        desc.zero()
                    };
                }
                &Instr::Neg { dst, a } => {
                    regs[dst as usize] = desc.neg(regs[a as usize])?;
                }
                Instr::Opaque { dst, outs, args } => {
                    let hook = hook.ok_or_else(|| {
                        Error::Invalid("compiled program needs an extension hook".into())
                    })?;
                    let argv: Vec<u64> = args.iter().map(|&a| regs[a as usize]).collect();
                    let res = hook(desc, &argv)?;
                    if res.len() != *outs as usize {
                        return Err(Error::Invalid(
                            "extension hook returned the wrong number of outputs".into(),
                        ));
                    }
                    for (k, v) in res.into_iter().enumerate() {
                        regs[*dst as usize + k] = v;
                    }
                }
            }
        }
        stack.clear();
        stack.extend(self.outputs.iter().map(|&o| regs[o as usize]));
        Ok(())
    }

    /// Convenience wrapper allocating a fresh buffer.
    pub(crate) fn run(&self, desc: &Semiring, input: &[u64]) -> Result<Vec<u64>> {
        let mut stack = input.to_vec();
        self.run_buf(desc, &mut stack, None)?;
        Ok(stack)
    }
}
