//! Seeded random circuits and inputs for the verification suites.
//!
//! Circuits are grown as a sequence of single-generator layers: starting from
//! `id(m)`, each step picks an applicable generator, a horizontal position,
//! and composes `id(p) * g * id(rest)` onto the end. Every intermediate is
//! well-shaped by construction, so sampling never needs to retry or bridge
//! mismatched shapes, and the final width is trimmed down to the configured
//! coarity cap with discards.
//!
//! The node budget counts semantic generators — everything except the
//! identity wires used as padding. All sampling is deterministic in the
//! caller's RNG; suites record the seed they started from.

use rand::Rng;

use crate::circuit::{Circuit, Generator, Node};
use crate::semiring::Semiring;

/// Shape and content caps for [`random_circuit`].
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    /// Maximum number of non-identity generators, counting the trailing
    /// discards that trim the width down to `max_coarity`. Raised internally
    /// when a requested arity makes some amount of trimming unavoidable.
    pub max_nodes: usize,
    /// Maximum input arity (the arity is sampled once, up front).
    pub max_arity: usize,
    /// Maximum output arity (enforced by trailing discards).
    pub max_coarity: usize,
    /// Cap on the intermediate wire count.
    pub max_width: usize,
    /// Whether comparison may appear.
    pub allow_compare: bool,
    /// Whether negation may appear (ignored unless the semiring has it).
    pub allow_negate: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            max_nodes: 20,
            max_arity: 3,
            max_coarity: 2,
            max_width: 6,
            allow_compare: false,
            allow_negate: false,
        }
    }
}

/// Sample a random constant code: anywhere in a finite carrier, small for
/// `nat`.
fn random_code(desc: &Semiring, rng: &mut impl Rng) -> u64 {
    match desc.size() {
        Some(n) => rng.gen_range(0..n),
        None => rng.gen_range(0..8),
    }
}

/// Sample a random input tuple for an `len`-ary circuit.
pub fn random_input(desc: &Semiring, len: usize, rng: &mut impl Rng) -> Vec<u64> {
    (0..len).map(|_| random_code(desc, rng)).collect()
}

/// Sample a circuit with a random arity within the caps.
pub fn random_circuit(desc: &Semiring, cfg: &SamplerConfig, rng: &mut impl Rng) -> Circuit {
    let arity = rng.gen_range(0..=cfg.max_arity);
    random_circuit_with_arity(desc, cfg, arity, rng)
}

/// Sample a circuit with the given input arity.
pub fn random_circuit_with_arity(
    desc: &Semiring,
    cfg: &SamplerConfig,
    arity: usize,
    rng: &mut impl Rng,
) -> Circuit {
    let budget = cfg.max_nodes.max(arity.saturating_sub(cfg.max_coarity));
    let target = rng.gen_range(1..=budget.max(1));
    // Deferred seed: `id(0)` desugars to `zero ; discard`, which would charge
    // two phantom nodes to every zero-arity sample, so the first layer of an
    // arity-0 circuit stands on its own instead of being composed onto one.
    let mut c: Option<Circuit> = if arity == 0 { None } else { Some(Circuit::id(arity)) };
    let mut width = arity;
    let mut nodes = 0usize;

    while nodes < target {
        let g = match pick_generator(desc, cfg, width, rng) {
            Some(g) => g,
            None => break,
        };
        let a = g.shape().arity;
        // Charge the op plus the discards its output width will eventually
        // cost, so the trailing cleanup stays within the node budget.
        let new_width = width - a + g.shape().coarity;
        let cleanup = new_width.saturating_sub(cfg.max_coarity);
        if nodes + 1 + cleanup > budget {
            break;
        }
        let pos = rng.gen_range(0..=width - a);
        c = Some(next_layer(c, pos, Circuit::gen(g), width - a - pos));
        width = new_width;
        nodes += 1;
    }

    while width > cfg.max_coarity {
        let pos = rng.gen_range(0..width);
        c = Some(next_layer(c, pos, Circuit::gen(Generator::Discard), width - pos - 1));
        width -= 1;
    }
    c.unwrap_or_else(Circuit::empty)
}

/// Compose `id(left) * g * id(right)` onto the end of `c`, or let the layer
/// stand alone when there is no circuit yet.
fn next_layer(c: Option<Circuit>, left: usize, g: Circuit, right: usize) -> Circuit {
    let layer = Circuit::tensor_list([Circuit::id(left), g, Circuit::id(right)]);
    match c {
        Some(c) => Circuit::compose(&c, &layer).expect("layers are built at the current width"),
        None => layer,
    }
}

/// Pick a generator applicable at the current width, weighted toward the
/// arithmetic operations. Returns `None` only if the width has hit the cap
/// and nothing narrowing is allowed — which cannot happen while discard is in
/// the pool, but the sampler stays total regardless.
fn pick_generator(
    desc: &Semiring,
    cfg: &SamplerConfig,
    width: usize,
    rng: &mut impl Rng,
) -> Option<Generator> {
    let growing_ok = width < cfg.max_width;
    let mut pool: Vec<(Generator, u32)> = Vec::new();
    if width >= 2 {
        pool.push((Generator::Add, 3));
        pool.push((Generator::Mul, 3));
        pool.push((Generator::Twist, 1));
        if cfg.allow_compare {
            pool.push((Generator::Compare, 2));
        }
    }
    if width >= 1 {
        pool.push((Generator::Discard, 1));
        if growing_ok {
            pool.push((Generator::Copy, 2));
        }
        if cfg.allow_negate && desc.has_neg() {
            pool.push((Generator::Negate, 1));
        }
    }
    if growing_ok {
        pool.push((Generator::Zero, 1));
        pool.push((Generator::One, 1));
        pool.push((Generator::Const(random_code(desc, rng)), 1));
    }
    let total: u32 = pool.iter().map(|(_, w)| w).sum();
    if total == 0 {
        return None;
    }
    let mut roll = rng.gen_range(0..total);
    for (g, w) in pool {
        if roll < w {
            return Some(g);
        }
        roll -= w;
    }
    unreachable!("weights sum to total")
}

/// Number of non-identity generator occurrences (the sampler's node count).
pub fn active_nodes(c: &Circuit) -> usize {
    let mut count = 0;
    let mut stack = vec![c.clone()];
    while let Some(c) = stack.pop() {
        match c.node() {
            Node::Gen(Generator::Identity) => {}
            Node::Gen(_) => count += 1,
            Node::Seq(f, g) | Node::Par(f, g) => {
                stack.push(f.clone());
                stack.push(g.clone());
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(id: &str) -> Semiring {
        id.parse().unwrap()
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let d = s("zmod:3");
        let cfg = SamplerConfig::default();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            assert_eq!(random_circuit(&d, &cfg, &mut r1), random_circuit(&d, &cfg, &mut r2));
        }
        let mut r3 = ChaCha8Rng::seed_from_u64(8);
        let differs = (0..50).any(|_| {
            random_circuit(&d, &cfg, &mut ChaCha8Rng::seed_from_u64(7))
                != random_circuit(&d, &cfg, &mut r3)
        });
        assert!(differs);
    }

    #[test]
    fn samples_respect_the_configured_caps() {
        let d = s("zmod:5");
        let cfg = SamplerConfig {
            max_nodes: 12,
            max_arity: 3,
            max_coarity: 2,
            max_width: 5,
            allow_compare: false,
            allow_negate: false,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let c = random_circuit(&d, &cfg, &mut rng);
            assert!(c.arity() <= cfg.max_arity);
            assert!(c.coarity() <= cfg.max_coarity);
            assert!(active_nodes(&c) <= cfg.max_nodes, "{c:?}");
            let mut stack = vec![c.clone()];
            while let Some(c) = stack.pop() {
                match c.node() {
                    Node::Gen(g) => assert!(
                        !matches!(g, Generator::Compare | Generator::Negate),
                        "disallowed generator sampled"
                    ),
                    Node::Seq(f, g) | Node::Par(f, g) => {
                        stack.push(f.clone());
                        stack.push(g.clone());
                    }
                }
            }
        }
    }

    #[test]
    fn samples_evaluate_cleanly() {
        for id in ["zmod:2", "zmod:3", "sat:4"] {
            let d = s(id);
            let cfg = SamplerConfig {
                allow_compare: true,
                allow_negate: true,
                ..SamplerConfig::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..200 {
                let c = random_circuit(&d, &cfg, &mut rng);
                let x = random_input(&d, c.arity(), &mut rng);
                let out = eval(&d, &c, &x).unwrap();
                assert_eq!(out.len(), c.coarity());
            }
        }
    }

    #[test]
    fn fixed_arity_sampling_pins_the_input_count() {
        let d = s("zmod:2");
        let cfg = SamplerConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for arity in 0..=3 {
            for _ in 0..50 {
                let c = random_circuit_with_arity(&d, &cfg, arity, &mut rng);
                assert_eq!(c.arity(), arity);
            }
        }
    }
}
