//! Commutative semirings with canonically coded carriers.
//!
//! Every carrier element is a code `0..k-1` (`u64`); the code *is* the
//! element. The shipped families are:
//!
//! | id        | carrier        | add                | mul                | neg |
//! |-----------|----------------|--------------------|--------------------|-----|
//! | `zmod:n`  | `{0..n-1}`     | `(a+b) mod n`      | `(a*b) mod n`      | yes |
//! | `zp:p`    | `{0..p-1}`     | as `zmod:p`        | as `zmod:p`        | yes |
//! | `sat:n`   | `{0..n-1}`     | `min(n-1, a+b)`    | `min(n-1, a*b)`    | no  |
//! | `nat`     | machine `u64`  | checked `a+b`      | checked `a*b`      | no  |
//! | `bool`    | alias of `sat:2` (so `1+1 = 1`)                          |     |
//!
//! `zp:p` additionally validates that `p` is prime; its operation tables are
//! identical to `zmod:p`. Over `nat` any overflowing operation reports
//! [`Error::Overflow`] instead of wrapping.

use serde::Serialize;

use crate::error::{Error, Result};

/// The element universe of a semiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    /// Codes `0..size`.
    Finite { size: u64 },
    /// All of `u64`, with overflow-checked arithmetic.
    Natural,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    ZMod { n: u64 },
    Sat { n: u64 },
    Nat,
    Custom(CustomTables),
}

/// Explicit operation tables for a hand-built description.
///
/// Construction validates only closure (every table entry is a valid code);
/// whether the tables actually satisfy the semiring laws is the business of
/// [`Semiring::check_axioms`], so deliberately broken descriptions can be
/// built and examined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustomTables {
    size: u64,
    zero: u64,
    one: u64,
    add: Vec<u64>,
    mul: Vec<u64>,
    neg: Option<Vec<u64>>,
}

/// A commutative semiring description: identifier, carrier, and operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semiring {
    id: String,
    kind: Kind,
}

impl Semiring {
    /// Parses a semiring id: `zmod:<n>`, `zp:<p>`, `sat:<n>`, `nat`, `bool`.
    pub fn parse(spec: &str) -> Result<Semiring> {
        let spec = spec.trim();
        match spec {
            "nat" => return Ok(Semiring { id: "nat".into(), kind: Kind::Nat }),
            "bool" => {
                return Ok(Semiring { id: "bool".into(), kind: Kind::Sat { n: 2 } });
            }
            _ => {}
        }
        let (family, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::UnknownSemiring(spec.to_string()))?;
        let n: u64 = arg
            .parse()
            .map_err(|_| Error::UnknownSemiring(spec.to_string()))?;
        match family {
            "zmod" => {
                if n < 2 {
                    return Err(Error::BadModulus(n));
                }
                Ok(Semiring { id: format!("zmod:{n}"), kind: Kind::ZMod { n } })
            }
            "zp" => {
                if !is_prime(n) {
                    return Err(Error::NotPrime(n));
                }
                Ok(Semiring { id: format!("zp:{n}"), kind: Kind::ZMod { n } })
            }
            "sat" => {
                if n < 2 {
                    return Err(Error::BadModulus(n));
                }
                Ok(Semiring { id: format!("sat:{n}"), kind: Kind::Sat { n } })
            }
            _ => Err(Error::UnknownSemiring(spec.to_string())),
        }
    }

    /// Builds a description from explicit tables (`add[a*size+b]`, row-major).
    ///
    /// Only closure is validated here; run [`Semiring::check_axioms`] to test
    /// the laws themselves.
    pub fn from_tables(
        size: u64,
        zero: u64,
        one: u64,
        add: Vec<u64>,
        mul: Vec<u64>,
        neg: Option<Vec<u64>>,
    ) -> Result<Semiring> {
        if size < 1 {
            return Err(Error::BadModulus(size));
        }
        let len = (size as usize)
            .checked_mul(size as usize)
            .ok_or(Error::BadModulus(size))?;
        let check_code = |code: u64, what: &str| -> Result<()> {
            if code >= size {
                return Err(Error::Invalid(format!(
                    "{what} entry {code} is not a code below {size}"
                )));
            }
            Ok(())
        };
        check_code(zero, "zero")?;
        check_code(one, "one")?;
        for table in [(&add, "add"), (&mul, "mul")] {
            if table.0.len() != len {
                return Err(Error::Invalid(format!(
                    "{} table has {} entries, expected {len}",
                    table.1,
                    table.0.len()
                )));
            }
            for &v in table.0 {
                check_code(v, table.1)?;
            }
        }
        if let Some(neg) = &neg {
            if neg.len() != size as usize {
                return Err(Error::Invalid(format!(
                    "neg table has {} entries, expected {size}",
                    neg.len()
                )));
            }
            for &v in neg {
                check_code(v, "neg")?;
            }
        }
        Ok(Semiring {
            id: "custom".into(),
            kind: Kind::Custom(CustomTables { size, zero, one, add, mul, neg }),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn carrier(&self) -> Carrier {
        match &self.kind {
            Kind::ZMod { n } | Kind::Sat { n } => Carrier::Finite { size: *n },
            Kind::Nat => Carrier::Natural,
            Kind::Custom(t) => Carrier::Finite { size: t.size },
        }
    }

    /// Carrier size for finite semirings, `None` for `nat`.
    pub fn size(&self) -> Option<u64> {
        match self.carrier() {
            Carrier::Finite { size } => Some(size),
            Carrier::Natural => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    /// Carrier size, or [`Error::InfiniteCarrier`] over `nat`.
    pub fn finite_size(&self) -> Result<u64> {
        self.size().ok_or(Error::InfiniteCarrier)
    }

    pub fn zero(&self) -> u64 {
        match &self.kind {
            Kind::ZMod { .. } | Kind::Sat { .. } | Kind::Nat => 0,
            Kind::Custom(t) => t.zero,
        }
    }

    pub fn one(&self) -> u64 {
        match &self.kind {
            Kind::ZMod { .. } | Kind::Sat { .. } | Kind::Nat => 1,
            Kind::Custom(t) => t.one,
        }
    }

    pub fn add(&self, a: u64, b: u64) -> Result<u64> {
        match &self.kind {
            Kind::ZMod { n } => Ok(((a as u128 + b as u128) % *n as u128) as u64),
            Kind::Sat { n } => Ok((a as u128 + b as u128).min(*n as u128 - 1) as u64),
            Kind::Nat => a.checked_add(b).ok_or(Error::Overflow { op: "add" }),
            Kind::Custom(t) => Ok(t.add[(a * t.size + b) as usize]),
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> Result<u64> {
        match &self.kind {
            Kind::ZMod { n } => Ok(((a as u128 * b as u128) % *n as u128) as u64),
            Kind::Sat { n } => Ok((a as u128 * b as u128).min(*n as u128 - 1) as u64),
            Kind::Nat => a.checked_mul(b).ok_or(Error::Overflow { op: "mul" }),
            Kind::Custom(t) => Ok(t.mul[(a * t.size + b) as usize]),
        }
    }

    pub fn has_neg(&self) -> bool {
        match &self.kind {
            Kind::ZMod { .. } => true,
            Kind::Sat { .. } | Kind::Nat => false,
            Kind::Custom(t) => t.neg.is_some(),
        }
    }

    /// Additive inverse; `UnsupportedGenerator` where none exists.
    pub fn neg(&self, a: u64) -> Result<u64> {
        match &self.kind {
            Kind::ZMod { n } => Ok(if a == 0 { 0 } else { n - a }),
            Kind::Sat { .. } | Kind::Nat => Err(Error::UnsupportedGenerator {
                gen: "neg".into(),
                semiring: self.id.clone(),
            }),
            Kind::Custom(t) => match &t.neg {
                Some(neg) => Ok(neg[a as usize]),
                None => Err(Error::UnsupportedGenerator {
                    gen: "neg".into(),
                    semiring: self.id.clone(),
                }),
            },
        }
    }

    /// `a` added to itself `k` times (the natural multiple `k * a`).
    pub fn natural_multiple(&self, k: u64, a: u64) -> Result<u64> {
        let mut acc = self.zero();
        // Double-and-add keeps this cheap for the large k a formal
        // derivative of a high-degree monomial can produce.
        let mut base = a;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.add(base, base)?;
            }
        }
        Ok(acc)
    }

    /// `a^e` by repeated squaring (`a^0 = 1`).
    pub fn pow(&self, a: u64, e: u64) -> Result<u64> {
        let mut acc = self.one();
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base)?;
            }
        }
        Ok(acc)
    }

    /// Validates that `code` denotes a carrier element.
    pub fn check_value(&self, code: u64) -> Result<()> {
        match self.carrier() {
            Carrier::Finite { size } if code >= size => {
                Err(Error::ConstOutOfRange { code, size })
            }
            _ => Ok(()),
        }
    }

    /// All elements of a finite carrier, in code order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.size().unwrap_or(0)
    }

    /// Exhaustively checks the commutative-semiring laws over a finite
    /// carrier; each law gets a verdict and, on failure, the least
    /// counterexample tuple.
    pub fn check_axioms(&self) -> Result<LawReport> {
        let size = self.finite_size()?;
        let mut checks = Vec::new();

        let mut law = |name: &str, arity: u32, test: &dyn Fn(&[u64]) -> Result<bool>| -> Result<()> {
            let mut counterexample = None;
            let mut cases = 0u64;
            let mut tuple = vec![0u64; arity as usize];
            'outer: loop {
                cases += 1;
                if !test(&tuple)? {
                    counterexample = Some(tuple.clone());
                    break;
                }
                for i in (0..tuple.len()).rev() {
                    tuple[i] += 1;
                    if tuple[i] < size {
                        continue 'outer;
                    }
                    tuple[i] = 0;
                }
                break;
            }
            checks.push(LawCheck {
                law: name.to_string(),
                pass: counterexample.is_none(),
                cases,
                counterexample,
            });
            Ok(())
        };

        let zero = self.zero();
        let one = self.one();
        law("add-associative", 3, &|t| {
            Ok(self.add(self.add(t[0], t[1])?, t[2])? == self.add(t[0], self.add(t[1], t[2])?)?)
        })?;
        law("add-commutative", 2, &|t| Ok(self.add(t[0], t[1])? == self.add(t[1], t[0])?))?;
        law("add-unit", 1, &|t| Ok(self.add(zero, t[0])? == t[0]))?;
        law("mul-associative", 3, &|t| {
            Ok(self.mul(self.mul(t[0], t[1])?, t[2])? == self.mul(t[0], self.mul(t[1], t[2])?)?)
        })?;
        law("mul-commutative", 2, &|t| Ok(self.mul(t[0], t[1])? == self.mul(t[1], t[0])?))?;
        law("mul-unit", 1, &|t| Ok(self.mul(one, t[0])? == t[0]))?;
        law("distributivity", 3, &|t| {
            Ok(self.mul(t[0], self.add(t[1], t[2])?)?
                == self.add(self.mul(t[0], t[1])?, self.mul(t[0], t[2])?)?)
        })?;
        law("annihilation", 1, &|t| Ok(self.mul(t[0], zero)? == zero))?;
        if self.has_neg() {
            law("neg-inverse", 1, &|t| Ok(self.add(t[0], self.neg(t[0])?)? == zero))?;
        }
        Ok(LawReport { semiring: self.id.clone(), checks })
    }
}

impl std::str::FromStr for Semiring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Semiring> {
        Semiring::parse(s)
    }
}

impl std::fmt::Display for Semiring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.id)
    }
}

/// Verdict for one semiring law.
#[derive(Debug, Clone, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub pass: bool,
    pub cases: u64,
    /// Least tuple (in code order) violating the law, if any.
    pub counterexample: Option<Vec<u64>>,
}

/// Result of [`Semiring::check_axioms`]: one verdict per law.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub semiring: String,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Deterministic Miller-Rabin, exact for all `u64`.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        base %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
