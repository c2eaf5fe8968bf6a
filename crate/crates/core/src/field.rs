//! Arithmetic in the two concrete locally compact non-Archimedean fields
//! handled by this crate: the p-adic numbers `Q_p` and the formal Laurent
//! series `F_p((X^-1))`.
//!
//! Every nonzero element is stored as `pi^v * u` where `pi` is the
//! uniformizer (`p` for `Q_p`, `X^-1` for the Laurent field) and `u` is a
//! unit given by its residue digits `d_0, d_1, ...` with `d_0 != 0`. The
//! norm is `q^-v` with `q = p`, and it is never materialized as a float.
//!
//! Elements carry a fixed relative precision: at most `N` significant digits
//! are stored. An element is either *exact* (its digit expansion is finite and
//! fully stored) or *inexact* (only the first `sig` digits are known, so its
//! absolute precision is `v + sig`). Integers embedded in the Laurent field,
//! non-negative integers in `Q_p` and explicit digit literals are exact.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of significant residue digits per element.
pub const DEFAULT_PRECISION: usize = 64;

/// Inexact results keeping fewer significant digits than this are rejected.
pub const PRECISION_FLOOR: usize = 8;

/// Largest accepted prime (digits and their products must fit comfortably in `u64`).
pub const MAX_PRIME: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// `Q_p`: base-p digits with carries.
    Padic,
    /// `F_p((X^-1))`: coefficient arithmetic mod p, no carries.
    Laurent,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Padic => f.write_str("padic"),
            FieldKind::Laurent => f.write_str("laurent"),
        }
    }
}

/// Which field, which residue characteristic and how many digits to carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    kind: FieldKind,
    p: u32,
    precision: usize,
}

impl FieldSpec {
    pub fn new(kind: FieldKind, p: u64, precision: usize) -> Result<Self> {
        if !is_prime(p) || p >= MAX_PRIME {
            return Err(Error::NonPrimeP(p));
        }
        if precision == 0 {
            return Err(Error::InvalidArgument("precision must be at least 1".into()));
        }
        Ok(FieldSpec { kind, p: p as u32, precision })
    }

    pub fn padic(p: u64) -> Result<Self> {
        Self::new(FieldKind::Padic, p, DEFAULT_PRECISION)
    }

    pub fn laurent(p: u64) -> Result<Self> {
        Self::new(FieldKind::Laurent, p, DEFAULT_PRECISION)
    }

    pub fn with_precision(self, precision: usize) -> Result<Self> {
        Self::new(self.kind, self.p as u64, precision)
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    /// Cardinality of the residue field; `||pi|| = 1/q`.
    pub fn q(&self) -> u64 {
        self.p as u64
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Minimum number of significant digits an inexact result may keep.
    pub fn precision_floor(&self) -> usize {
        PRECISION_FLOOR.min(self.precision)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(p={}, N={})", self.kind, self.p, self.precision)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Inverse of a nonzero residue modulo the prime `p`, by extended Euclid.
pub fn residue_inverse(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i64 % p as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let quotient = old_r / r;
        (old_r, r) = (r, old_r - quotient * r);
        (old_s, s) = (s, old_s - quotient * s);
    }
    debug_assert_eq!(old_r, 1, "residue {a} not invertible mod {p}");
    old_s.rem_euclid(p as i64) as u64
}

/// Valuation `v(x)` with `||x|| = q^-v`; zero has valuation `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Zero,
    Unit { valuation: i64, digits: Vec<u32>, exact: bool },
}

/// An element of `Q_p` or `F_p((X^-1))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    spec: FieldSpec,
    repr: Repr,
}

/// Residue digits of an element at positions `v_min .. t`, i.e. the label of
/// the ball of radius `q^-t` containing it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefixKey(pub Vec<u32>);

impl FieldElement {
    pub fn zero(spec: FieldSpec) -> Self {
        FieldElement { spec, repr: Repr::Zero }
    }

    pub fn one(spec: FieldSpec) -> Self {
        Self::pi_pow(spec, 0)
    }

    /// `pi^v`, exact.
    pub fn pi_pow(spec: FieldSpec, v: i64) -> Self {
        FieldElement { spec, repr: Repr::Unit { valuation: v, digits: vec![1], exact: true } }
    }

    pub fn pi(spec: FieldSpec) -> Self {
        Self::pi_pow(spec, 1)
    }

    /// Exact element `pi^v * (d_0 + d_1 pi + ...)`; leading zero digits are
    /// folded into the valuation. Digits must lie in `[0, p)`.
    pub fn from_digits(spec: FieldSpec, valuation: i64, digits: &[u32]) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= spec.p) {
            return Err(Error::InvalidArgument(format!("digit {d} out of range for p = {}", spec.p)));
        }
        let lead = match digits.iter().position(|&d| d != 0) {
            Some(i) => i,
            None => return Ok(Self::zero(spec)),
        };
        let mut body: Vec<u32> = digits[lead..].to_vec();
        while body.last() == Some(&0) {
            body.pop();
        }
        let exact = body.len() <= spec.precision;
        body.truncate(spec.precision);
        Ok(FieldElement {
            spec,
            repr: Repr::Unit { valuation: valuation + lead as i64, digits: body, exact },
        })
    }

    /// Image of the integer `a` (exact unless it is a negative p-adic integer).
    pub fn from_integer(spec: FieldSpec, a: i64) -> Self {
        let p = spec.p as i64;
        match spec.kind {
            FieldKind::Laurent => {
                let r = a.rem_euclid(p) as u32;
                if r == 0 {
                    Self::zero(spec)
                } else {
                    FieldElement {
                        spec,
                        repr: Repr::Unit { valuation: 0, digits: vec![r], exact: true },
                    }
                }
            }
            FieldKind::Padic => {
                if a == 0 {
                    return Self::zero(spec);
                }
                let mut m = a.unsigned_abs();
                let mut digits = Vec::new();
                while m > 0 {
                    digits.push((m % p as u64) as u32);
                    m /= p as u64;
                }
                let x = Self::from_digits(spec, 0, &digits).expect("digits are in range");
                if a < 0 {
                    x.neg()
                } else {
                    x
                }
            }
        }
    }

    /// Canonical image of the rational `a/b`. In the Laurent field the
    /// integers act through their residues mod p.
    pub fn embed_rational(spec: FieldSpec, a: i64, b: i64) -> Result<Self> {
        if b == 0 {
            return Err(Error::DivisionByZero);
        }
        match spec.kind {
            FieldKind::Laurent => {
                let p = spec.p as i64;
                let bb = b.rem_euclid(p) as u64;
                if bb == 0 {
                    return Err(Error::DivisionByZero);
                }
                let aa = a.rem_euclid(p) as u64;
                let r = aa * residue_inverse(bb, spec.p()) % spec.p();
                Ok(Self::from_integer(spec, r as i64))
            }
            FieldKind::Padic => {
                if a == 0 {
                    return Ok(Self::zero(spec));
                }
                let (va, ua) = split_p_power(a, spec.p as i64);
                let (vb, ub) = split_p_power(b, spec.p as i64);
                let num = Self::from_integer(spec, ua);
                let den = Self::from_integer(spec, ub);
                let unit = num.mul(&den.inv()?)?;
                Ok(unit.shift(va - vb))
            }
        }
    }

    /// Parse an element literal: a decimal integer, a rational `a/b`, or the
    /// explicit digit form `pi^v*(d0,d1,...,dk)`.
    pub fn parse(spec: FieldSpec, literal: &str) -> Result<Self> {
        let s: String = literal.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::parse(format!("literal {literal:?}"), msg);
        if s.is_empty() {
            return Err(bad("empty literal"));
        }
        if let Some(rest) = s.strip_prefix("pi^") {
            let (v, digits) = rest.split_once("*(").ok_or_else(|| bad("expected pi^v*(d0,...)"))?;
            let digits = digits.strip_suffix(')').ok_or_else(|| bad("missing closing parenthesis"))?;
            let v: i64 = v.parse().map_err(|_| bad("bad valuation"))?;
            let digits: Vec<u32> = digits
                .split(',')
                .map(|d| d.parse::<u32>().map_err(|_| bad("bad digit")))
                .collect::<Result<_>>()?;
            if digits.iter().any(|&d| d >= spec.p) {
                return Err(bad("digit outside [0, p)"));
            }
            return Self::from_digits(spec, v, &digits);
        }
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.parse().map_err(|_| bad("bad numerator"))?;
            let b: i64 = b.parse().map_err(|_| bad("bad denominator"))?;
            if b == 0 {
                return Err(bad("zero denominator"));
            }
            return Self::embed_rational(spec, a, b).map_err(|e| bad(&e.to_string()));
        }
        let a: i64 = s.parse().map_err(|_| bad("not an integer, rational or digit literal"))?;
        Ok(Self::from_integer(spec, a))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    pub fn is_exact(&self) -> bool {
        match &self.repr {
            Repr::Zero => true,
            Repr::Unit { exact, .. } => *exact,
        }
    }

    pub fn valuation(&self) -> Valuation {
        match &self.repr {
            Repr::Zero => Valuation::Infinite,
            Repr::Unit { valuation, .. } => Valuation::Finite(*valuation),
        }
    }

    /// `e` with `||x|| = q^e`, i.e. minus the valuation; `None` for zero.
    pub fn norm_exponent(&self) -> Option<i64> {
        self.valuation().finite().map(|v| -v)
    }

    /// The norm rendered as a float (for reports only).
    pub fn norm(&self) -> f64 {
        match self.valuation() {
            Valuation::Infinite => 0.0,
            Valuation::Finite(v) => (self.spec.q() as f64).powi(-(v as i32)),
        }
    }

    /// Stored unit digits `d_0 ...` (empty for zero).
    pub fn digits(&self) -> &[u32] {
        match &self.repr {
            Repr::Zero => &[],
            Repr::Unit { digits, .. } => digits,
        }
    }

    /// Number of known significant digits (`None` when exact).
    pub fn significant_digits(&self) -> Option<usize> {
        match &self.repr {
            Repr::Unit { digits, exact: false, .. } => Some(digits.len()),
            _ => None,
        }
    }

    /// Position `A` such that the element is known modulo `pi^A`; `None` when exact.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { valuation, digits, exact: false } => Some(valuation + digits.len() as i64),
            _ => None,
        }
    }

    /// Residue digit at absolute position `j` (coefficient of `pi^j`), or
    /// `None` when it lies beyond the known precision.
    pub fn digit_at(&self, j: i64) -> Option<u32> {
        match &self.repr {
            Repr::Zero => Some(0),
            Repr::Unit { valuation, digits, exact } => {
                if j < *valuation {
                    Some(0)
                } else if j < valuation + digits.len() as i64 {
                    Some(digits[(j - valuation) as usize])
                } else if *exact {
                    Some(0)
                } else {
                    None
                }
            }
        }
    }

    fn end(&self) -> i64 {
        match &self.repr {
            Repr::Zero => i64::MIN,
            Repr::Unit { valuation, digits, .. } => valuation + digits.len() as i64,
        }
    }

    fn check_spec(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            Err(Error::FieldMismatch)
        } else {
            Ok(())
        }
    }

    /// Multiply by `pi^k`.
    pub fn shift(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::Unit { valuation, digits, exact } => FieldElement {
                spec: self.spec,
                repr: Repr::Unit { valuation: valuation + k, digits: digits.clone(), exact: *exact },
            },
        }
    }

    pub fn neg(&self) -> Self {
        let (valuation, digits, exact) = match &self.repr {
            Repr::Zero => return self.clone(),
            Repr::Unit { valuation, digits, exact } => (*valuation, digits, *exact),
        };
        let p = self.spec.p;
        match self.spec.kind {
            FieldKind::Laurent => FieldElement {
                spec: self.spec,
                repr: Repr::Unit {
                    valuation,
                    digits: digits.iter().map(|&d| (p - d) % p).collect(),
                    exact,
                },
            },
            FieldKind::Padic => {
                // -u = (p - d0) + sum (p - 1 - d_i) p^i; an exact u gets an
                // infinite tail of (p - 1) digits.
                let len = if exact { self.spec.precision } else { digits.len() };
                let mut out = Vec::with_capacity(len);
                for i in 0..len {
                    let d = digits.get(i).copied().unwrap_or(0);
                    out.push(if i == 0 { p - d } else { p - 1 - d });
                }
                FieldElement { spec: self.spec, repr: Repr::Unit { valuation, digits: out, exact: false } }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn signed(&self, negate: bool) -> Self {
        if negate {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Digit-serial addition or subtraction from the most significant position
    /// upward; carries only ever move toward higher positions.
    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        self.check_spec(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.signed(negate));
        }
        let vx = self.valuation().finite().unwrap();
        let vy = other.valuation().finite().unwrap();
        let ax = self.absolute_precision();
        let ay = other.absolute_precision();
        if matches!(ax, Some(a) if vy >= a) {
            return Ok(self.clone());
        }
        if matches!(ay, Some(a) if vx >= a) {
            return Ok(other.signed(negate));
        }
        let limit = match (ax, ay) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let exact_end = self.end().max(other.end());
        let n = self.spec.precision;
        let p = self.spec.p as i64;
        let padic = self.spec.kind == FieldKind::Padic;

        let mut out: Vec<u32> = Vec::with_capacity(n);
        let mut lead: Option<i64> = None;
        let mut carry: i64 = 0;
        let mut truncated = false;
        let mut j = vx.min(vy);
        loop {
            let more = match limit {
                Some(a) => j < a,
                None => j < exact_end || carry != 0,
            };
            if !more {
                break;
            }
            if out.len() == n {
                if limit.is_some() {
                    break;
                }
                if carry < 0 && j >= exact_end {
                    // infinite tail of (p - 1) digits
                    truncated = true;
                    break;
                }
            }
            let dx = self.digit_at(j).unwrap() as i64;
            let dy = other.digit_at(j).unwrap() as i64;
            let raw = if negate { dx - dy } else { dx + dy };
            let d = if padic {
                let s = raw + carry;
                carry = s.div_euclid(p);
                s.rem_euclid(p)
            } else {
                raw.rem_euclid(p)
            } as u32;
            if lead.is_some() || d != 0 {
                if lead.is_none() {
                    lead = Some(j);
                }
                if out.len() < n {
                    out.push(d);
                } else if d != 0 {
                    truncated = true;
                    break;
                }
            }
            j += 1;
        }

        let lead = match lead {
            None => return Ok(Self::zero(self.spec)),
            Some(l) => l,
        };
        let exact = limit.is_none() && !truncated;
        if exact {
            while out.last() == Some(&0) {
                out.pop();
            }
        } else if out.len() < self.spec.precision_floor() {
            return Err(Error::PrecisionExhausted(format!(
                "only {} significant digits survive cancellation",
                out.len()
            )));
        }
        Ok(FieldElement { spec: self.spec, repr: Repr::Unit { valuation: lead, digits: out, exact } })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        let (vx, dx, ex) = match &self.repr {
            Repr::Zero => return Ok(Self::zero(self.spec)),
            Repr::Unit { valuation, digits, exact } => (*valuation, digits, *exact),
        };
        let (vy, dy, ey) = match &other.repr {
            Repr::Zero => return Ok(Self::zero(self.spec)),
            Repr::Unit { valuation, digits, exact } => (*valuation, digits, *exact),
        };
        let n = self.spec.precision;
        let (len, exact_input) = match (ex, ey) {
            (true, true) => (dx.len() + dy.len() - 1, true),
            (true, false) => (dy.len(), false),
            (false, true) => (dx.len(), false),
            (false, false) => (dx.len().min(dy.len()), false),
        };
        let p = self.spec.p as u64;
        let mut acc = vec![0u64; len];
        for (i, &a) in dx.iter().enumerate().take(len) {
            if a == 0 {
                continue;
            }
            for (k, &b) in dy.iter().enumerate().take(len - i) {
                acc[i + k] += a as u64 * b as u64;
            }
            if self.spec.kind == FieldKind::Laurent && i % 64 == 63 {
                acc.iter_mut().for_each(|c| *c %= p);
            }
        }
        let mut digits: Vec<u32> = Vec::with_capacity(len + 2);
        match self.spec.kind {
            FieldKind::Laurent => digits.extend(acc.iter().map(|&c| (c % p) as u32)),
            FieldKind::Padic => {
                let mut carry = 0u64;
                for c in acc {
                    let s = c + carry;
                    digits.push((s % p) as u32);
                    carry = s / p;
                }
                if exact_input {
                    while carry > 0 {
                        digits.push((carry % p) as u32);
                        carry /= p;
                    }
                }
            }
        }
        let mut exact = exact_input;
        if exact {
            while digits.last() == Some(&0) {
                digits.pop();
            }
            if digits.len() > n {
                digits.truncate(n);
                exact = false;
            }
        }
        debug_assert!(digits[0] != 0);
        Ok(FieldElement { spec: self.spec, repr: Repr::Unit { valuation: vx + vy, digits, exact } })
    }

    /// Multiplicative inverse by digit-wise long division, seeded with the
    /// residue-field inverse of the leading digit.
    pub fn inv(&self) -> Result<Self> {
        let (v, digits, exact) = match &self.repr {
            Repr::Zero => return Err(Error::DivisionByZero),
            Repr::Unit { valuation, digits, exact } => (*valuation, digits, *exact),
        };
        let p = self.spec.p as u64;
        let inv0 = residue_inverse(digits[0] as u64, p);
        let single = digits.len() == 1;
        if exact && single && (self.spec.kind == FieldKind::Laurent || digits[0] == 1) {
            return Ok(FieldElement {
                spec: self.spec,
                repr: Repr::Unit { valuation: -v, digits: vec![inv0 as u32], exact: true },
            });
        }
        let sig = if exact { self.spec.precision } else { digits.len() };
        let mut out = Vec::with_capacity(sig);
        match self.spec.kind {
            FieldKind::Laurent => {
                let mut residual = vec![0u64; sig];
                residual[0] = 1;
                for j in 0..sig {
                    let y = residual[j] % p * inv0 % p;
                    out.push(y as u32);
                    if y == 0 {
                        continue;
                    }
                    for (i, &d) in digits.iter().enumerate().take(sig - j) {
                        let r = &mut residual[j + i];
                        *r = (*r + p * p - (y * d as u64) % p) % p;
                    }
                }
            }
            FieldKind::Padic => {
                let pi = p as i64;
                let mut residual = vec![0i64; sig + 1];
                residual[0] = 1;
                for j in 0..sig {
                    let y = (residual[j].rem_euclid(pi) as u64 * inv0 % p) as i64;
                    out.push(y as u32);
                    if y != 0 {
                        for (i, &d) in digits.iter().enumerate().take(sig - j) {
                            residual[j + i] -= y * d as i64;
                        }
                    }
                    debug_assert_eq!(residual[j].rem_euclid(pi), 0);
                    let c = residual[j].div_euclid(pi);
                    residual[j + 1] += c;
                }
            }
        }
        Ok(FieldElement { spec: self.spec, repr: Repr::Unit { valuation: -v, digits: out, exact: false } })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    /// Equality up to the coarser of the two absolute precisions.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        if self.spec != other.spec {
            return false;
        }
        let limit = match (self.absolute_precision(), other.absolute_precision()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let start = match (self.valuation(), other.valuation()) {
            (Valuation::Infinite, Valuation::Infinite) => return true,
            (a, b) => a.min(b).finite().unwrap(),
        };
        let end = limit.unwrap_or_else(|| self.end().max(other.end()));
        let mut carry = 0i64;
        let p = self.spec.p as i64;
        for j in start..end {
            let dx = self.digit_at(j).unwrap_or(0) as i64;
            let dy = other.digit_at(j).unwrap_or(0) as i64;
            let d = match self.spec.kind {
                FieldKind::Padic => {
                    let s = dx - dy + carry;
                    carry = s.div_euclid(p);
                    s.rem_euclid(p)
                }
                FieldKind::Laurent => (dx - dy).rem_euclid(p),
            };
            if d != 0 {
                return false;
            }
        }
        limit.is_some() || carry == 0
    }

    /// Digits at positions `v_min .. t`, zero-padded below the valuation.
    /// Two elements get the same key iff `||x - y|| <= q^-t` (given both lie
    /// in the ball of radius `q^-v_min`).
    pub fn digit_prefix(&self, t: i64, v_min: i64) -> Result<PrefixKey> {
        if let Valuation::Finite(v) = self.valuation() {
            if v < v_min {
                return Err(Error::OutsideBall { v_min });
            }
        }
        let mut key = Vec::with_capacity((t - v_min).max(0) as usize);
        for j in v_min..t {
            match self.digit_at(j) {
                Some(d) => key.push(d),
                None => {
                    return Err(Error::PrecisionExhausted(format!(
                        "digit at position {j} is beyond the known precision"
                    )))
                }
            }
        }
        Ok(PrefixKey(key))
    }

    /// Haar-uniform sample on the ball `pi^t O`: i.i.d. uniform residue digits
    /// from position `t` on, `N` of them kept after the first nonzero one.
    pub fn haar_sample<R: Rng + ?Sized>(spec: FieldSpec, rng: &mut R, t: i64) -> Self {
        let p = spec.p;
        let mut lead = 0i64;
        let first = loop {
            let d = rng.gen_range(0..p);
            if d != 0 {
                break d;
            }
            lead += 1;
            if lead > 1 << 20 {
                return Self::zero(spec);
            }
        };
        let mut digits = Vec::with_capacity(spec.precision);
        digits.push(first);
        for _ in 1..spec.precision {
            digits.push(rng.gen_range(0..p));
        }
        FieldElement { spec, repr: Repr::Unit { valuation: t + lead, digits, exact: false } }
    }
}

fn split_p_power(mut a: i64, p: i64) -> (i64, i64) {
    let mut v = 0;
    while a != 0 && a % p == 0 {
        a /= p;
        v += 1;
    }
    (v, a)
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => f.write_str("0"),
            Repr::Unit { valuation, digits, .. } => {
                write!(f, "pi^{valuation}*(")?;
                for (i, d) in digits.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{d}")?;
                }
                f.write_str(")")
            }
        }
    }
}
