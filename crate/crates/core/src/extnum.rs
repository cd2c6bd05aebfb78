//! Scalar arithmetic layer: the ordered field of rational functions in an
//! infinitesimal scale `eps`, neutrices (convex additive error groups), and
//! external scalars combining a representative with a neutrix.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero as NumZero};
use thiserror::Error;

use crate::poly::{Poly, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtNumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operand is not zeroless")]
    NotZeroless,
}

// ---------------------------------------------------------------------------
// EpsScalar
// ---------------------------------------------------------------------------

/// Element of Q(eps): `eps^shift * num / den`, normalized so that num and den
/// are coprime polynomials with nonzero constant terms and den's constant
/// coefficient is 1. Zero is (num=0, den=1, shift=0). The order takes eps as
/// a positive infinitesimal: the sign of a nonzero element is the sign of the
/// lowest coefficient of its Laurent expansion.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct EpsScalar {
    num: Poly,
    den: Poly,
    shift: i64,
}

impl EpsScalar {
    fn normalized(mut num: Poly, mut den: Poly, mut shift: i64) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return EpsScalar {
                num: Poly::zero(),
                den: Poly::one(),
                shift: 0,
            };
        }
        let vn = num.valuation().unwrap();
        let vd = den.valuation().unwrap();
        num = num.shift_down(vn);
        den = den.shift_down(vd);
        shift += vn as i64 - vd as i64;
        let g = num.gcd(&den);
        if g.degree() != Some(0) {
            num = num.div_exact(&g);
            den = den.div_exact(&g);
        }
        let c = den.coeff(0);
        if !c.is_one() {
            let inv = c.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        EpsScalar { num, den, shift }
    }

    pub fn zero() -> Self {
        EpsScalar::normalized(Poly::zero(), Poly::one(), 0)
    }

    pub fn one() -> Self {
        EpsScalar::from_rat(Rat::one())
    }

    pub fn from_rat(c: Rat) -> Self {
        EpsScalar::normalized(Poly::constant(c), Poly::one(), 0)
    }

    pub fn from_i64(n: i64) -> Self {
        EpsScalar::from_rat(Rat::from(BigInt::from(n)))
    }

    /// `c * eps^k`, any integer k.
    pub fn monomial(c: Rat, k: i64) -> Self {
        EpsScalar::normalized(Poly::constant(c), Poly::one(), k)
    }

    pub fn eps() -> Self {
        EpsScalar::monomial(Rat::one(), 1)
    }

    /// The unlimited scale `w = eps^-1`.
    pub fn omega() -> Self {
        EpsScalar::monomial(Rat::one(), -1)
    }

    pub fn from_fraction(num: Poly, den: Poly, shift: i64) -> Self {
        EpsScalar::normalized(num, den, shift)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.num == Poly::one() && self.den == Poly::one()
    }

    /// Least exponent with a nonzero Laurent coefficient; None encodes +inf.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.shift)
        }
    }

    pub fn neg(&self) -> Self {
        EpsScalar {
            num: self.num.neg(),
            den: self.den.clone(),
            shift: self.shift,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let s = self.shift.min(other.shift);
        let a = self
            .num
            .mul(&other.den)
            .shift_up((self.shift - s) as usize);
        let b = other
            .num
            .mul(&self.den)
            .shift_up((other.shift - s) as usize);
        EpsScalar::normalized(a.add(&b), self.den.mul(&other.den), s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        EpsScalar::normalized(
            self.num.mul(&other.num),
            self.den.mul(&other.den),
            self.shift + other.shift,
        )
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExtNumError> {
        if other.is_zero() {
            return Err(ExtNumError::DivisionByZero);
        }
        Ok(EpsScalar::normalized(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
            self.shift - other.shift,
        ))
    }

    pub fn recip(&self) -> Result<Self, ExtNumError> {
        EpsScalar::one().div(self)
    }

    /// Sign of the element: -1, 0 or 1.
    pub fn sign(&self) -> i32 {
        // den's lowest coefficient is 1, so the sign comes from num alone.
        self.num.low_sign()
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn compare(&self, other: &Self) -> Ordering {
        match self.sub(other).sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Laurent coefficient of eps^k.
    pub fn laurent_coeff(&self, k: i64) -> Rat {
        if self.is_zero() || k < self.shift {
            return Rat::zero();
        }
        let idx = (k - self.shift) as usize;
        // num/den = sum c_j eps^j with c_j = n_j - sum_{i>=1} d_i c_{j-i},
        // valid because den's constant coefficient is 1.
        let mut c: Vec<Rat> = Vec::with_capacity(idx + 1);
        for j in 0..=idx {
            let mut v = self.num.coeff(j);
            for i in 1..=j {
                let d = self.den.coeff(i);
                if !d.is_zero() {
                    v -= d * c[j - i].clone();
                }
            }
            c.push(v);
        }
        c.pop().unwrap()
    }

    /// Laurent expansion truncated to terms of order <= cutoff, as a finite
    /// Laurent polynomial.
    pub fn laurent_truncate(&self, cutoff: i64) -> Self {
        if self.is_zero() || cutoff < self.shift {
            return EpsScalar::zero();
        }
        let count = (cutoff - self.shift) as usize + 1;
        let mut c: Vec<Rat> = Vec::with_capacity(count);
        for j in 0..count {
            let mut v = self.num.coeff(j);
            for i in 1..=j {
                let d = self.den.coeff(i);
                if !d.is_zero() {
                    v -= d * c[j - i].clone();
                }
            }
            c.push(v);
        }
        EpsScalar::normalized(Poly::from_coeffs(c), Poly::one(), self.shift)
    }

    /// True when the denominator is 1, i.e. the value is a finite Laurent
    /// polynomial in eps.
    pub fn is_laurent(&self) -> bool {
        self.den == Poly::one()
    }

    /// Nonzero (coefficient, order) pairs, lowest order first; only valid for
    /// Laurent values.
    pub fn laurent_terms(&self) -> Vec<(Rat, i64)> {
        debug_assert!(self.is_laurent());
        self.num
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (c.clone(), self.shift + j as i64))
            .collect()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }
}

impl PartialOrd for EpsScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpsScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

/// Magnitude class of a scale scalar, by valuation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Magnitude {
    Infinitesimal,
    Appreciable,
    Unlimited,
}

/// Trichotomy by valuation; zero counts as infinitesimal.
pub fn classify(f: &EpsScalar) -> Magnitude {
    match f.valuation() {
        None => Magnitude::Infinitesimal,
        Some(v) if v > 0 => Magnitude::Infinitesimal,
        Some(0) => Magnitude::Appreciable,
        Some(_) => Magnitude::Unlimited,
    }
}

pub fn is_limited_scalar(f: &EpsScalar) -> bool {
    classify(f) != Magnitude::Unlimited
}

// ---------------------------------------------------------------------------
// Neutrix
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum NeutrixKind {
    Oslash,
    Pound,
}

/// Convex additive subgroup from the eps-scaled class. `Scaled(m, Oslash)`
/// is eps^m * (infinitesimals); `Scaled(m, Pound)` is eps^m * (limited).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Neutrix {
    Zero,
    Scaled(i64, NeutrixKind),
    FullLine,
}

pub use Neutrix::{FullLine, Zero};

impl Neutrix {
    pub fn oslash() -> Self {
        Neutrix::Scaled(0, NeutrixKind::Oslash)
    }

    pub fn pound() -> Self {
        Neutrix::Scaled(0, NeutrixKind::Pound)
    }

    pub fn scaled_oslash(m: i64) -> Self {
        Neutrix::Scaled(m, NeutrixKind::Oslash)
    }

    pub fn scaled_pound(m: i64) -> Self {
        Neutrix::Scaled(m, NeutrixKind::Pound)
    }

    /// Inclusion test; the class is totally ordered by inclusion.
    pub fn subset_of(&self, other: &Neutrix) -> bool {
        self.cmp_inclusion(other) != Ordering::Greater
    }

    pub fn strict_subset_of(&self, other: &Neutrix) -> bool {
        self.cmp_inclusion(other) == Ordering::Less
    }

    fn cmp_inclusion(&self, other: &Neutrix) -> Ordering {
        use Neutrix::*;
        match (self, other) {
            (Zero, Zero) | (FullLine, FullLine) => Ordering::Equal,
            (Zero, _) | (_, FullLine) => Ordering::Less,
            (_, Zero) | (FullLine, _) => Ordering::Greater,
            (Scaled(a, k1), Scaled(b, k2)) => {
                // eps^a K1 is inside eps^b K2 when a > b, or at equal order
                // when K2 is at least as wide.
                b.cmp(a).then_with(|| match (k1, k2) {
                    (NeutrixKind::Oslash, NeutrixKind::Pound) => Ordering::Less,
                    (NeutrixKind::Pound, NeutrixKind::Oslash) => Ordering::Greater,
                    _ => Ordering::Equal,
                })
            }
        }
    }

    /// Membership of a scale scalar.
    pub fn contains(&self, f: &EpsScalar) -> bool {
        match self {
            Neutrix::Zero => f.is_zero(),
            Neutrix::FullLine => true,
            Neutrix::Scaled(m, kind) => match f.valuation() {
                None => true,
                Some(v) => match kind {
                    NeutrixKind::Oslash => v > *m,
                    NeutrixKind::Pound => v >= *m,
                },
            },
        }
    }
}

impl PartialOrd for Neutrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Neutrix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_inclusion(other)
    }
}

/// Group sum, which is the inclusion-maximum on this class.
pub fn ntx_sum(a: Neutrix, b: Neutrix) -> Neutrix {
    a.max(b)
}

pub fn ntx_min(a: Neutrix, b: Neutrix) -> Neutrix {
    a.min(b)
}

/// Minkowski product.
pub fn ntx_mul(a: Neutrix, b: Neutrix) -> Neutrix {
    use Neutrix::*;
    match (a, b) {
        (Zero, _) | (_, Zero) => Zero,
        (FullLine, _) | (_, FullLine) => FullLine,
        (Scaled(m, k1), Scaled(n, k2)) => {
            let kind = if k1 == NeutrixKind::Oslash || k2 == NeutrixKind::Oslash {
                NeutrixKind::Oslash
            } else {
                NeutrixKind::Pound
            };
            Scaled(m + n, kind)
        }
    }
}

/// Multiplication by a single scalar; nonzero scalars shift the order by
/// their valuation.
pub fn ntx_scale(f: &EpsScalar, n: Neutrix) -> Neutrix {
    if f.is_zero() {
        return Neutrix::Zero;
    }
    match n {
        Neutrix::Zero => Neutrix::Zero,
        Neutrix::FullLine => Neutrix::FullLine,
        Neutrix::Scaled(m, kind) => Neutrix::Scaled(m + f.valuation().unwrap(), kind),
    }
}

/// Neutrix division A : B = { c | cB inside A }.
pub fn ntx_div(a: Neutrix, b: Neutrix) -> Neutrix {
    use Neutrix::*;
    use NeutrixKind::*;
    match (a, b) {
        (_, Zero) => FullLine,
        (FullLine, _) => FullLine,
        (_, FullLine) => Zero,
        (Zero, _) => Zero,
        (Scaled(m, k1), Scaled(n, k2)) => {
            let kind = match (k1, k2) {
                (Oslash, Pound) => Oslash,
                _ => Pound,
            };
            Scaled(m - n, kind)
        }
    }
}

/// True when f*N is strictly inside N.
pub fn is_absorber(f: &EpsScalar, n: Neutrix) -> bool {
    match n {
        Neutrix::Zero => false,
        Neutrix::FullLine => f.is_zero(),
        Neutrix::Scaled(..) => match f.valuation() {
            None => true,
            Some(v) => v > 0,
        },
    }
}

/// True when f*N strictly contains N.
pub fn is_exploder(f: &EpsScalar, n: Neutrix) -> bool {
    match n {
        Neutrix::Zero | Neutrix::FullLine => false,
        Neutrix::Scaled(..) => matches!(f.valuation(), Some(v) if v < 0),
    }
}

// ---------------------------------------------------------------------------
// ExternalScalar
// ---------------------------------------------------------------------------

/// External number rep + neutrix, kept in canonical form: the representative
/// carries no Laurent term that already lies in the neutrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExternalScalar {
    rep: EpsScalar,
    neutrix: Neutrix,
}

impl ExternalScalar {
    pub fn new(rep: EpsScalar, neutrix: Neutrix) -> Self {
        let rep = match neutrix {
            Neutrix::Zero => rep,
            Neutrix::FullLine => EpsScalar::zero(),
            Neutrix::Scaled(m, kind) => {
                let cutoff = match kind {
                    NeutrixKind::Oslash => m,
                    NeutrixKind::Pound => m - 1,
                };
                rep.laurent_truncate(cutoff)
            }
        };
        ExternalScalar { rep, neutrix }
    }

    pub fn exact(rep: EpsScalar) -> Self {
        ExternalScalar::new(rep, Neutrix::Zero)
    }

    pub fn neutricial(n: Neutrix) -> Self {
        ExternalScalar::new(EpsScalar::zero(), n)
    }

    pub fn zero() -> Self {
        ExternalScalar::exact(EpsScalar::zero())
    }

    pub fn rep(&self) -> &EpsScalar {
        &self.rep
    }

    pub fn neutrix(&self) -> Neutrix {
        self.neutrix
    }

    pub fn contains(&self, f: &EpsScalar) -> bool {
        self.neutrix.contains(&f.sub(&self.rep))
    }

    pub fn is_zeroless(&self) -> bool {
        !self.contains(&EpsScalar::zero())
    }

    pub fn is_neutricial(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero() && self.neutrix == Neutrix::Zero
    }

    pub fn neg(&self) -> Self {
        // negation fixes every neutrix, so the form stays canonical
        ExternalScalar {
            rep: self.rep.neg(),
            neutrix: self.neutrix,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        ExternalScalar::new(
            self.rep.add(&other.rep),
            ntx_sum(self.neutrix, other.neutrix),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let rep = self.rep.mul(&other.rep);
        let n = ntx_sum(
            ntx_sum(
                ntx_scale(&other.rep, self.neutrix),
                ntx_scale(&self.rep, other.neutrix),
            ),
            ntx_mul(self.neutrix, other.neutrix),
        );
        ExternalScalar::new(rep, n)
    }

    /// Multiply by a single scale scalar; exact (distributive) case.
    pub fn scale(&self, f: &EpsScalar) -> Self {
        ExternalScalar::new(self.rep.mul(f), ntx_scale(f, self.neutrix))
    }

    pub fn inv(&self) -> Result<Self, ExtNumError> {
        if !self.is_zeroless() {
            return Err(ExtNumError::NotZeroless);
        }
        let a = self.rep.recip()?;
        let a2 = a.mul(&a);
        Ok(ExternalScalar::new(a, ntx_scale(&a2, self.neutrix)))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExtNumError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Relative imprecision N(alpha) = A/a, defined for zeroless alpha.
    pub fn relative_imprecision(&self) -> Result<Neutrix, ExtNumError> {
        if !self.is_zeroless() {
            return Err(ExtNumError::NotZeroless);
        }
        Ok(ntx_scale(&self.rep.recip()?, self.neutrix))
    }

    /// Set inclusion of external scalars.
    pub fn subset_of(&self, other: &Self) -> bool {
        self.neutrix.subset_of(&other.neutrix) && other.contains(&self.rep)
    }

    /// True when the two sets share a point.
    pub fn intersects(&self, other: &Self) -> bool {
        ntx_sum(self.neutrix, other.neutrix).contains(&self.rep.sub(&other.rep))
    }

    pub fn ext_leq(&self, other: &Self) -> bool {
        self.intersects(other) || self.rep < other.rep
    }

    pub fn ext_lt(&self, other: &Self) -> bool {
        !self.intersects(other) && self.rep < other.rep
    }

    /// Absolute value: flips the representative's sign; neutrices are
    /// symmetric so the error part is unchanged.
    pub fn abs(&self) -> Self {
        if self.rep.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Absorber test extended to zeroless external scalars through the shared
    /// valuation of their representatives. Neutricial input is unsupported.
    pub fn is_absorber_of(&self, n: Neutrix) -> Result<bool, ExtNumError> {
        if !self.is_zeroless() {
            return Err(ExtNumError::NotZeroless);
        }
        Ok(is_absorber(&self.rep, n))
    }
}

// ---------------------------------------------------------------------------
// Display
// ---------------------------------------------------------------------------

/// Renders a rational as a plain decimal when the denominator divides a power
/// of ten, otherwise as p/q.
pub fn format_rat(r: &Rat) -> String {
    let (mut num, den) = (r.numer().clone(), r.denom().clone());
    let neg = num.is_negative();
    if neg {
        num = -num;
    }
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut d = den.clone();
    let mut twos = 0u32;
    while d.is_even() && !d.is_zero() {
        d /= &two;
        twos += 1;
    }
    let mut fives = 0u32;
    while (&d % &five).is_zero() && !d.is_zero() {
        d /= &five;
        fives += 1;
    }
    let sign = if neg { "-" } else { "" };
    if d.is_one() {
        // scale to denominator 10^k
        let k = twos.max(fives);
        num *= two.pow(k - twos) * five.pow(k - fives);
        if k == 0 {
            return format!("{sign}{num}");
        }
        let digits = num.to_string();
        let k = k as usize;
        if digits.len() <= k {
            let frac = format!("{:0>width$}", digits, width = k);
            format!("{sign}0.{frac}")
        } else {
            let (int_part, frac_part) = digits.split_at(digits.len() - k);
            format!("{sign}{int_part}.{frac_part}")
        }
    } else {
        format!("{sign}{num}/{den}")
    }
}

fn format_scale_power(k: i64) -> String {
    match k {
        1 => "eps".to_string(),
        _ => format!("eps^{k}"),
    }
}

/// One Laurent term `c * eps^k` in input-grammar syntax; `leading` controls
/// whether a positive sign is suppressed.
fn format_term(c: &Rat, k: i64, leading: bool) -> String {
    let mut s = String::new();
    if c.is_negative() {
        s.push('-');
    } else if !leading {
        s.push('+');
    }
    let a = c.abs();
    if k == 0 {
        s.push_str(&format_rat(&a));
    } else if a.is_one() {
        s.push_str(&format_scale_power(k));
    } else {
        s.push_str(&format_rat(&a));
        s.push('*');
        s.push_str(&format_scale_power(k));
    }
    s
}

impl fmt::Display for EpsScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.is_laurent() {
            let mut out = String::new();
            for (i, (c, k)) in self.laurent_terms().iter().enumerate() {
                out.push_str(&format_term(c, *k, i == 0));
            }
            return write!(f, "{out}");
        }
        // general rational function; outside the input grammar, display only
        let num = EpsScalar::normalized(self.num.clone(), Poly::one(), self.shift);
        let den = EpsScalar::normalized(self.den.clone(), Poly::one(), 0);
        write!(f, "({num})/({den})")
    }
}

impl fmt::Display for Neutrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Neutrix::Zero => write!(f, "0"),
            Neutrix::FullLine => write!(f, "R"),
            Neutrix::Scaled(m, kind) => {
                let k = match kind {
                    NeutrixKind::Oslash => "o",
                    NeutrixKind::Pound => "L",
                };
                if *m == 0 {
                    write!(f, "{k}")
                } else {
                    write!(f, "{}*{k}", format_scale_power(*m))
                }
            }
        }
    }
}

impl fmt::Display for ExternalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rep.is_zero(), self.neutrix) {
            (true, Neutrix::Zero) => write!(f, "0"),
            (true, n) => write!(f, "{n}"),
            (false, Neutrix::Zero) => write!(f, "{}", self.rep),
            (false, n) => write!(f, "{}+{n}", self.rep),
        }
    }
}
