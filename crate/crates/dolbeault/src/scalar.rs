//! Exact arithmetic in the coefficient field Q(i)(s), where `s` stands for
//! q^(1/2) and q = s^2.
//!
//! A [`Scalar`] is a quotient of two polynomials in `s` whose coefficients are
//! Gaussian rationals. Every operation returns the canonical representative
//! (coprime numerator and denominator, monic denominator), so `==` is
//! mathematical equality.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
}

/// A Gaussian rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Gauss {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gauss {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gauss { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Gauss { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Gauss::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Gauss { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Gauss::from_int(1)
    }

    pub fn i() -> Self {
        Gauss { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Gauss) -> Gauss {
        if self.im.is_zero() && o.im.is_zero() {
            return Gauss::real(&self.re * &o.re);
        }
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn neg(&self) -> Gauss {
        Gauss { re: -&self.re, im: -&self.im }
    }

    pub fn conj(&self) -> Gauss {
        Gauss { re: self.re.clone(), im: -&self.im }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Gauss> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Gauss::real(self.re.recip()));
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Gauss { re: &self.re / &norm, im: -&self.im / &norm })
    }
}

/// Polynomial in `s` with Gaussian-rational coefficients, lowest degree first,
/// with no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Gauss>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Gauss::one()] }
    }

    pub fn constant(c: Gauss) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * s^k`.
    pub fn monomial(c: Gauss, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Gauss::zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Gauss>) -> Self {
        while coeffs.last().is_some_and(Gauss::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Gauss] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Gauss> {
        self.coeffs.last()
    }

    /// Lowest power of `s` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// True when the polynomial is `c * s^k` for a single term.
    pub fn is_monomial(&self) -> bool {
        match (self.valuation(), self.degree()) {
            (Some(v), Some(d)) => v == d,
            _ => false,
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => out.push(a.add(b)),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(Gauss::neg).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        let mut out = vec![Gauss::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Gauss) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![Gauss::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Divide by `s^k`; caller guarantees exactness.
    fn unshift(&self, k: usize) -> Poly {
        Poly { coeffs: self.coeffs[k.min(self.coeffs.len())..].to_vec() }
    }

    pub fn conj(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(Gauss::conj).collect() }
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let inv_lead = d.lead().and_then(Gauss::inv).expect("nonzero lead");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Gauss::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = r[k].mul(&inv_lead);
            for (j, dc) in d.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                r[idx] = r[idx].sub(&c.mul(dc));
            }
            q[k - dd] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    /// Scale to leading coefficient one; returns the removed leading coefficient.
    pub fn monic(&self) -> (Gauss, Poly) {
        match self.lead() {
            None => (Gauss::one(), Poly::zero()),
            Some(l) if l.is_one() => (Gauss::one(), self.clone()),
            Some(l) => {
                let inv = l.inv().expect("nonzero lead");
                (l.clone(), self.scale(&inv))
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.monic().1;
        }
        if o.is_zero() {
            return self.monic().1;
        }
        if self.degree() == Some(0) || o.degree() == Some(0) {
            return Poly::one();
        }
        // a monomial c*s^k only shares powers of s
        if self.is_monomial() || o.is_monomial() {
            let k = self.valuation().unwrap().min(o.valuation().unwrap());
            return Poly::monomial(Gauss::one(), k);
        }
        let mut a = self.monic().1;
        let mut b = o.monic().1;
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic().1;
        }
        a
    }

    pub fn eval(&self, x: &Gauss) -> Gauss {
        let mut acc = Gauss::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    fn exact_div(&self, d: &Poly) -> Poly {
        if d.is_one() {
            return self.clone();
        }
        if d.is_monomial() && d.lead().is_some_and(Gauss::is_one) {
            return self.unshift(d.degree().unwrap());
        }
        let (q, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }
}

/// Element of Q(i)(s) in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_poly(Poly::constant(Gauss::from_int(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::from_poly(Poly::constant(Gauss::real(r)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_gauss(g: Gauss) -> Self {
        Scalar::from_poly(Poly::constant(g))
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar { num: p, den: Poly::one() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar::from_gauss(Gauss::i())
    }

    /// `s = q^(1/2)`.
    pub fn s() -> Self {
        Scalar::s_pow(1)
    }

    /// `q = s^2`.
    pub fn q() -> Self {
        Scalar::s_pow(2)
    }

    /// `s^k` for any integer `k`, i.e. `q^(k/2)`.
    pub fn s_pow(k: i64) -> Self {
        let m = Poly::monomial(Gauss::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Scalar { num: m, den: Poly::one() }
        } else {
            Scalar { num: Poly::one(), den: m }
        }
    }

    /// `q^k`.
    pub fn q_pow(k: i64) -> Self {
        Scalar::s_pow(2 * k)
    }

    /// Build `num/den` and canonicalize.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::normalize(num, den))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    fn normalize(num: Poly, den: Poly) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.exact_div(&g), den.exact_div(&g)) };
        let (lead, den) = den.monic();
        let num = if lead.is_one() { num } else { num.scale(&lead.inv().unwrap()) };
        Scalar { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value lies in Q(i) (no dependence on s).
    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.degree().unwrap_or(0) == 0
    }

    /// The Q(i) value when constant.
    pub fn as_constant(&self) -> Option<Gauss> {
        if !self.is_constant() {
            return None;
        }
        Some(self.num.coeffs().first().cloned().unwrap_or_else(Gauss::zero))
    }

    pub fn add_ref(&self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: self.num.add(&o.num), den: Poly::one() };
        }
        if self.den == o.den {
            return Scalar::normalize(self.num.add(&o.num), self.den.clone());
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Scalar::normalize(num, self.den.mul(&o.den))
    }

    pub fn neg_ref(&self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub_ref(&self, o: &Scalar) -> Scalar {
        self.add_ref(&o.neg_ref())
    }

    pub fn mul_ref(&self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return Scalar { num: self.num.mul(&o.num), den: Poly::one() };
        }
        // cross-cancel before multiplying to keep degrees small
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.exact_div(&g1);
        let d2 = o.den.exact_div(&g1);
        let n2 = o.num.exact_div(&g2);
        let d1 = self.den.exact_div(&g2);
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        let (lead, den) = den.monic();
        let num = if lead.is_one() { num } else { num.scale(&lead.inv().unwrap()) };
        Scalar { num, den }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let (lead, num) = self.num.monic();
        let den = self.den.scale(&lead.inv().unwrap());
        Ok(Scalar { num: den, den: num })
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul_ref(&o.inv()?))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }

    /// Complex conjugation: negates `i`, fixes `s`.
    pub fn conj(&self) -> Scalar {
        Scalar { num: self.num.conj(), den: self.den.conj() }
    }

    /// Evaluate at `s = s0`; `None` when the denominator vanishes there.
    pub fn eval(&self, s0: &Gauss) -> Option<Gauss> {
        let d = self.den.eval(s0);
        let n = self.num.eval(s0);
        d.inv().map(|di| n.mul(&di))
    }

    /// Evaluate at a rational point.
    pub fn eval_rational(&self, s0: &BigRational) -> Option<Gauss> {
        self.eval(&Gauss::real(s0.clone()))
    }

    /// When the value is `c * s^k` for constant `c`, return `(c, k)`.
    pub fn as_monomial(&self) -> Option<(Gauss, i64)> {
        if !self.num.is_monomial() || !self.den.is_monomial() {
            return None;
        }
        let k = self.num.degree().unwrap() as i64 - self.den.degree().unwrap() as i64;
        Some((self.num.lead().unwrap().clone(), k))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$imp(o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$imp(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                self.$imp(o)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$imp(&o)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = self.add_ref(o);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = self.sub_ref(o);
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = self.mul_ref(o);
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

// ---------------------------------------------------------------------------
// printing

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `q`-power text for `s^k`, empty for `k = 0`.
fn fmt_power(k: i64) -> String {
    match k {
        0 => String::new(),
        2 => "q".to_string(),
        k if k % 2 == 0 => format!("q^{}", k / 2),
        k => format!("q^({k}/2)"),
    }
}

/// Signed term list for `sum c_k s^(k + offset)`, highest power first.
fn fmt_terms(p: &Poly, offset: i64) -> String {
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let pw = fmt_power(k as i64 + offset);
        let (neg, body) = if c.is_real() {
            let neg = c.re.is_negative();
            let a = c.re.abs();
            let body = if pw.is_empty() {
                fmt_rational(&a)
            } else if a.is_one() {
                pw.clone()
            } else {
                format!("{}*{}", fmt_rational(&a), pw)
            };
            (neg, body)
        } else if c.re.is_zero() {
            let neg = c.im.is_negative();
            let a = c.im.abs();
            let coef = if a.is_one() { "i".to_string() } else { format!("{}*i", fmt_rational(&a)) };
            let body = if pw.is_empty() { coef } else { format!("{coef}*{pw}") };
            (neg, body)
        } else {
            let im_sign = if c.im.is_negative() { "-" } else { "+" };
            let im_abs = c.im.abs();
            let im = if im_abs.is_one() { "i".to_string() } else { format!("{}*i", fmt_rational(&im_abs)) };
            let coef = format!("({} {} {})", fmt_rational(&c.re), im_sign, im);
            let body = if pw.is_empty() { coef } else { format!("{coef}*{pw}") };
            (false, body)
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return f.write_str(&fmt_terms(&self.num, 0));
        }
        if self.den.is_monomial() {
            // Laurent polynomial: fold the s-power into the exponents
            let k = self.den.degree().unwrap() as i64;
            return f.write_str(&fmt_terms(&self.num, -k));
        }
        let n = fmt_terms(&self.num, 0);
        let d = fmt_terms(&self.den, 0);
        let single = self.num.coeffs().iter().filter(|c| !c.is_zero()).count() == 1
            && self.num.lead().is_some_and(|c| c.is_real() || c.re.is_zero());
        if single && !n.starts_with('-') {
            write!(f, "{n}/({d})")
        } else {
            write!(f, "({n})/({d})")
        }
    }
}

impl std::str::FromStr for Scalar {
    type Err = crate::expr::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::expr::parse_scalar(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::q()
    }

    #[test]
    fn add_identity_and_inverse() {
        let s2 = Scalar::s_pow(2);
        assert_eq!(&s2 + &Scalar::zero(), s2);
        assert!((Scalar::s() + (-Scalar::s())).is_zero());
    }

    #[test]
    fn cancellation_is_forced() {
        let one = Scalar::one();
        let num = &q() * &q() - &one;
        let den = &q() - &one;
        let r = num.div(&den).unwrap();
        assert_eq!(r + Scalar::zero(), q() + one);
    }

    #[test]
    fn products_of_powers() {
        assert_eq!(Scalar::s() * Scalar::s(), q());
        assert_eq!(Scalar::s() * q(), Scalar::s_pow(3));
        let one = Scalar::one();
        assert_eq!((&q() - &one) * (&q() + &one), &q() * &q() - &one);
    }

    #[test]
    fn inverses() {
        assert_eq!(q().inv().unwrap(), Scalar::s_pow(-2));
        let qp1 = q() + Scalar::one();
        assert!((qp1.inv().unwrap() * qp1).is_one());
        assert_eq!(Scalar::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn conjugation() {
        let is = Scalar::i() * Scalar::s();
        assert_eq!(is.conj(), -(Scalar::i() * Scalar::s()));
        assert_eq!(Scalar::s_pow(3).conj(), Scalar::s_pow(3));
    }

    #[test]
    fn canonical_denominator_is_monic() {
        let x = Scalar::from_int(3).div(&(Scalar::from_int(2) * q() + Scalar::from_int(4))).unwrap();
        assert!(x.denominator().lead().unwrap().is_one());
        let y = Scalar::from_ratio(3, 2).div(&(q() + Scalar::from_int(2))).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn display_shapes() {
        assert_eq!(Scalar::s_pow(3).to_string(), "q^(3/2)");
        assert_eq!(Scalar::s_pow(-2).to_string(), "q^-1");
        assert_eq!((q() * q() - Scalar::one()).to_string(), "q^2 - 1");
        assert_eq!(Scalar::zero().to_string(), "0");
        assert_eq!((-Scalar::s()).to_string(), "-q^(1/2)");
    }

    #[test]
    fn eval_is_a_homomorphism_on_a_sample() {
        let a = q() + Scalar::i();
        let b = Scalar::s_pow(-3) - Scalar::from_ratio(1, 3);
        let s0 = Gauss::real(BigRational::new(BigInt::from(5), BigInt::from(7)));
        let lhs = (&a * &b).eval(&s0).unwrap();
        let rhs = a.eval(&s0).unwrap().mul(&b.eval(&s0).unwrap());
        assert_eq!(lhs, rhs);
    }
}
