//! Arithmetic in GF(2^n).
//!
//! Elements are `n`-bit integers. The coordinate vector `[α_1, …, α_n]` is read
//! most-significant bit first, so the subfield GF(2^(n-1)) sits at
//! `0..2^(n-1)` and the shift element `e = [1, 0, …, 0]` is `2^(n-1)`.

use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

pub const MAX_N: u32 = 16;

/// An element of GF(2^n) by its coordinate bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    pub fn value(self) -> u32 {
        self.0
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn add(x: FieldElement, y: FieldElement) -> FieldElement {
    x + y
}

/// The ambient field: dimension plus a reduction polynomial (bit i = coefficient of x^i).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    n: u32,
    poly: u32,
}

/// Default reduction polynomial for small dimensions.
pub fn default_poly(n: u32) -> Option<u32> {
    match n {
        1 => Some(0b10),
        2 => Some(0b111),
        3 => Some(0b1011),
        4 => Some(0b1_0011),
        5 => Some(0b10_0101),
        6 => Some(0b100_0011),
        7 => Some(0b1000_0011),
        8 => Some(0b1_0001_1011),
        _ => None,
    }
}

impl FieldSpec {
    pub fn new(n: u32, poly: u32) -> Result<Self> {
        check_dimension(n)?;
        if poly >> n != 1 || !is_irreducible(poly) {
            return Err(Error::NotIrreducible { n, poly });
        }
        Ok(FieldSpec { n, poly })
    }

    pub fn with_default_poly(n: u32) -> Result<Self> {
        check_dimension(n)?;
        let poly = default_poly(n).ok_or(Error::NoDefaultPolynomial(n))?;
        FieldSpec::new(n, poly)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn order(&self) -> u32 {
        1 << self.n
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value >= self.order() {
            return Err(Error::ElementOutOfRange { element: value as u64, n: self.n });
        }
        Ok(FieldElement(value))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order()).map(FieldElement)
    }

    /// Carry-less product reduced modulo the field polynomial.
    pub fn multiply(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let mut a = x.0 as u64;
        let mut b = y.0 as u64;
        let mut acc = 0u64;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
        }
        FieldElement(poly_mod(acc, self.poly as u64) as u32)
    }

    pub fn square(&self, x: FieldElement) -> FieldElement {
        self.multiply(x, x)
    }

    /// `x + x^2 + x^4 + … + x^(2^(n-1))`, which lands in GF(2).
    pub fn trace(&self, x: FieldElement) -> u8 {
        let mut acc = FieldElement::ZERO;
        let mut power = x;
        for _ in 0..self.n {
            acc = acc + power;
            power = self.square(power);
        }
        debug_assert!(acc.0 <= 1, "trace left the prime field");
        acc.0 as u8
    }

    pub fn inverse(&self, x: FieldElement) -> Option<FieldElement> {
        if x.0 == 0 {
            return None;
        }
        // x^(2^n - 2)
        let mut result = FieldElement(1);
        let mut base = x;
        let mut e = self.order() - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.multiply(result, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        Some(result)
    }
}

pub fn check_dimension(n: u32) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(())
}

fn degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, m: u64) -> u64 {
    let dm = degree(m);
    while a != 0 && degree(a) >= dm {
        a ^= m << (degree(a) - dm);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
pub fn is_irreducible(poly: u32) -> bool {
    let p = poly as u64;
    let d = degree(p);
    if d < 1 {
        return false;
    }
    for fd in 1..=d / 2 {
        for low in 0..(1u64 << fd) {
            let f = (1u64 << fd) | low;
            if poly_mod(p, f) == 0 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: u32) -> FieldSpec {
        FieldSpec::with_default_poly(n).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(add(FieldElement(1), FieldElement(2)), FieldElement(3));
        assert_eq!(add(FieldElement(5), FieldElement(5)), FieldElement(0));
        assert_eq!(add(FieldElement(0), FieldElement(7)), FieldElement(7));
    }

    // schoolbook product followed by long division, no shared helpers
    fn slow_mul(x: u32, y: u32, poly: u32, n: u32) -> u32 {
        let mut prod = 0u64;
        for i in 0..32 {
            if (y >> i) & 1 == 1 {
                prod ^= (x as u64) << i;
            }
        }
        for bit in (n as u64..64).rev() {
            if (prod >> bit) & 1 == 1 {
                prod ^= (poly as u64) << (bit - n as u64);
            }
        }
        prod as u32
    }

    #[test]
    fn multiply_examples() {
        let f3 = f(3);
        assert_eq!(f3.multiply(FieldElement(2), FieldElement(4)), FieldElement(3));
        for x in f3.elements() {
            assert_eq!(f3.multiply(x, FieldElement(1)), x);
            assert_eq!(f3.multiply(x, FieldElement(0)), FieldElement(0));
        }
        assert_eq!(slow_mul(2, 4, 0b1011, 3), 3);
    }

    #[test]
    fn multiply_matches_schoolbook() {
        for n in 1..=8 {
            let field = f(n);
            for x in 0..field.order() {
                for y in 0..field.order() {
                    assert_eq!(
                        field.multiply(FieldElement(x), FieldElement(y)).0,
                        slow_mul(x, y, field.poly(), n)
                    );
                }
            }
        }
    }

    #[test]
    fn default_polys_are_irreducible() {
        for n in 1..=8 {
            assert!(is_irreducible(default_poly(n).unwrap()), "n = {n}");
        }
        assert!(!is_irreducible(0b101)); // x^2 + 1 = (x + 1)^2
        assert!(!is_irreducible(0b1_0101)); // x^4 + x^2 + 1
        assert!(FieldSpec::new(4, 0b1_0101).is_err());
        assert!(FieldSpec::new(4, 0b1011).is_err());
        assert!(FieldSpec::new(0, 0b11).is_err());
        assert!(FieldSpec::new(17, 0b11).is_err());
        assert!(FieldSpec::with_default_poly(12).is_err());
        // x^16 + x^5 + x^3 + x^2 + 1
        assert!(FieldSpec::new(16, 0x1002D).is_ok());
    }

    #[test]
    fn nonzero_elements_form_a_group() {
        for n in 1..=8 {
            let field = f(n);
            for x in 1..field.order() {
                let inv = field.inverse(FieldElement(x)).unwrap();
                assert_eq!(field.multiply(FieldElement(x), inv), FieldElement(1), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn field_axioms_small() {
        for n in 1..=4 {
            let field = f(n);
            for x in field.elements() {
                assert_eq!(x + x, FieldElement::ZERO);
                for y in field.elements() {
                    assert_eq!(x + y, y + x);
                    for z in field.elements() {
                        assert_eq!((x + y) + z, x + (y + z));
                        assert_eq!(
                            field.multiply(x, y + z),
                            field.multiply(x, y) + field.multiply(x, z)
                        );
                        assert_eq!(
                            field.multiply(field.multiply(x, y), z),
                            field.multiply(x, field.multiply(y, z))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_linear_and_balanced() {
        assert_eq!(f(3).trace(FieldElement(1)), 1);
        for n in 1..=8 {
            let field = f(n);
            assert_eq!(field.trace(FieldElement::ZERO), 0);
            let ones = field.elements().filter(|&x| field.trace(x) == 1).count();
            assert_eq!(ones, 1 << (n - 1), "n = {n}");
            for x in field.elements() {
                for y in field.elements() {
                    assert_eq!(field.trace(x + y), field.trace(x) ^ field.trace(y));
                }
            }
        }
    }
}
