//! Exact finite-field arithmetic over prime fields F_q and binary extension
//! fields F_{2^w}, w <= 16.
//!
//! Elements are canonical integers in `[0, order)`: residues mod q for prime
//! fields, polynomial coefficient bitmasks for binary fields (so over F_4 with
//! modulus t^2+t+1 the element t is 2 and t+1 is 3).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default irreducible polynomial of degree w over GF(2), as a bitmask
/// including the leading x^w term. Index 0 is unused.
const DEFAULT_POLY: [u32; 17] = [
    0,
    0b11,
    0b111,
    0b1011,
    0b10011,
    0b100101,
    0b1000011,
    0b10000011,
    0x11D,
    0b1000010001,
    0b10000001001,
    0b100000000101,
    0b1000001010011,
    0b10000000011011,
    0b100010001000011,
    0b1000000000000011,
    0x1100B,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Prime,
    Binary,
}

/// A finite field handle: F_q for prime q, or F_{2^w} for w <= 16.
///
/// `Field` is a small immutable value; all arithmetic goes through its
/// methods and operates on canonical integer encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    kind: Kind,
    order: u32,
    /// Prime modulus q, or the irreducible polynomial bitmask.
    modulus: u32,
    /// Extension degree (0 for prime fields).
    degree: u32,
}

/// Serialized form: `{"kind":"prime","q":5}` or `{"kind":"gf2","w":2,"poly":7}`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FieldWire {
    Prime { q: u32 },
    Gf2 { w: u32, poly: u32 },
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self.kind {
            Kind::Prime => FieldWire::Prime { q: self.modulus },
            Kind::Binary => FieldWire::Gf2 {
                w: self.degree,
                poly: self.modulus,
            },
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = FieldWire::deserialize(d)?;
        let field = match wire {
            FieldWire::Prime { q } => Field::prime(q),
            FieldWire::Gf2 { w, poly } => Field::binary_with_poly(w, poly),
        };
        field.map_err(serde::de::Error::custom)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` divided by `b` as polynomials over GF(2).
fn poly_rem(mut a: u64, b: u64) -> u64 {
    debug_assert!(b != 0);
    let db = 63 - b.leading_zeros() as i32;
    loop {
        let da = 63 - a.leading_zeros() as i32;
        if a == 0 || da < db {
            return a;
        }
        a ^= b << (da - db);
    }
}

/// Trial division by every polynomial of degree 1..=w/2.
fn is_irreducible(poly: u32, w: u32) -> bool {
    if w == 0 || poly >> w != 1 {
        return false;
    }
    if w == 1 {
        return true;
    }
    if poly & 1 == 0 {
        return false; // divisible by x
    }
    for dd in 1..=w / 2 {
        for d in (1u64 << dd)..(1u64 << (dd + 1)) {
            if poly_rem(poly as u64, d) == 0 {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// The prime field F_q. Errors if q is not prime or exceeds 2^16.
    pub fn prime(q: u32) -> Result<Field> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q as u64));
        }
        if q > 1 << 16 {
            return Err(Error::InvalidField(format!(
                "prime {q} exceeds the 2^16 order limit"
            )));
        }
        Ok(Field {
            kind: Kind::Prime,
            order: q,
            modulus: q,
            degree: 0,
        })
    }

    /// F_{2^w} with the default irreducible polynomial for w in 1..=16.
    pub fn binary(w: u32) -> Result<Field> {
        if !(1..=16).contains(&w) {
            return Err(Error::InvalidField(format!(
                "extension degree {w} out of range 1..=16"
            )));
        }
        Self::binary_with_poly(w, DEFAULT_POLY[w as usize])
    }

    /// F_{2^w} with an explicit irreducible polynomial bitmask (leading term included).
    pub fn binary_with_poly(w: u32, poly: u32) -> Result<Field> {
        if !(1..=16).contains(&w) {
            return Err(Error::InvalidField(format!(
                "extension degree {w} out of range 1..=16"
            )));
        }
        if !is_irreducible(poly, w) {
            return Err(Error::ReduciblePolynomial { poly, degree: w });
        }
        Ok(Field {
            kind: Kind::Binary,
            order: 1 << w,
            modulus: poly,
            degree: w,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_binary(&self) -> bool {
        self.kind == Kind::Binary
    }

    /// Field characteristic: q for prime fields, 2 for binary fields.
    pub fn characteristic(&self) -> u32 {
        match self.kind {
            Kind::Prime => self.modulus,
            Kind::Binary => 2,
        }
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.order && b < self.order);
        match self.kind {
            Kind::Prime => {
                let s = a + b;
                if s >= self.order {
                    s - self.order
                } else {
                    s
                }
            }
            Kind::Binary => a ^ b,
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        debug_assert!(a < self.order);
        match self.kind {
            Kind::Prime => {
                if a == 0 {
                    0
                } else {
                    self.order - a
                }
            }
            Kind::Binary => a,
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.order && b < self.order);
        match self.kind {
            Kind::Prime => ((a as u64 * b as u64) % self.modulus as u64) as u32,
            Kind::Binary => {
                // Carry-less product, then reduce modulo the field polynomial.
                let mut prod: u64 = 0;
                let mut x = a as u64;
                let mut y = b;
                while y != 0 {
                    if y & 1 == 1 {
                        prod ^= x;
                    }
                    x <<= 1;
                    y >>= 1;
                }
                poly_rem(prod, self.modulus as u64) as u32
            }
        }
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.order as u64 - 2))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

/// A field element paired with its field, for callers that want checked
/// mixed-field arithmetic. Internal matrix code works on raw canonical
/// values through [`Field`] instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl FieldElement {
    pub fn new(field: Field, value: u32) -> Result<FieldElement> {
        if value >= field.order() {
            return Err(Error::InvalidField(format!(
                "value {value} out of range for field of order {}",
                field.order()
            )));
        }
        Ok(FieldElement { field, value })
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> Field {
        self.field
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(FieldElement {
            field: self.field,
            value: self.field.add(self.value, other.value),
        })
    }

    pub fn checked_sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(FieldElement {
            field: self.field,
            value: self.field.sub(self.value, other.value),
        })
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same_field(other)?;
        Ok(FieldElement {
            field: self.field,
            value: self.field.mul(self.value, other.value),
        })
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field,
            value: self.field.neg(self.value),
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(FieldElement {
            field: self.field,
            value: self.field.inv(self.value)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn prime_field_basics() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.inv(2).unwrap(), 3);
        assert_eq!(f5.add(4, 3), 2);
        assert_eq!(f5.neg(2), 3);
    }

    #[test]
    fn non_prime_order_rejected() {
        assert!(matches!(Field::prime(4), Err(Error::NotPrime(4))));
        assert!(matches!(Field::prime(1), Err(Error::NotPrime(1))));
    }

    #[test]
    fn f4_polynomial_arithmetic() {
        // t^2 + t + 1, so t * t = t + 1 (2 * 2 = 3 in the bitmask encoding).
        let f4 = Field::binary(2).unwrap();
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(f4.mul(2, 3), 1);
        assert_eq!(f4.add(3, 2), 1);
    }

    #[test]
    fn reducible_polynomial_rejected() {
        // x^2 + 1 = (x+1)^2 over GF(2).
        assert!(matches!(
            Field::binary_with_poly(2, 0b101),
            Err(Error::ReduciblePolynomial { .. })
        ));
    }

    #[test]
    fn inv_zero_errors() {
        let f5 = Field::prime(5).unwrap();
        assert!(matches!(f5.inv(0), Err(Error::DivisionByZero)));
    }

    #[test]
    fn default_polynomials_are_irreducible() {
        for w in 1..=16 {
            Field::binary(w).unwrap();
        }
    }

    fn small_fields() -> Vec<Field> {
        let mut fields = Vec::new();
        for q in 2..=256u32 {
            if is_prime(q) {
                fields.push(Field::prime(q).unwrap());
            }
        }
        for w in 1..=8 {
            fields.push(Field::binary(w).unwrap());
        }
        fields
    }

    #[test]
    fn inverses_exhaustive_up_to_256() {
        for f in small_fields() {
            for a in 1..f.order() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "field order {}", f.order());
            }
        }
    }

    #[test]
    fn randomized_field_axioms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for f in [
            Field::prime(5).unwrap(),
            Field::prime(251).unwrap(),
            Field::binary(4).unwrap(),
            Field::binary(8).unwrap(),
        ] {
            for _ in 0..10_000 {
                let a = rng.gen_range(0..f.order());
                let b = rng.gen_range(0..f.order());
                let c = rng.gen_range(0..f.order());
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, f.neg(a)), 0);
            }
        }
    }

    #[test]
    fn characteristic_two_self_cancellation() {
        for w in 1..=8 {
            let f = Field::binary(w).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, a), 0);
            }
        }
    }

    #[test]
    fn element_field_mismatch() {
        let f5 = Field::prime(5).unwrap();
        let f7 = Field::prime(7).unwrap();
        let a = FieldElement::new(f5, 2).unwrap();
        let b = FieldElement::new(f7, 2).unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::FieldMismatch)));
    }

    #[test]
    fn field_json_round_trip() {
        let f5 = Field::prime(5).unwrap();
        let s = serde_json::to_string(&f5).unwrap();
        assert_eq!(s, r#"{"kind":"prime","q":5}"#);
        assert_eq!(serde_json::from_str::<Field>(&s).unwrap(), f5);

        let f4 = Field::binary(2).unwrap();
        let s = serde_json::to_string(&f4).unwrap();
        assert_eq!(s, r#"{"kind":"gf2","w":2,"poly":7}"#);
        assert_eq!(serde_json::from_str::<Field>(&s).unwrap(), f4);
    }
}
