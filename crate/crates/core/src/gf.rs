//! Exact arithmetic in prime fields F_q with q an odd prime below 2^16.
//!
//! Every downstream computation — encoding, repair solves, bandwidth audits —
//! reduces to the two primitives here: modular element arithmetic and an
//! exact Gaussian elimination for power-sum systems of the form
//! `sum_j g_j^t x_j = rhs_t`.

use crate::{Error, Result};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A prime-field context. The modulus is validated once on construction;
/// elements then carry it so mixed-field arithmetic is caught immediately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    q: u16,
}

impl Field {
    /// Builds F_q for an odd prime `q`.
    pub fn new(q: u16) -> Result<Self> {
        if q < 3 || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Field { q })
    }

    pub fn modulus(&self) -> u16 {
        self.q
    }

    /// Embeds an integer into the field, reducing modulo q.
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: (value % u64::from(self.q)) as u16,
            q: self.q,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// The smallest primitive root of F_q.
    pub fn primitive_root(&self) -> FieldElement {
        for candidate in 1..self.q {
            let e = self.element(u64::from(candidate));
            if e.is_primitive().expect("candidate is nonzero") {
                return e;
            }
        }
        unreachable!("every prime field has a primitive root")
    }
}

/// One element of F_q, stored fully reduced.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u16,
    q: u16,
}

impl FieldElement {
    pub fn value(self) -> u16 {
        self.value
    }

    pub fn modulus(self) -> u16 {
        self.q
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// a^e by square-and-multiply, with the convention a^0 = 1 (also for a = 0).
    pub fn pow(self, mut e: u64) -> FieldElement {
        let q = u64::from(self.q);
        let mut base = u64::from(self.value);
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        FieldElement {
            value: acc as u16,
            q: self.q,
        }
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(self.q));
        }
        Ok(self.pow(u64::from(self.q) - 2))
    }

    /// True iff the multiplicative order of the element is exactly q - 1.
    pub fn is_primitive(self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let group_order = u64::from(self.q) - 1;
        Ok(prime_factors(group_order)
            .into_iter()
            .all(|p| self.pow(group_order / p).value != 1))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.q)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[inline]
fn check_moduli(a: FieldElement, b: FieldElement) {
    assert_eq!(
        a.q, b.q,
        "mixed field moduli: F_{} vs F_{} (elements from different codes)",
        a.q, b.q
    );
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        check_moduli(self, rhs);
        let sum = u32::from(self.value) + u32::from(rhs.value);
        FieldElement {
            value: (sum % u32::from(self.q)) as u16,
            q: self.q,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self + (-rhs)
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        check_moduli(self, rhs);
        let prod = u32::from(self.value) * u32::from(rhs.value);
        FieldElement {
            value: (prod % u32::from(self.q)) as u16,
            q: self.q,
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: if self.value == 0 { 0 } else { self.q - self.value },
            q: self.q,
        }
    }
}

/// Deterministic trial-division primality test; q < 2^16 keeps this trivial.
pub fn is_prime(q: u16) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut d = 3u32;
    while d * d <= u32::from(q) {
        if u32::from(q) % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= x {
        if x % d == 0 {
            factors.push(d);
            while x % d == 0 {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        factors.push(x);
    }
    factors
}

/// Solves `sum_j generators[j]^t * x[j] = rhs[t]` for `t in [0, r)`.
///
/// The coefficient matrix is a transposed Vandermonde matrix in the
/// generators, so pairwise-distinct generators guarantee a unique solution.
/// Repeated generators are rejected up front: in this codebase they always
/// mean a broken pairing plan, not a numerical accident.
pub fn solve_vandermonde_like(
    generators: &[FieldElement],
    rhs: &[FieldElement],
) -> Result<Vec<FieldElement>> {
    let r = generators.len();
    if rhs.len() != r {
        return Err(Error::InvalidParameter(format!(
            "generator count {} != rhs length {}",
            r,
            rhs.len()
        )));
    }
    if r == 0 {
        return Ok(Vec::new());
    }
    let q = generators[0].q;
    for e in generators.iter().chain(rhs.iter()) {
        if e.q != q {
            return Err(Error::ModulusMismatch(q, e.q));
        }
    }
    for i in 0..r {
        for j in i + 1..r {
            if generators[i] == generators[j] {
                return Err(Error::SingularSystem);
            }
        }
    }

    let field = Field { q };
    // Augmented matrix rows t = 0..r, row t holding [g_0^t .. g_{r-1}^t | rhs_t].
    let mut m = vec![vec![field.zero(); r + 1]; r];
    let mut powers = vec![field.one(); r];
    for t in 0..r {
        for j in 0..r {
            m[t][j] = powers[j];
            powers[j] = powers[j] * generators[j];
        }
        m[t][r] = rhs[t];
    }

    // Forward elimination with pivot search. A zero pivot is unreachable for
    // distinct generators but kept as a guard.
    for col in 0..r {
        let pivot = (col..r)
            .find(|&row| !m[row][col].is_zero())
            .ok_or(Error::SingularSystem)?;
        m.swap(col, pivot);
        let inv = m[col][col].inv()?;
        for j in col..=r {
            m[col][j] = m[col][j] * inv;
        }
        for row in 0..r {
            if row != col && !m[row][col].is_zero() {
                let factor = m[row][col];
                for j in col..=r {
                    let delta = factor * m[col][j];
                    m[row][j] = m[row][j] - delta;
                }
            }
        }
    }

    let x: Vec<FieldElement> = (0..r).map(|i| m[i][r]).collect();

    // Exhaustive re-substitution in debug builds: the solve must reproduce
    // every power sum exactly.
    #[cfg(debug_assertions)]
    {
        for (t, &want) in rhs.iter().enumerate() {
            let got = generators
                .iter()
                .zip(&x)
                .fold(field.zero(), |acc, (&g, &xi)| acc + g.pow(t as u64) * xi);
            debug_assert_eq!(got, want, "re-substitution mismatch at power {t}");
        }
    }

    Ok(x)
}
