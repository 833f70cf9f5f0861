//! Exact residue arithmetic modulo `m`.
//!
//! Residues are stored fully reduced in an unsigned machine word `W`. Moduli
//! are capped at 2^31 so that every product of two reduced values fits in the
//! next wider type, which is where [`Word::mul_mod`] does its work.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::{PrimInt, Unsigned};

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere in the crate.
pub const MAX_MODULUS: u64 = 1 << 31;

/// Unsigned word used to store residues and matrix entries.
pub trait Word:
    PrimInt + Unsigned + Integer + Hash + Debug + Display + Default + Send + Sync + 'static
{
    /// `a * b mod m`, computed without overflow for reduced `a`, `b`.
    fn mul_mod(a: Self, b: Self, m: Self) -> Self;

    fn from_u64(v: u64) -> Option<Self> {
        num_traits::cast(v)
    }

    fn as_u64(self) -> u64 {
        self.to_u64().expect("word fits in u64")
    }
}

macro_rules! impl_word {
    ($t:ty, $wide:ty) => {
        impl Word for $t {
            #[inline]
            fn mul_mod(a: Self, b: Self, m: Self) -> Self {
                ((a as $wide * b as $wide) % m as $wide) as $t
            }
        }
    };
}

impl_word!(u32, u64);
impl_word!(u64, u128);

/// Checks `1 <= m <= MAX_MODULUS` and converts to the word type.
pub fn check_modulus<W: Word>(m: u64) -> Result<W> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    if m > MAX_MODULUS {
        return Err(Error::ModulusTooLarge(m as u128));
    }
    W::from_u64(m).ok_or(Error::ModulusTooLarge(m as u128))
}

/// An element of ℤ/mℤ, always stored in `[0, m)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue<W = u64> {
    value: W,
    modulus: W,
}

impl<W: Word> Residue<W> {
    pub fn new(value: W, modulus: W) -> Result<Self> {
        let m = check_modulus::<W>(modulus.as_u64())?;
        Ok(Self {
            value: value % m,
            modulus: m,
        })
    }

    /// Builds a residue from parts already known to be reduced and valid.
    #[inline]
    pub(crate) fn from_reduced(value: W, modulus: W) -> Self {
        debug_assert!(value < modulus);
        Self { value, modulus }
    }

    pub fn zero(modulus: W) -> Result<Self> {
        Self::new(W::zero(), modulus)
    }

    pub fn one(modulus: W) -> Result<Self> {
        Self::new(W::one(), modulus)
    }

    #[inline]
    pub fn value(&self) -> W {
        self.value
    }

    #[inline]
    pub fn modulus(&self) -> W {
        self.modulus
    }

    fn same_modulus(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.as_u64(),
                right: other.modulus.as_u64(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        Ok(Self::from_reduced(
            add_mod(self.value, other.value, self.modulus),
            self.modulus,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        Ok(Self::from_reduced(
            sub_mod(self.value, other.value, self.modulus),
            self.modulus,
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        Ok(Self::from_reduced(
            W::mul_mod(self.value, other.value, self.modulus),
            self.modulus,
        ))
    }

    pub fn neg(&self) -> Self {
        Self::from_reduced(sub_mod(W::zero(), self.value, self.modulus), self.modulus)
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let m = self.modulus;
        let mut base = self.value;
        let mut acc = W::one() % m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = W::mul_mod(acc, base, m);
            }
            base = W::mul_mod(base, base, m);
            exp >>= 1;
        }
        Self::from_reduced(acc, m)
    }

    pub fn is_unit(&self) -> bool {
        is_unit(self)
    }

    pub fn inverse(&self) -> Result<Self> {
        inv_mod(self)
    }

    /// Re-reads this residue modulo a divisor of its modulus.
    pub fn reduce(&self, divisor: W) -> Result<Self> {
        if divisor.is_zero() || self.modulus % divisor != W::zero() {
            return Err(Error::NotADivisor {
                divisor: divisor.as_u64(),
                modulus: self.modulus.as_u64(),
            });
        }
        Ok(Self::from_reduced(self.value % divisor, divisor))
    }
}

impl<W: Debug> Debug for Residue<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {:?}", self.value, self.modulus)
    }
}

impl<W: Display> Display for Residue<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

#[inline]
pub(crate) fn add_mod<W: Word>(a: W, b: W, m: W) -> W {
    // a, b < m <= 2^31, so the sum cannot overflow a u32.
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod<W: Word>(a: W, b: W, m: W) -> W {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// True iff `gcd(value, modulus) = 1`.
pub fn is_unit<W: Word>(x: &Residue<W>) -> bool {
    x.value.gcd(&x.modulus).is_one()
}

/// Multiplicative inverse modulo the residue's modulus.
pub fn inv_mod<W: Word>(x: &Residue<W>) -> Result<Residue<W>> {
    let m = x.modulus.as_u64() as i64;
    let v = x.value.as_u64() as i64;
    let eg = v.extended_gcd(&m);
    if eg.gcd != 1 {
        return Err(Error::NotAUnit {
            value: x.value.as_u64(),
            modulus: x.modulus.as_u64(),
        });
    }
    let inv = eg.x.rem_euclid(m) as u64;
    Ok(Residue::from_reduced(
        W::from_u64(inv).expect("inverse below modulus"),
        x.modulus,
    ))
}

/// `z mod m` with the nonnegative representative.
pub fn embed_integer<W: Word>(z: i64, m: u64) -> Result<Residue<W>> {
    let mw = check_modulus::<W>(m)?;
    let r = (z as i128).rem_euclid(m as i128) as u64;
    Ok(Residue::from_reduced(
        W::from_u64(r).expect("reduced value fits"),
        mw,
    ))
}

/// The residue `r` with `4r ≡ z (mod m)`.
///
/// Exact division is used when `4 | z`, which also covers even moduli. Otherwise
/// `m` must be odd and the result is `z · 4⁻¹`.
pub fn quarter_mod<W: Word>(z: i64, m: u64) -> Result<Residue<W>> {
    if z % 4 == 0 {
        return embed_integer(z / 4, m);
    }
    if m.is_multiple_of(2) {
        return Err(Error::EvenModulus {
            numerator: z,
            modulus: m,
        });
    }
    let four = embed_integer::<W>(4, m)?;
    embed_integer::<W>(z, m)?.mul(&inv_mod(&four)?)
}

/// Deterministic primality test by trial division; inputs here are tiny.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `p^n`, rejected above [`MAX_MODULUS`].
pub fn prime_power(p: u64, n: u32) -> Result<u64> {
    let v = (p as u128)
        .checked_pow(n)
        .ok_or(Error::ModulusTooLarge(u128::MAX))?;
    if v > MAX_MODULUS as u128 {
        return Err(Error::ModulusTooLarge(v));
    }
    Ok(v as u64)
}

/// Number of units modulo `p^k` for `k >= 1`.
pub fn unit_count_prime_power(p: u64, k: u32) -> u64 {
    debug_assert!(k >= 1);
    (p - 1) * p.pow(k - 1)
}
