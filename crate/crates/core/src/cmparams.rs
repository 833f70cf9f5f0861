//! Imaginary quadratic orders and the Cartan parameters (φ, δ) they induce at a
//! given modulus.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matgroup::CartanParams;
use crate::modarith::{embed_integer, quarter_mod, Word};

/// The order of conductor `f` in the imaginary quadratic field of fundamental
/// discriminant `delta_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrderParams {
    delta_k: i64,
    conductor: i64,
    order_disc: i64,
}

impl OrderParams {
    pub fn delta_k(&self) -> i64 {
        self.delta_k
    }

    pub fn conductor(&self) -> i64 {
        self.conductor
    }

    /// `delta_k · f²`.
    pub fn order_disc(&self) -> i64 {
        self.order_disc
    }
}

fn is_squarefree(n: i64) -> bool {
    let n = n.unsigned_abs();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d * d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Fundamental discriminant test: `d ≡ 1 (mod 4)` squarefree, or `d = 4d'` with
/// `d' ≡ 2, 3 (mod 4)` squarefree.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => d != 1 && is_squarefree(d),
        0 => {
            let q = d / 4;
            matches!(q.rem_euclid(4), 2 | 3) && is_squarefree(q)
        }
        _ => false,
    }
}

pub fn validate_order(delta_k: i64, f: i64) -> Result<OrderParams> {
    if delta_k >= 0 {
        return Err(Error::NotImaginary(delta_k));
    }
    if !is_fundamental_discriminant(delta_k) {
        return Err(Error::NotFundamental(delta_k));
    }
    if f < 1 {
        return Err(Error::BadConductor(f));
    }
    let order_disc = f
        .checked_mul(f)
        .and_then(|f2| f2.checked_mul(delta_k))
        .ok_or(Error::BadConductor(f))?;
    Ok(OrderParams {
        delta_k,
        conductor: f,
        order_disc,
    })
}

/// Negative fundamental discriminants in `[min, max]`, most negative first.
pub fn fundamental_discriminants(min: i64, max: i64) -> Vec<i64> {
    (min..=max.min(-1))
        .filter(|&d| validate_order(d, 1).is_ok())
        .collect()
}

pub fn is_even_discriminant(order: &OrderParams) -> bool {
    order.order_disc % 2 == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(m: u64) -> Self {
        if m.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// δ before a modulus is fixed: either an integer, or `numerator / 4` where the
/// division only makes sense at odd moduli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeltaValue {
    Integer(i64),
    Quarter(i64),
}

impl DeltaValue {
    pub fn resolve<W: Word>(&self, m: u64) -> Result<crate::modarith::Residue<W>> {
        match *self {
            DeltaValue::Integer(d) => embed_integer(d, m),
            DeltaValue::Quarter(num) => quarter_mod(num, m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhiDelta {
    pub phi: i64,
    pub delta: DeltaValue,
    pub parity: Parity,
}

impl PhiDelta {
    /// Reduces (δ, φ) modulo `m`, whose parity must match the context these
    /// parameters were derived for.
    pub fn at_modulus<W: Word>(&self, m: u64) -> Result<CartanParams<W>> {
        if Parity::of(m) != self.parity && m != 1 {
            return Err(Error::ParityMismatch { modulus: m });
        }
        CartanParams::new(self.delta.resolve(m)?, embed_integer(self.phi, m)?)
    }
}

pub fn phi_delta(order: &OrderParams, parity: Parity) -> PhiDelta {
    let disc = order.order_disc;
    let f = order.conductor;
    if disc.rem_euclid(4) == 1 && parity == Parity::Even {
        // Δ_K ≡ 1 (mod 4), so (Δ_K − 1)f² is divisible by 4.
        PhiDelta {
            phi: f,
            delta: DeltaValue::Integer((order.delta_k - 1) * f * f / 4),
            parity,
        }
    } else if disc % 4 == 0 {
        PhiDelta {
            phi: 0,
            delta: DeltaValue::Integer(disc / 4),
            parity,
        }
    } else {
        PhiDelta {
            phi: 0,
            delta: DeltaValue::Quarter(disc),
            parity,
        }
    }
}
