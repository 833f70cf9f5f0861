use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cmparams::{phi_delta, OrderParams, Parity};
use crate::error::{Error, Result};
use crate::matgroup::{
    closure_from_generators, CartanParams, FiniteGroup, Mat2, MatGroup, NormalizerGroup,
};
use crate::modarith::{is_prime, prime_power, Word};

/// Where the Cartan parameters of a full-normalizer tower come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizerSpec {
    /// Integers reduced modulo each level, used as given.
    Raw { delta: i64, phi: i64 },
    /// (φ, δ) recomputed per level from the order and the parity of `p^n`.
    Order(OrderParams),
}

impl NormalizerSpec {
    pub fn params_at<W: Word>(&self, modulus: u64) -> Result<CartanParams<W>> {
        match self {
            NormalizerSpec::Raw { delta, phi } => CartanParams::from_i64(*delta, *phi, modulus),
            NormalizerSpec::Order(order) => {
                phi_delta(order, Parity::of(modulus)).at_modulus(modulus)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TowerSource {
    FullNormalizer(NormalizerSpec),
    Generated,
}

/// One level of a tower.
#[derive(Debug)]
pub enum Level<W = u64> {
    Normalizer(NormalizerGroup<W>),
    Explicit(MatGroup<W>),
}

impl<W: Word> FiniteGroup<W> for Level<W> {
    fn modulus(&self) -> W {
        match self {
            Level::Normalizer(g) => g.modulus(),
            Level::Explicit(g) => g.modulus(),
        }
    }

    fn order(&self) -> usize {
        match self {
            Level::Normalizer(g) => g.order(),
            Level::Explicit(g) => g.order(),
        }
    }

    fn contains(&self, x: &Mat2<W>) -> bool {
        match self {
            Level::Normalizer(g) => g.contains(x),
            Level::Explicit(g) => g.contains(x),
        }
    }

    fn elements(&self) -> Box<dyn Iterator<Item = Mat2<W>> + '_> {
        match self {
            Level::Normalizer(g) => g.elements(),
            Level::Explicit(g) => g.elements(),
        }
    }
}

/// Groups `G(p^n)` for a contiguous range of levels `n`.
#[derive(Debug)]
pub struct Tower<W = u64> {
    p: u64,
    source: TowerSource,
    levels: BTreeMap<u32, Level<W>>,
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn modulus_word<W: Word>(p: u64, n: u32) -> Result<W> {
    let m = prime_power(p, n)?;
    W::from_u64(m).ok_or(Error::ModulusTooLarge(m as u128))
}

impl<W: Word> Tower<W> {
    /// `N_{δ,φ}(p^n)` for `n` in `n_min..=n_max`.
    ///
    /// Levels are parametric; `budget` bounds `2·(p^n)²`, the size of the
    /// `(a, b)` scan behind each level.
    pub fn full_normalizer(
        p: u64,
        spec: NormalizerSpec,
        n_min: u32,
        n_max: u32,
        budget: usize,
    ) -> Result<Self> {
        check_prime(p)?;
        let mut levels = BTreeMap::new();
        for n in n_min.max(1)..=n_max {
            let m = prime_power(p, n)?;
            let scan = 2u128 * (m as u128) * (m as u128);
            if scan > budget as u128 {
                return Err(Error::ClosureBudgetExceeded(budget));
            }
            let params = spec.params_at::<W>(m)?;
            levels.insert(n, Level::Normalizer(NormalizerGroup::new(params)));
        }
        Ok(Self {
            p,
            source: TowerSource::FullNormalizer(spec),
            levels,
        })
    }

    /// Closure of user-supplied generators at each level, checked for
    /// compatibility with reduction.
    pub fn generated(
        p: u64,
        generators: &BTreeMap<u32, Vec<Mat2<W>>>,
        budget: usize,
    ) -> Result<Self> {
        check_prime(p)?;
        let entries: Vec<_> = generators.iter().collect();
        let groups = entries
            .par_iter()
            .map(|(&n, gens)| {
                let m = modulus_word::<W>(p, n)?;
                closure_from_generators(gens, m, budget).map(|g| (n, g))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::from_groups(p, groups)
    }

    /// Wraps explicit groups, one per level.
    pub fn from_groups(p: u64, groups: BTreeMap<u32, MatGroup<W>>) -> Result<Self> {
        check_prime(p)?;
        let keys: Vec<u32> = groups.keys().copied().collect();
        if keys.first() == Some(&0) || keys.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::NonContiguousLevels);
        }
        for (&n, g) in &groups {
            let m = modulus_word::<W>(p, n)?;
            if g.modulus() != m {
                return Err(Error::ModulusMismatch {
                    left: g.modulus().as_u64(),
                    right: m.as_u64(),
                });
            }
        }
        for (&n, upper) in groups.iter().skip(1) {
            let lower = &groups[&(n - 1)];
            let escapes = upper
                .iter()
                .map(|x| x.reduce_unchecked(lower.modulus()))
                .filter(|x| !lower.contains(x))
                .min();
            if let Some(x) = escapes {
                return Err(Error::TowerNotCompatible {
                    level: n,
                    below: n - 1,
                    element: x.to_string(),
                });
            }
        }
        Ok(Self {
            p,
            source: TowerSource::Generated,
            levels: groups
                .into_iter()
                .map(|(n, g)| (n, Level::Explicit(g)))
                .collect(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn source(&self) -> TowerSource {
        self.source
    }

    pub fn level(&self, n: u32) -> Result<&Level<W>> {
        self.levels.get(&n).ok_or(Error::MissingLevel(n))
    }

    pub fn min_level(&self) -> Option<u32> {
        self.levels.keys().next().copied()
    }

    pub fn max_level(&self) -> Option<u32> {
        self.levels.keys().next_back().copied()
    }

    pub fn modulus(&self, n: u32) -> Result<W> {
        modulus_word(self.p, n)
    }
}
