//! 2×2 matrices over ℤ/mℤ and the finite groups built from them: Cartan
//! subgroups `C_{δ,φ}(m)`, their extensions `N_{δ,φ}(m)` by
//! `γ = (−1, 0; φ, 1)`, and closures of arbitrary generator sets.

use std::collections::{HashSet, VecDeque};
use std::fmt::{self, Debug, Display};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::modarith::{add_mod, check_modulus, embed_integer, sub_mod, Residue, Word};

/// Default cap on the number of elements a single group may hold.
pub const DEFAULT_BUDGET: usize = 1 << 24;

/// A 2×2 matrix `(a11, a12; a21, a22)` over ℤ/mℤ, entries stored reduced.
///
/// The derived ordering is row-major on the entries (after the modulus) and is
/// used for every sorted listing.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2<W = u64> {
    modulus: W,
    entries: [W; 4],
}

impl<W: Word> Mat2<W> {
    pub fn new(entries: [W; 4], modulus: W) -> Result<Self> {
        let m = check_modulus::<W>(modulus.as_u64())?;
        Ok(Self {
            modulus: m,
            entries: entries.map(|e| e % m),
        })
    }

    pub fn from_i64(entries: [i64; 4], modulus: u64) -> Result<Self> {
        let m = check_modulus::<W>(modulus)?;
        let mut out = [W::zero(); 4];
        for (o, e) in out.iter_mut().zip(entries) {
            *o = embed_integer::<W>(e, modulus)?.value();
        }
        Ok(Self {
            modulus: m,
            entries: out,
        })
    }

    #[inline]
    pub(crate) fn from_reduced(entries: [W; 4], modulus: W) -> Self {
        Self { modulus, entries }
    }

    pub fn identity(modulus: W) -> Result<Self> {
        Self::new([W::one(), W::zero(), W::zero(), W::one()], modulus)
    }

    #[inline]
    pub fn entries(&self) -> [W; 4] {
        self.entries
    }

    #[inline]
    pub fn modulus(&self) -> W {
        self.modulus
    }

    pub fn is_identity(&self) -> bool {
        let one = W::one() % self.modulus;
        self.entries == [one, W::zero(), W::zero(), one]
    }

    /// Product without the modulus check; callers guarantee equal moduli.
    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let m = self.modulus;
        let [a, b, c, d] = self.entries;
        let [e, f, g, h] = other.entries;
        let mm = |x, y| W::mul_mod(x, y, m);
        Self::from_reduced(
            [
                add_mod(mm(a, e), mm(b, g), m),
                add_mod(mm(a, f), mm(b, h), m),
                add_mod(mm(c, e), mm(d, g), m),
                add_mod(mm(c, f), mm(d, h), m),
            ],
            m,
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.as_u64(),
                right: other.modulus.as_u64(),
            });
        }
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn det_value(&self) -> W {
        let m = self.modulus;
        let [a, b, c, d] = self.entries;
        sub_mod(W::mul_mod(a, d, m), W::mul_mod(b, c, m), m)
    }

    pub fn det(&self) -> Residue<W> {
        Residue::from_reduced(self.det_value(), self.modulus)
    }

    pub fn is_invertible(&self) -> bool {
        self.det_value().gcd(&self.modulus).is_one()
    }

    pub fn in_sl2(&self) -> bool {
        self.det_value() == W::one() % self.modulus
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.det().inverse()?.value();
        let m = self.modulus;
        let [a, b, c, d] = self.entries;
        let neg = |x| sub_mod(W::zero(), x, m);
        Ok(Self::from_reduced(
            [
                W::mul_mod(d, inv, m),
                W::mul_mod(neg(b), inv, m),
                W::mul_mod(neg(c), inv, m),
                W::mul_mod(a, inv, m),
            ],
            m,
        ))
    }

    /// Entrywise reduction modulo a divisor of the current modulus.
    pub fn reduce(&self, divisor: W) -> Result<Self> {
        if divisor.is_zero() || self.modulus % divisor != W::zero() {
            return Err(Error::NotADivisor {
                divisor: divisor.as_u64(),
                modulus: self.modulus.as_u64(),
            });
        }
        Ok(self.reduce_unchecked(divisor))
    }

    #[inline]
    pub(crate) fn reduce_unchecked(&self, divisor: W) -> Self {
        Self::from_reduced(self.entries.map(|e| e % divisor), divisor)
    }

    /// Ordering key used to pick deterministic witnesses: the Cartan
    /// coordinates `(a, b) = (a22, a12)` first, then `a21`, then `a11`.
    pub fn witness_key(&self) -> (W, W, W, W) {
        let [a11, a12, a21, a22] = self.entries;
        (a22, a12, a21, a11)
    }

    /// Parses the row-major text form `"a11,a12,a21,a22"`; entries may be
    /// negative and are reduced modulo `modulus`.
    pub fn parse(s: &str, modulus: u64) -> Result<Self> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::ParseMatrix(s.to_string()))?;
        let entries: [i64; 4] = parts
            .try_into()
            .map_err(|_| Error::ParseMatrix(s.to_string()))?;
        Self::from_i64(entries, modulus)
    }
}

impl<W: Copy + Display> Display for Mat2<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries;
        write!(f, "{a},{b},{c},{d}")
    }
}

impl<W: Debug> Debug for Mat2<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "({a:?},{b:?};{c:?},{d:?}) mod {:?}", self.modulus)
    }
}

pub fn mat_mul<W: Word>(x: &Mat2<W>, y: &Mat2<W>) -> Result<Mat2<W>> {
    x.mul(y)
}

pub fn mat_det<W: Word>(x: &Mat2<W>) -> Residue<W> {
    x.det()
}

pub fn mat_reduce<W: Word>(x: &Mat2<W>, m_new: W) -> Result<Mat2<W>> {
    x.reduce(m_new)
}

pub fn in_sl2<W: Word>(x: &Mat2<W>) -> bool {
    x.in_sl2()
}

/// The Cartan parameters (δ, φ) reduced modulo a common modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CartanParams<W = u64> {
    delta: Residue<W>,
    phi: Residue<W>,
}

impl<W: Word> CartanParams<W> {
    pub fn new(delta: Residue<W>, phi: Residue<W>) -> Result<Self> {
        if delta.modulus() != phi.modulus() {
            return Err(Error::ModulusMismatch {
                left: delta.modulus().as_u64(),
                right: phi.modulus().as_u64(),
            });
        }
        Ok(Self { delta, phi })
    }

    pub fn from_i64(delta: i64, phi: i64, modulus: u64) -> Result<Self> {
        Self::new(embed_integer(delta, modulus)?, embed_integer(phi, modulus)?)
    }

    pub fn delta(&self) -> Residue<W> {
        self.delta
    }

    pub fn phi(&self) -> Residue<W> {
        self.phi
    }

    pub fn modulus(&self) -> W {
        self.delta.modulus()
    }

    /// The same parameters read modulo a divisor.
    pub fn reduce(&self, divisor: W) -> Result<Self> {
        Self::new(self.delta.reduce(divisor)?, self.phi.reduce(divisor)?)
    }

    /// `(a + bφ, b; bδ, a)`.
    #[inline]
    pub fn matrix(&self, a: W, b: W) -> Mat2<W> {
        let m = self.modulus();
        let (a, b) = (a % m, b % m);
        Mat2::from_reduced(
            [
                add_mod(a, W::mul_mod(b, self.phi.value(), m), m),
                b,
                W::mul_mod(b, self.delta.value(), m),
                a,
            ],
            m,
        )
    }

    /// `a² + φab − δb²`.
    #[inline]
    pub fn form_value(&self, a: W, b: W) -> W {
        let m = self.modulus();
        let (a, b) = (a % m, b % m);
        let mm = |x, y| W::mul_mod(x, y, m);
        let phi_ab = mm(self.phi.value(), mm(a, b));
        sub_mod(
            add_mod(mm(a, a), phi_ab, m),
            mm(self.delta.value(), mm(b, b)),
            m,
        )
    }

    #[inline]
    fn is_unit_value(&self, v: W) -> bool {
        v.gcd(&self.modulus()).is_one()
    }

    /// Membership in `C_{δ,φ}(m)`: Cartan shape with a unit determinant.
    pub fn cartan_contains(&self, x: &Mat2<W>) -> bool {
        if x.modulus() != self.modulus() {
            return false;
        }
        let [_, b, _, a] = x.entries();
        *x == self.matrix(a, b) && self.is_unit_value(x.det_value())
    }

    pub fn gamma(&self) -> Mat2<W> {
        let m = self.modulus();
        let minus_one = sub_mod(W::zero(), W::one() % m, m);
        Mat2::from_reduced([minus_one, W::zero(), self.phi.value(), W::one() % m], m)
    }
}

/// `(−1, 0; φ, 1)` modulo the modulus of `phi`.
pub fn gamma_matrix<W: Word>(phi: Residue<W>) -> Mat2<W> {
    CartanParams::new(Residue::from_reduced(W::zero(), phi.modulus()), phi)
        .expect("same modulus")
        .gamma()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Cartan,
    Extended,
    Generated,
}

/// Common read-only view of a finite subgroup of GL₂(ℤ/mℤ).
pub trait FiniteGroup<W: Word>: Sync {
    fn modulus(&self) -> W;
    fn order(&self) -> usize;
    fn contains(&self, x: &Mat2<W>) -> bool;
    /// All elements, in no particular order.
    fn elements(&self) -> Box<dyn Iterator<Item = Mat2<W>> + '_>;

    fn sorted_elements(&self) -> Vec<Mat2<W>> {
        let mut v: Vec<_> = self.elements().collect();
        v.sort_unstable();
        v
    }
}

/// An explicitly stored matrix group.
#[derive(Clone, Debug)]
pub struct MatGroup<W = u64> {
    modulus: W,
    kind: GroupKind,
    params: Option<CartanParams<W>>,
    elements: HashSet<Mat2<W>>,
}

impl<W: Word> MatGroup<W> {
    pub fn trivial(modulus: W) -> Result<Self> {
        let id = Mat2::identity(modulus)?;
        Ok(Self {
            modulus: id.modulus(),
            kind: GroupKind::Generated,
            params: None,
            elements: HashSet::from([id]),
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn params(&self) -> Option<&CartanParams<W>> {
        self.params.as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Mat2<W>> {
        self.elements.iter()
    }

    /// Exhaustive closure check over all ordered pairs, plus inverses.
    /// Quadratic in the order; intended for small groups.
    pub fn is_closed(&self) -> bool {
        let Ok(id) = Mat2::identity(self.modulus) else {
            return false;
        };
        if !self.elements.contains(&id) {
            return false;
        }
        self.elements.iter().all(|x| {
            x.inverse().is_ok_and(|inv| self.elements.contains(&inv))
                && self
                    .elements
                    .iter()
                    .all(|y| self.elements.contains(&x.mul_unchecked(y)))
        })
    }
}

impl<W: Word> FiniteGroup<W> for MatGroup<W> {
    fn modulus(&self) -> W {
        self.modulus
    }

    fn order(&self) -> usize {
        self.elements.len()
    }

    fn contains(&self, x: &Mat2<W>) -> bool {
        self.elements.contains(x)
    }

    fn elements(&self) -> Box<dyn Iterator<Item = Mat2<W>> + '_> {
        Box::new(self.elements.iter().copied())
    }
}

/// `C_{δ,φ}(m)` by enumerating every pair `(a, b) ∈ (ℤ/mℤ)²`.
pub fn cartan_enumerate<W: Word>(params: &CartanParams<W>) -> MatGroup<W> {
    let m = params.modulus();
    let mut elements = HashSet::new();
    let mut a = W::zero();
    while a < m {
        let mut b = W::zero();
        while b < m {
            if params.is_unit_value(params.form_value(a, b)) {
                elements.insert(params.matrix(a, b));
            }
            b = b + W::one();
        }
        a = a + W::one();
    }
    MatGroup {
        modulus: m,
        kind: GroupKind::Cartan,
        params: Some(*params),
        elements,
    }
}

/// `N_{δ,φ}(m) = ⟨γ, C_{δ,φ}(m)⟩`, realized as `C ∪ γC`.
///
/// The coset form is only used after checking that γ normalizes `C` and that
/// `γ² ∈ C`; otherwise the group is rebuilt by generic closure.
pub fn extended_group<W: Word>(cartan: &MatGroup<W>) -> Result<MatGroup<W>> {
    let params = match (cartan.kind, cartan.params) {
        (GroupKind::Cartan, Some(p)) => p,
        _ => return Err(Error::NotCartan),
    };
    let gamma = params.gamma();
    let mut out = MatGroup {
        modulus: cartan.modulus,
        kind: GroupKind::Extended,
        params: Some(params),
        elements: cartan.elements.clone(),
    };
    if cartan.elements.contains(&gamma) {
        return Ok(out);
    }
    let gamma_inv = gamma.inverse()?;
    let normalizes = cartan.elements.iter().all(|c| {
        cartan
            .elements
            .contains(&gamma.mul_unchecked(c).mul_unchecked(&gamma_inv))
    });
    if normalizes && cartan.elements.contains(&gamma.mul_unchecked(&gamma)) {
        out.elements
            .extend(cartan.elements.iter().map(|c| gamma.mul_unchecked(c)));
        return Ok(out);
    }
    log::warn!(
        "coset construction failed for delta={}, phi={}, m={}; falling back to closure",
        params.delta().value(),
        params.phi().value(),
        params.modulus()
    );
    let mut gens: Vec<_> = cartan.elements.iter().copied().collect();
    gens.push(gamma);
    let mut closed = closure_from_generators(&gens, cartan.modulus, DEFAULT_BUDGET)?;
    closed.kind = GroupKind::Extended;
    closed.params = Some(params);
    Ok(closed)
}

/// Breadth-first closure of `gens` under right multiplication.
pub fn closure_from_generators<W: Word>(
    gens: &[Mat2<W>],
    modulus: W,
    budget: usize,
) -> Result<MatGroup<W>> {
    for g in gens {
        if g.modulus() != modulus {
            return Err(Error::ModulusMismatch {
                left: g.modulus().as_u64(),
                right: modulus.as_u64(),
            });
        }
        if !g.is_invertible() {
            return Err(Error::NonInvertibleGenerator(g.to_string()));
        }
    }
    let id = Mat2::identity(modulus)?;
    let mut elements = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul_unchecked(g);
            if elements.insert(y) {
                if elements.len() > budget {
                    return Err(Error::ClosureBudgetExceeded(budget));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(MatGroup {
        modulus: id.modulus(),
        kind: GroupKind::Generated,
        params: None,
        elements,
    })
}

pub fn is_subgroup<W: Word>(h: &dyn FiniteGroup<W>, g: &dyn FiniteGroup<W>) -> Result<bool> {
    if h.modulus() != g.modulus() {
        return Err(Error::ModulusMismatch {
            left: h.modulus().as_u64(),
            right: g.modulus().as_u64(),
        });
    }
    Ok(h.elements().all(|x| g.contains(&x)))
}

/// `N_{δ,φ}(m)` held by its parameters alone.
///
/// Membership is a shape test and elements are produced on demand from the
/// `(a, b)` parametrization, so levels far larger than any explicit set can
/// be scanned exhaustively.
#[derive(Debug)]
pub struct NormalizerGroup<W = u64> {
    params: CartanParams<W>,
    gamma: Mat2<W>,
    gamma_in_cartan: bool,
    order: OnceLock<usize>,
}

impl<W: Word> NormalizerGroup<W> {
    pub fn new(params: CartanParams<W>) -> Self {
        let gamma = params.gamma();
        Self {
            gamma_in_cartan: params.cartan_contains(&gamma),
            params,
            gamma,
            order: OnceLock::new(),
        }
    }

    pub fn params(&self) -> &CartanParams<W> {
        &self.params
    }

    pub fn gamma(&self) -> Mat2<W> {
        self.gamma
    }

    pub fn gamma_in_cartan(&self) -> bool {
        self.gamma_in_cartan
    }

    fn cartan_iter(&self) -> impl Iterator<Item = Mat2<W>> + '_ {
        let m = self.params.modulus().as_u64();
        (0..m).flat_map(move |a| {
            (0..m).filter_map(move |b| {
                let (a, b) = (W::from_u64(a)?, W::from_u64(b)?);
                self.params
                    .is_unit_value(self.params.form_value(a, b))
                    .then(|| self.params.matrix(a, b))
            })
        })
    }

    /// Explicit copy, built through [`cartan_enumerate`] and [`extended_group`].
    pub fn materialize(&self) -> Result<MatGroup<W>> {
        extended_group(&cartan_enumerate(&self.params))
    }
}

impl<W: Word> FiniteGroup<W> for NormalizerGroup<W> {
    fn modulus(&self) -> W {
        self.params.modulus()
    }

    fn order(&self) -> usize {
        *self.order.get_or_init(|| {
            let c = self.cartan_iter().count();
            if self.gamma_in_cartan {
                c
            } else {
                2 * c
            }
        })
    }

    fn contains(&self, x: &Mat2<W>) -> bool {
        // γ² = I, so x ∈ γC iff γx ∈ C.
        x.modulus() == self.modulus()
            && (self.params.cartan_contains(x)
                || (!self.gamma_in_cartan
                    && self.params.cartan_contains(&self.gamma.mul_unchecked(x))))
    }

    fn elements(&self) -> Box<dyn Iterator<Item = Mat2<W>> + '_> {
        let with_coset = !self.gamma_in_cartan;
        Box::new(self.cartan_iter().flat_map(move |c| {
            let coset = with_coset.then(|| self.gamma.mul_unchecked(&c));
            std::iter::once(c).chain(coset)
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(e: [i64; 4], modulus: u64) -> Mat2 {
        Mat2::from_i64(e, modulus).unwrap()
    }

    fn params(delta: i64, phi: i64, modulus: u64) -> CartanParams {
        CartanParams::from_i64(delta, phi, modulus).unwrap()
    }

    #[test]
    fn mul_examples() {
        let g = m([3, 5, 7, 2], 9);
        assert_eq!(Mat2::identity(9).unwrap().mul(&g).unwrap(), g);
        let s = m([0, 1, 1, 0], 2);
        assert!(s.mul(&s).unwrap().is_identity());
        let t = m([3, 0, 0, 1], 4);
        assert_eq!(t.mul(&t).unwrap(), m([1, 0, 0, 1], 4));
        assert!(matches!(
            t.mul(&s),
            Err(Error::ModulusMismatch { left: 4, right: 2 })
        ));
    }

    #[test]
    fn det_examples() {
        assert_eq!(Mat2::<u64>::identity(13).unwrap().det().value(), 1);
        let p = params(0, 0, 8);
        assert_eq!(p.gamma().det().value(), 7);
        let p = params(-4, 0, 8);
        assert_eq!(p.matrix(1, 2).det().value(), 1);
        assert_eq!(p.form_value(1, 2), 1);
    }

    #[test]
    fn reduce_examples() {
        let x = m([5, 4, 0, 1], 8);
        assert_eq!(x.reduce(8).unwrap(), x);
        assert_eq!(x.reduce(4).unwrap(), m([1, 0, 0, 1], 4));
        assert_eq!(m([3, 0, 0, 1], 4).reduce(2).unwrap(), m([1, 0, 0, 1], 2));
        assert!(matches!(
            x.reduce(3),
            Err(Error::NotADivisor {
                divisor: 3,
                modulus: 8
            })
        ));
    }

    #[test]
    fn cartan_examples() {
        assert_eq!(cartan_enumerate(&params(-4, 0, 4)).order(), 8);
        let c = cartan_enumerate(&params(-1, 0, 2));
        assert_eq!(
            c.sorted_elements(),
            vec![m([0, 1, 1, 0], 2), m([1, 0, 0, 1], 2)]
        );
        for (d, f) in [(0, 0), (5, 3), (-7, 1)] {
            let c = cartan_enumerate(&params(d, f, 1));
            assert_eq!(c.order(), 1);
            assert!(c.is_closed());
        }
    }

    #[test]
    fn gamma_examples() {
        let g = |phi, modulus| gamma_matrix(embed_integer::<u64>(phi, modulus).unwrap());
        assert_eq!(g(0, 4), m([3, 0, 0, 1], 4));
        assert!(g(0, 2).is_identity());
        assert_eq!(g(1, 8), m([7, 0, 1, 1], 8));
    }

    #[test]
    fn extended_examples() {
        let c4 = cartan_enumerate(&params(-4, 0, 4));
        let n4 = extended_group(&c4).unwrap();
        assert_eq!(n4.order(), 16);
        assert_eq!(n4.kind(), GroupKind::Extended);
        let c2 = cartan_enumerate(&params(-4, 0, 2));
        let n2 = extended_group(&c2).unwrap();
        assert_eq!(n2.order(), 2);
        assert_eq!(n2.sorted_elements(), c2.sorted_elements());
        let n8 = extended_group(&cartan_enumerate(&params(-4, 0, 8))).unwrap();
        assert_eq!(n8.order(), 64);
        assert_eq!(extended_group(&n8).unwrap_err(), Error::NotCartan);
    }

    #[test]
    fn closure_examples() {
        let id = Mat2::<u64>::identity(6).unwrap();
        assert_eq!(closure_from_generators(&[id], 6, 10).unwrap().order(), 1);
        let s = m([0, 1, 1, 0], 2);
        assert_eq!(closure_from_generators(&[s], 2, 10).unwrap().order(), 2);
        let gl2 = closure_from_generators(&[m([1, 1, 0, 1], 2), s], 2, 10).unwrap();
        assert_eq!(gl2.order(), 6);
        assert!(gl2.is_closed());
        assert!(matches!(
            closure_from_generators(&[m([2, 0, 0, 1], 4)], 4, 10),
            Err(Error::NonInvertibleGenerator(_))
        ));
        assert_eq!(
            closure_from_generators(&[m([1, 1, 0, 1], 2), s], 2, 3).unwrap_err(),
            Error::ClosureBudgetExceeded(3)
        );
    }

    #[test]
    fn sl2_examples() {
        assert!(in_sl2(&Mat2::<u64>::identity(5).unwrap()));
        assert!(!in_sl2(&m([3, 0, 0, 1], 4)));
        assert!(in_sl2(&m([5, 4, 0, 5], 8)));
    }

    #[test]
    fn subgroup_examples() {
        let c = cartan_enumerate(&params(-4, 0, 4));
        let n = extended_group(&c).unwrap();
        assert!(is_subgroup::<u64>(&c, &n).unwrap());
        assert!(!is_subgroup::<u64>(&n, &c).unwrap());
        assert!(is_subgroup::<u64>(&MatGroup::trivial(4).unwrap(), &c).unwrap());
        assert!(is_subgroup::<u64>(&MatGroup::trivial(8).unwrap(), &c).is_err());
    }

    #[test]
    fn parse_and_display() {
        let x = Mat2::<u64>::parse("3, 0,0,-1", 4).unwrap();
        assert_eq!(x, m([3, 0, 0, 3], 4));
        assert_eq!(x.to_string(), "3,0,0,3");
        assert!(Mat2::<u64>::parse("1,2,3", 4).is_err());
        assert!(Mat2::<u64>::parse("1,a,3,4", 4).is_err());
    }

    #[test]
    fn witness_key_order() {
        // a22 dominates a11 under the witness ordering
        let x = m([3, 0, 0, 1], 4);
        let y = m([1, 0, 0, 3], 4);
        assert!(y < x);
        assert!(x.witness_key() < y.witness_key());
    }

    #[test]
    fn cartan_closed_exhaustive_small() {
        for modulus in 1..=16u64 {
            for d in 0..modulus as i64 {
                for f in 0..modulus as i64 {
                    let p = params(d, f, modulus);
                    let c = cartan_enumerate(&p);
                    // closure under products and inverses, checked over all pairs
                    for x in c.iter() {
                        assert!(c.contains(&x.inverse().unwrap()));
                        for y in c.iter() {
                            assert!(c.contains(&x.mul_unchecked(y)), "{d} {f} {modulus}");
                        }
                    }
                    let g = p.gamma();
                    let gi = g.inverse().unwrap();
                    assert!(c
                        .iter()
                        .all(|x| c.contains(&g.mul_unchecked(x).mul_unchecked(&gi))));
                    let n = extended_group(&c).unwrap();
                    let expected = if c.contains(&g) {
                        c.order()
                    } else {
                        2 * c.order()
                    };
                    assert_eq!(n.order(), expected);
                }
            }
        }
    }

    #[test]
    fn cartan_order_power_of_two() {
        for n in 1..=5u32 {
            let modulus = 1u64 << n;
            for d in 0..8 {
                assert_eq!(
                    cartan_enumerate(&params(d, 0, modulus)).order(),
                    1 << (2 * n - 1)
                );
            }
        }
    }

    #[test]
    fn normalizer_view_matches_explicit() {
        for modulus in [1u64, 2, 3, 4, 5, 8, 9, 12, 16, 25] {
            for d in [-4i64, -2, 0, 1, 2, 3] {
                for f in [0i64, 1, 2] {
                    let p = params(d, f, modulus);
                    let lazy = NormalizerGroup::new(p);
                    let explicit = lazy.materialize().unwrap();
                    assert_eq!(lazy.sorted_elements(), explicit.sorted_elements());
                    assert_eq!(lazy.order(), explicit.order());
                    for x in Mat2::<u64>::parse("3,1,2,5", modulus)
                        .into_iter()
                        .chain(explicit.iter().copied())
                    {
                        assert_eq!(lazy.contains(&x), explicit.contains(&x));
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_is_surjective_on_cartan_and_normalizer() {
        for (d, f) in [(-4, 0), (-2, 1), (3, 0)] {
            for n in 1..=4u32 {
                let lo = params(d, f, 1 << n);
                let hi = params(d, f, 1 << (n + 1));
                let c_lo = cartan_enumerate(&lo);
                let c_hi = cartan_enumerate(&hi);
                let img: HashSet<_> = c_hi.iter().map(|x| x.reduce(1 << n).unwrap()).collect();
                assert_eq!(img, c_lo.elements);
                let n_lo = extended_group(&c_lo).unwrap();
                let n_hi = extended_group(&c_hi).unwrap();
                let img: HashSet<_> = n_hi.iter().map(|x| x.reduce(1 << n).unwrap()).collect();
                assert_eq!(img, n_lo.elements);
            }
        }
    }

    proptest! {
        #[test]
        fn det_equals_form(modulus in 1u64..2000, d in -1000i64..1000, f in -10i64..10, a in 0u64..5000, b in 0u64..5000) {
            let p = params(d, f, modulus);
            prop_assert_eq!(p.matrix(a, b).det_value(), p.form_value(a, b));
        }

        #[test]
        fn reduce_is_homomorphism(
            x in proptest::array::uniform4(-500i64..500),
            y in proptest::array::uniform4(-500i64..500),
            k in 1u64..50,
            j in 1u64..50,
        ) {
            let big = k * j;
            let (x, y) = (m(x, big), m(y, big));
            prop_assert_eq!(
                x.mul(&y).unwrap().reduce(k).unwrap(),
                x.reduce(k).unwrap().mul(&y.reduce(k).unwrap()).unwrap()
            );
        }

        #[test]
        fn inverse_roundtrip(e in proptest::array::uniform4(-500i64..500), modulus in 1u64..300) {
            let x = m(e, modulus);
            match x.inverse() {
                Ok(inv) => prop_assert!(x.mul(&inv).unwrap().is_identity()),
                Err(_) => prop_assert!(!x.is_invertible()),
            }
        }
    }
}
