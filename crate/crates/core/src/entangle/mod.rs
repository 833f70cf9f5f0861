//! Reduction kernels along a tower `G(p^n)`, the determinant lift
//! `Λ : G(p^n) → (ℤ/p^{n+1}ℤ)ˣ` through those kernels, and the searches built
//! on top of them.
//!
//! Every verdict here is produced by exhaustive enumeration of the levels
//! involved. [`kernel_parametrized`] is the one exception: it writes the
//! kernel down directly and exists to be checked against [`reduction_kernel`].
//!
//! Witnesses are always the least qualifying element under
//! [`Mat2::witness_key`].

mod tower;

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::matgroup::{CartanParams, FiniteGroup, Mat2};
use crate::modarith::{prime_power, unit_count_prime_power, Residue, Word};

pub use tower::{Level, NormalizerSpec, Tower, TowerSource};

/// A matrix together with its determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness<W = u64> {
    pub element: Mat2<W>,
    pub det: Residue<W>,
}

impl<W: Word> Witness<W> {
    fn of(element: Mat2<W>) -> Self {
        Self {
            element,
            det: element.det(),
        }
    }
}

fn least_by_key<W: Word>(it: impl Iterator<Item = Mat2<W>>) -> Option<Mat2<W>> {
    it.min_by_key(|x| x.witness_key())
}

/// `ker(G(p^{n+1}) → G(p^n))` and whether it sits inside SL₂.
#[derive(Debug, Clone)]
pub struct KernelReport<W = u64> {
    pub n: u32,
    pub kernel_elements: BTreeSet<Mat2<W>>,
    pub in_sl2: bool,
    pub witness: Option<Witness<W>>,
}

pub fn reduction_kernel<W: Word>(tower: &Tower<W>, n: u32) -> Result<KernelReport<W>> {
    tower.level(n)?;
    let upper = tower.level(n + 1)?;
    let lower_mod = tower.modulus(n)?;
    let kernel_elements: BTreeSet<_> = upper
        .elements()
        .filter(|x| x.reduce_unchecked(lower_mod).is_identity())
        .collect();
    let witness =
        least_by_key(kernel_elements.iter().copied().filter(|x| !x.in_sl2())).map(Witness::of);
    Ok(KernelReport {
        n,
        in_sl2: witness.is_none(),
        kernel_elements,
        witness,
    })
}

/// The kernel of `N_{δ,φ}(p^{n+1}) → N_{δ,φ}(p^n)` written down directly.
///
/// The Cartan part is `(a, b) = (1 + p^n α, p^n β)` for `α, β ∈ [0, p)`. Since
/// `γ² = I`, an element `γc` lies in the kernel exactly when `c ≡ γ (mod p^n)`,
/// which for a Cartan-shaped `c` forces `γ ≡ I (mod p^n)`; that only happens
/// for `p^n = 2` with `φ` even, and then the γ-coset contributes `γ` times the
/// Cartan part.
pub fn kernel_parametrized<W: Word>(
    params: &CartanParams<W>,
    p: u64,
    n: u32,
) -> Result<BTreeSet<Mat2<W>>> {
    let top = prime_power(p, n + 1)?;
    if params.modulus().as_u64() != top {
        return Err(Error::ModulusMismatch {
            left: params.modulus().as_u64(),
            right: top,
        });
    }
    let step = prime_power(p, n)?;
    let mut out = BTreeSet::new();
    for alpha in 0..p {
        for beta in 0..p {
            let a = W::from_u64(1 + step * alpha).expect("below modulus");
            let b = W::from_u64(step * beta).expect("below modulus");
            out.insert(params.matrix(a, b));
        }
    }
    let gamma = params.gamma();
    if gamma
        .reduce_unchecked(W::from_u64(step).expect("below modulus"))
        .is_identity()
    {
        let coset: Vec<_> = out.iter().map(|k| gamma.mul_unchecked(k)).collect();
        out.extend(coset);
    }
    Ok(out)
}

/// Two preimages of the same element with different determinants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftConflict<W = u64> {
    pub element: Mat2<W>,
    pub first: Witness<W>,
    pub second: Witness<W>,
}

impl<W: Word> LiftConflict<W> {
    pub fn to_error(&self) -> Error {
        Error::LiftNotWellDefined {
            element: self.element.to_string(),
            first: self.first.element.to_string(),
            first_det: self.first.det.value().as_u64(),
            second: self.second.element.to_string(),
            second_det: self.second.det.value().as_u64(),
        }
    }
}

/// `Λ(g) = det(g')` for `g'` any preimage of `g`, tabulated over `G(p^n)`.
///
/// When the lift is not well defined, the table holds the determinant of the
/// least preimage and `failure_witness` names a conflicting pair.
#[derive(Debug, Clone)]
pub struct DetLift<W = u64> {
    pub n: u32,
    pub p: u64,
    pub table: HashMap<Mat2<W>, Residue<W>>,
    pub well_defined: bool,
    pub surjective: bool,
    pub failure_witness: Option<LiftConflict<W>>,
}

impl<W: Word> DetLift<W> {
    pub fn value(&self, g: &Mat2<W>) -> Option<Residue<W>> {
        self.table.get(g).copied()
    }

    /// Λ(g), refusing elements outside the group and ill-defined lifts.
    pub fn evaluate(&self, g: &Mat2<W>) -> Result<Residue<W>> {
        if let Some(c) = &self.failure_witness {
            return Err(c.to_error());
        }
        self.value(g)
            .ok_or_else(|| Error::ElementNotInGroup(g.to_string()))
    }

    /// Distinct values of Λ, ascending.
    pub fn image(&self) -> BTreeSet<W> {
        self.table.values().map(|r| r.value()).collect()
    }
}

struct Fiber<W> {
    least: Mat2<W>,
    first_det: W,
    conflict: bool,
}

pub fn build_det_lift<W: Word>(tower: &Tower<W>, n: u32) -> Result<DetLift<W>> {
    let lower = tower.level(n)?;
    let upper = tower.level(n + 1)?;
    let lower_mod = tower.modulus(n)?;

    let mut fibers: HashMap<Mat2<W>, Fiber<W>> = HashMap::with_capacity(lower.order());
    for x in upper.elements() {
        let d = x.det_value();
        fibers
            .entry(x.reduce_unchecked(lower_mod))
            .and_modify(|f| {
                f.conflict |= d != f.first_det;
                if x.witness_key() < f.least.witness_key() {
                    f.least = x;
                }
            })
            .or_insert(Fiber {
                least: x,
                first_det: d,
                conflict: false,
            });
    }

    if let Some(g) = fibers.keys().filter(|g| !lower.contains(g)).min() {
        return Err(Error::TowerNotCompatible {
            level: n + 1,
            below: n,
            element: g.to_string(),
        });
    }
    if fibers.len() != lower.order() {
        let missing = lower
            .elements()
            .filter(|g| !fibers.contains_key(g))
            .min()
            .expect("some element lacks a fiber");
        return Err(Error::EmptyFiber(missing.to_string()));
    }

    let conflicted = least_by_key(fibers.iter().filter(|(_, f)| f.conflict).map(|(g, _)| *g));
    let failure_witness = conflicted.map(|g| {
        let first = Witness::of(fibers[&g].least);
        let second =
            least_by_key(upper.elements().filter(|x| {
                x.reduce_unchecked(lower_mod) == g && x.det_value() != first.det.value()
            }))
            .map(Witness::of)
            .expect("conflicting fiber has a second determinant");
        LiftConflict {
            element: g,
            first,
            second,
        }
    });

    let table: HashMap<_, _> = fibers
        .into_iter()
        .map(|(g, f)| (g, f.least.det()))
        .collect();
    let image_size = table.values().collect::<BTreeSet<_>>().len() as u64;
    let surjective = image_size == unit_count_prime_power(tower.p(), n + 1);
    Ok(DetLift {
        n,
        p: tower.p(),
        table,
        well_defined: failure_witness.is_none(),
        surjective,
        failure_witness,
    })
}

/// Where `det = Λ ∘ π` (top) or `Λ mod p^n = det` (bottom) fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramFailure<W = u64> {
    Top { element: Mat2<W>, det: W, lift: W },
    Bottom { element: Mat2<W>, det: W, lift: W },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagramCheck<W = u64> {
    pub commutes: bool,
    pub counterexample: Option<DiagramFailure<W>>,
}

/// Exhaustively checks `det(g') = Λ(π(g'))` on level `n+1` and
/// `Λ(g) ≡ det(g) (mod p^n)` on level `n`.
pub fn check_diagram_commutes<W: Word>(
    tower: &Tower<W>,
    n: u32,
    lift: &DetLift<W>,
) -> Result<DiagramCheck<W>> {
    let lower = tower.level(n)?;
    let upper = tower.level(n + 1)?;
    let lower_mod = tower.modulus(n)?;

    let top = least_by_key(upper.elements().filter(|x| {
        lift.value(&x.reduce_unchecked(lower_mod))
            .is_none_or(|v| v.value() != x.det_value())
    }))
    .map(|x| DiagramFailure::Top {
        element: x,
        det: x.det_value(),
        lift: lift
            .value(&x.reduce_unchecked(lower_mod))
            .map_or(W::zero(), |v| v.value()),
    });
    let counterexample = top.or_else(|| {
        least_by_key(lower.elements().filter(|g| {
            lift.value(g)
                .is_none_or(|v| v.value() % lower_mod != g.det_value())
        }))
        .map(|g| DiagramFailure::Bottom {
            element: g,
            det: g.det_value(),
            lift: lift.value(&g).map_or(W::zero(), |v| v.value()),
        })
    });
    Ok(DiagramCheck {
        commutes: counterexample.is_none(),
        counterexample,
    })
}

/// Outcome of an `n₀` search, which only ever speaks about `[from, to]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct N0Search {
    pub n0: Option<u32>,
    pub from: u32,
    pub to: u32,
}

/// Least `n₀` with every kernel `ker(G(p^{n+1}) → G(p^n))`, `n ∈ [n₀, n_max]`,
/// inside SL₂. The search starts at the tower's lowest level.
pub fn n0_search<W: Word>(tower: &Tower<W>, n_max: u32) -> Result<N0Search> {
    let from = tower.min_level().ok_or(Error::MissingLevel(1))?;
    for n in from..=n_max + 1 {
        tower.level(n)?;
    }
    let mut n0 = None;
    for n in (from..=n_max).rev() {
        if !reduction_kernel(tower, n)?.in_sl2 {
            break;
        }
        n0 = Some(n);
    }
    Ok(N0Search {
        n0,
        from,
        to: n_max,
    })
}

/// Index bookkeeping for a well-defined lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeReport {
    pub group_order: usize,
    pub image_size: usize,
    pub kernel_size: usize,
    /// `|(ℤ/p^{n+1}ℤ)ˣ|`.
    pub unit_group_order: u64,
    pub surjective: bool,
}

impl DegreeReport {
    pub fn index_consistent(&self) -> bool {
        self.kernel_size * self.image_size == self.group_order
    }
}

pub fn degree_report<W: Word>(tower: &Tower<W>, n: u32, lift: &DetLift<W>) -> Result<DegreeReport> {
    if let Some(c) = &lift.failure_witness {
        return Err(c.to_error());
    }
    let group_order = tower.level(n)?.order();
    let one = W::one() % tower.modulus(n + 1)?;
    Ok(DegreeReport {
        group_order,
        image_size: lift.image().len(),
        kernel_size: lift.table.values().filter(|v| v.value() == one).count(),
        unit_group_order: unit_count_prime_power(tower.p(), n + 1),
        surjective: lift.surjective,
    })
}

/// Every verdict for one level of a tower.
#[derive(Debug, Clone)]
pub struct LevelVerdict<W = u64> {
    pub n: u32,
    pub group_order: usize,
    pub kernel: KernelReport<W>,
    pub lift: DetLift<W>,
    pub diagram: DiagramCheck<W>,
    /// Present only when the lift is well defined.
    pub degree: Option<DegreeReport>,
}

pub fn verify_level<W: Word>(tower: &Tower<W>, n: u32) -> Result<LevelVerdict<W>> {
    let kernel = reduction_kernel(tower, n)?;
    let lift = build_det_lift(tower, n)?;
    let diagram = check_diagram_commutes(tower, n, &lift)?;
    let degree = lift
        .well_defined
        .then(|| degree_report(tower, n, &lift))
        .transpose()?;
    Ok(LevelVerdict {
        n,
        group_order: tower.level(n)?.order(),
        kernel,
        lift,
        diagram,
        degree,
    })
}
