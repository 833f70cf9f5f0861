use serde::Serialize;

use crate::cmparams::{DeltaValue, PhiDelta};
use crate::entangle::{LevelVerdict, Witness};
use crate::modarith::Word;

/// Output of `params`.
#[derive(Debug, Serialize)]
pub struct ParamsOut {
    pub phi: i64,
    /// δ itself, or its numerator when `delta_denominator` is present.
    pub delta: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_denominator: Option<u8>,
}

impl From<&PhiDelta> for ParamsOut {
    fn from(pd: &PhiDelta) -> Self {
        let (delta, delta_denominator) = match pd.delta {
            DeltaValue::Integer(d) => (d, None),
            DeltaValue::Quarter(num) => (num, Some(4)),
        };
        Self {
            phi: pd.phi,
            delta,
            delta_denominator,
        }
    }
}

#[derive(Debug, Serialize, PartialEq, Eq, Clone)]
pub struct WitnessOut {
    pub matrix: String,
    pub det: u64,
}

impl<W: Word> From<&Witness<W>> for WitnessOut {
    fn from(w: &Witness<W>) -> Self {
        Self {
            matrix: w.element.to_string(),
            det: w.det.value().as_u64(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckParams {
    pub source: &'static str,
    pub p: u64,
    pub n_min: u32,
    pub n_max: u32,
    #[serde(rename = "delta_K", skip_serializing_if = "Option::is_none")]
    pub delta_k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_disc: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_denominator: Option<u8>,
}

#[derive(Debug, Serialize, PartialEq, Eq, Clone)]
pub struct LevelRow {
    pub n: u32,
    pub kernel_size: usize,
    pub in_sl2: bool,
    pub witness: Option<WitnessOut>,
    pub lift_well_defined: bool,
    pub lift_surjective: bool,
    pub diagram_commutes: bool,
    pub group_order: usize,
    pub lift_image_size: Option<usize>,
    pub lift_kernel_size: Option<usize>,
}

impl<W: Word> From<&LevelVerdict<W>> for LevelRow {
    fn from(v: &LevelVerdict<W>) -> Self {
        Self {
            n: v.n,
            kernel_size: v.kernel.kernel_elements.len(),
            in_sl2: v.kernel.in_sl2,
            witness: v.kernel.witness.as_ref().map(WitnessOut::from),
            lift_well_defined: v.lift.well_defined,
            lift_surjective: v.lift.surjective,
            diagram_commutes: v.diagram.commutes,
            group_order: v.group_order,
            lift_image_size: v.degree.map(|d| d.image_size),
            lift_kernel_size: v.degree.map(|d| d.kernel_size),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub params: CheckParams,
    pub levels: Vec<LevelRow>,
    pub n0: Option<u32>,
}

/// Flat CSV form of one [`LevelRow`].
#[derive(Debug, Serialize)]
pub struct LevelCsvRow {
    pub n: u32,
    pub kernel_size: usize,
    pub in_sl2: bool,
    pub witness: Option<String>,
    pub witness_det: Option<u64>,
    pub lift_well_defined: bool,
    pub lift_surjective: bool,
    pub diagram_commutes: bool,
    pub group_order: usize,
    pub lift_image_size: Option<usize>,
    pub lift_kernel_size: Option<usize>,
    pub n0: Option<u32>,
}

impl LevelCsvRow {
    pub fn new(row: &LevelRow, n0: Option<u32>) -> Self {
        Self {
            n: row.n,
            kernel_size: row.kernel_size,
            in_sl2: row.in_sl2,
            witness: row.witness.as_ref().map(|w| w.matrix.clone()),
            witness_det: row.witness.as_ref().map(|w| w.det),
            lift_well_defined: row.lift_well_defined,
            lift_surjective: row.lift_surjective,
            diagram_commutes: row.diagram_commutes,
            group_order: row.group_order,
            lift_image_size: row.lift_image_size,
            lift_kernel_size: row.lift_kernel_size,
            n0,
        }
    }
}

/// One row of `scan`: a single kernel verdict for one order, prime and level.
#[derive(Debug, Serialize, Clone, PartialEq, Eq)]
pub struct ScanRow {
    #[serde(rename = "delta_K")]
    pub delta_k: i64,
    pub f: i64,
    pub order_disc: i64,
    pub p: u64,
    /// φ reduced modulo `p^{n+1}`.
    pub phi_mod: u64,
    /// δ reduced modulo `p^{n+1}`.
    pub delta_mod: u64,
    pub n: u32,
    pub kernel_size: usize,
    pub in_sl2: bool,
    pub witness: Option<String>,
    pub witness_det: Option<u64>,
    pub n0: Option<u32>,
}

pub const SCAN_HEADER: [&str; 12] = [
    "delta_K",
    "f",
    "order_disc",
    "p",
    "phi_mod",
    "delta_mod",
    "n",
    "kernel_size",
    "in_sl2",
    "witness",
    "witness_det",
    "n0",
];

#[derive(Debug, Serialize)]
pub struct LiftOut {
    pub element: String,
    pub lift: u64,
    pub modulus: u64,
}
