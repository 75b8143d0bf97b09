//! Unit-square reproduction: `u = y^{x/8}`, `w = ((4 + x) y)^{1/2}` on a
//! midpoint grid, conditioned on the vertical strips.
//!
//! The claimed inequality `E(|u|²) E(|w|²) ≤ |E(uw)|²` cannot hold: conditional
//! Hölder gives `|E(uw)|² ≤ E(|u|²) E(|w|²)` on every instance, and here the
//! product is exactly 2 while `|E(uw)|² < 2`. The report states both and
//! lets the computed sign stand.

use serde::Serialize;
use wcop_core::classify::{self, ClassifyConfig, CriterionVerdict};
use wcop_core::space::build_unit_square_instance;
use wcop_core::{tol, WeightedCondOp};

use crate::io::ReportDto;

/// Largest grid the dense oracles are run on.
pub const COARSE_GRID: usize = 12;
pub const MIN_GRID: usize = 8;

pub const CLAIMED_DIRECTION: &str = "E(|u|^2) E(|w|^2) <= |E(uw)|^2 on every strip";
pub const HOLDER_NOTE: &str =
    "conditional Hoelder: |E(uw)|^2 <= E(|u|^2) E(|w|^2) holds for every u, w and every strip";

pub fn eu2_closed(x: f64) -> f64 {
    4.0 / (4.0 + x)
}

pub fn ew2_closed(x: f64) -> f64 {
    (4.0 + x) / 2.0
}

pub fn euw_sq_closed(x: f64) -> f64 {
    64.0 * (4.0 + x) / ((x + 12.0) * (x + 12.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strip {
    pub x: f64,
    pub eu2: f64,
    pub ew2: f64,
    pub euw_sq: f64,
    /// `|E(uw)|² − E(|u|²) E(|w|²)`.
    pub gap: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub eu2: f64,
    pub ew2: f64,
    pub euw_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionSummary {
    pub class: String,
    pub kind: String,
    pub holds: Option<bool>,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitSquareReport {
    pub grid: usize,
    pub strips: Vec<Strip>,
    /// Max-absolute deviation of the strip statistics from the closed forms.
    #[serde(rename = "maxDeviation")]
    pub max_deviation: Deviation,
    #[serde(rename = "negativeStrips")]
    pub negative_strips: usize,
    #[serde(rename = "claimedDirection")]
    pub claimed_direction: &'static str,
    #[serde(rename = "claimReproduced")]
    pub claim_reproduced: bool,
    #[serde(rename = "holderNote")]
    pub holder_note: &'static str,
    /// `max |E(uw)|` on the grid and the closed-form value at the same strips.
    pub radius: f64,
    #[serde(rename = "radiusClosed")]
    pub radius_closed: f64,
    #[serde(rename = "normFormula")]
    pub norm_formula: f64,
    /// Criteria on the full grid.
    pub criteria: Vec<CriterionSummary>,
    /// Criteria plus oracles on a coarse grid.
    #[serde(rename = "coarseGrid")]
    pub coarse_grid: usize,
    #[serde(rename = "coarseReport")]
    pub coarse_report: ReportDto,
}

fn strips(op: &WeightedCondOp, grid: usize) -> Vec<Strip> {
    (0..grid)
        .map(|i| {
            let x = (i as f64 + 0.5) / grid as f64;
            let eu2 = op.atom_eu2()[i];
            let ew2 = op.atom_ew2()[i];
            let euw_sq = op.atom_euw()[i].norm_sqr();
            let gap = euw_sq - eu2 * ew2;
            let sign = if gap.abs() <= tol::COMPARE {
                0
            } else if gap < 0.0 {
                -1
            } else {
                1
            };
            Strip {
                x,
                eu2,
                ew2,
                euw_sq,
                gap,
                sign,
            }
        })
        .collect()
}

fn instance(grid: usize) -> Result<WeightedCondOp, wcop_core::Error> {
    let inst = build_unit_square_instance(grid)?;
    WeightedCondOp::new(inst.space, inst.part, inst.u, inst.w)
}

pub fn cmd_unit_square(grid: usize) -> Result<UnitSquareReport, wcop_core::Error> {
    if grid < MIN_GRID {
        return Err(wcop_core::Error::InvalidGrid(grid));
    }
    let op = instance(grid)?;
    let strips = strips(&op, grid);
    let dev = |f: fn(&Strip) -> f64, g: fn(f64) -> f64| {
        strips
            .iter()
            .map(|s| (f(s) - g(s.x)).abs())
            .fold(0.0, f64::max)
    };
    let max_deviation = Deviation {
        eu2: dev(|s| s.eu2, eu2_closed),
        ew2: dev(|s| s.ew2, ew2_closed),
        euw_sq: dev(|s| s.euw_sq, euw_sq_closed),
    };
    let negative_strips = strips.iter().filter(|s| s.sign < 0).count();
    let claim_reproduced = strips.iter().all(|s| s.gap >= -tol::COMPARE);
    let radius_closed = strips
        .iter()
        .map(|s| euw_sq_closed(s.x).sqrt())
        .fold(0.0, f64::max);

    let criteria = classify::criteria_only(&op, tol::COMPARE)
        .into_iter()
        .map(|r| CriterionSummary {
            class: r.class.label().into(),
            kind: r.kind.label().into(),
            holds: match r.criterion {
                CriterionVerdict::Holds => Some(true),
                CriterionVerdict::Fails => Some(false),
                CriterionVerdict::NotApplicable => None,
            },
            margin: r.margin,
        })
        .collect();

    let coarse_grid = grid.min(COARSE_GRID);
    let coarse = classify::classify_all(&instance(coarse_grid)?, &ClassifyConfig::default())?;

    Ok(UnitSquareReport {
        grid,
        radius: wcop_core::spectra::spectral_radius(&op),
        norm_formula: op.norm_formula(),
        strips,
        max_deviation,
        negative_strips,
        claimed_direction: CLAIMED_DIRECTION,
        claim_reproduced,
        holder_note: HOLDER_NOTE,
        radius_closed,
        criteria,
        coarse_grid,
        coarse_report: ReportDto::from(&coarse),
    })
}
