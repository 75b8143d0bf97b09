//! Verification campaigns: every closed form and class criterion checked
//! against the dense oracles on seeded instances.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use wcop_core::classify::{self, ClassifyConfig, FindingKind};
use wcop_core::oracle::{self, ComplexMatrix};
use wcop_core::spectra::{self, SpectrumConfig};
use wcop_core::{tol, Complex64, Side, WeightedCondOp};

use crate::io::InstanceDto;
use crate::random::{self, Family, Origin, Shape};

/// Limit for `‖Δ_n(T) − Δ_1(T)‖`, `n ≤ ALUTHGE_DEPTH`.
pub const ALUTHGE_ITERATE_TOL: f64 = 5e-8;
pub const ALUTHGE_DEPTH: usize = 5;
/// Floating-point identities that involve no decomposition.
pub const EXACT_TOL: f64 = 1e-12;
pub const SEMIGROUP_TOL: f64 = 1e-9;
/// One structured instance per this many random ones.
pub const STRUCTURED_RATIO: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub tol: f64,
    pub p_grid: Vec<f64>,
    pub max_power: usize,
    pub seed: u64,
    pub instance_count: usize,
    pub max_points: usize,
    pub max_atoms: usize,
    /// Append structured instances (`ceil(instance_count / 10)`).
    pub structured: bool,
    /// Harness self-test: perturb the closed-form modulus `|T|`.
    pub inject_fault: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = ClassifyConfig::default();
        Self {
            tol: c.tol,
            p_grid: c.p_grid,
            max_power: c.max_power,
            seed: 42,
            instance_count: 200,
            max_points: 12,
            max_atoms: 4,
            structured: true,
            inject_fault: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        self.classify_config()
            .validate()
            .map_err(|e| e.to_string())?;
        if self.max_atoms < 1 || self.max_points < self.max_atoms {
            return Err(format!(
                "need max_points >= max_atoms >= 1, got {} and {}",
                self.max_points, self.max_atoms
            ));
        }
        if self.max_points < 2 {
            return Err(format!(
                "max_points must be at least 2, got {}",
                self.max_points
            ));
        }
        Ok(())
    }

    pub fn classify_config(&self) -> ClassifyConfig {
        ClassifyConfig {
            tol: self.tol,
            p_grid: self.p_grid.clone(),
            max_power: self.max_power,
        }
    }

    fn shape(&self) -> Shape {
        Shape {
            max_points: self.max_points,
            max_atoms: self.max_atoms,
        }
    }

    pub fn structured_count(&self) -> usize {
        if self.structured {
            self.instance_count.div_ceil(STRUCTURED_RATIO)
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl PropertyCheck {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            limit: 0.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub origin: Origin,
    pub fingerprint: String,
    pub instance: InstanceDto,
    pub checks: Vec<PropertyCheck>,
    /// The fixed-point hypotheses held, so `T = T̂` was required.
    pub fixed_point_asserted: bool,
}

impl InstanceRecord {
    pub fn failed(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub property: String,
    pub index: usize,
    pub origin: Origin,
    pub instance: InstanceDto,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PropertySummary {
    pub checked: usize,
    pub failed: usize,
    /// Largest `value / limit` seen (`value` itself when the limit is 0).
    pub worst: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub trials: usize,
    pub violations: Vec<Violation>,
    pub summary: BTreeMap<String, PropertySummary>,
    #[serde(rename = "fixedPointAsserted")]
    pub fixed_point_asserted: usize,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn within(name: impl Into<String>, err: f64, scale: f64, t: f64) -> PropertyCheck {
    PropertyCheck::at_most(name, err, t * (1.0 + scale))
}

fn error_check(group: &str, e: wcop_core::Error) -> PropertyCheck {
    PropertyCheck {
        name: format!("{group}.error: {e}"),
        value: f64::INFINITY,
        limit: 0.0,
        passed: false,
    }
}

fn label(p: f64) -> String {
    format!("p={p}")
}

type Checks = Vec<PropertyCheck>;
type Step = wcop_core::Result<()>;

fn check_condops(op: &WeightedCondOp, t: &ComplexMatrix, norm: f64, out: &mut Checks) -> Step {
    let space = op.space();
    let (mw, e, mu) = op.factors();
    let product = &(&mw * &e) * &mu;
    out.push(within(
        "condops.factorization",
        oracle::op_norm(&(&product - t), space)?,
        norm,
        EXACT_TOL,
    ));
    let holder = (0..op.num_atoms())
        .map(|a| {
            let bound = op.atom_eu2()[a] * op.atom_ew2()[a];
            (op.atom_euw()[a].norm_sqr() - bound).max(0.0) / (1.0 + bound)
        })
        .fold(0.0, f64::max);
    out.push(PropertyCheck::at_most("condops.holder", holder, EXACT_TOL));
    let adj = oracle::weighted_adjoint(t, space)?;
    let swapped = op.adjoint().assemble_matrix();
    out.push(within(
        "condops.adjoint_symmetry",
        oracle::op_norm(&(&adj - &swapped), space)?,
        norm,
        EXACT_TOL,
    ));
    let back = oracle::weighted_adjoint(&adj, space)?;
    out.push(within(
        "oracle.adjoint_involution",
        oracle::op_norm(&(&back - t), space)?,
        norm,
        EXACT_TOL,
    ));
    let gram = &adj * t;
    out.push(within(
        "oracle.norm_square",
        (oracle::op_norm(&gram, space)? - norm * norm).abs(),
        norm * norm,
        tol::PSD,
    ));
    let powers = [0.5, 1.0, 1.5];
    let mut semigroup: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &p in &powers {
        for &q in &powers {
            let a = oracle::frac_power_psd(&gram, space, p)?;
            let b = oracle::frac_power_psd(&gram, space, q)?;
            let c = oracle::frac_power_psd(&gram, space, p + q)?;
            semigroup = semigroup.max(oracle::op_norm(&(&(&a * &b) - &c), space)?);
            scale = scale.max(norm.powf(2.0 * (p + q)));
        }
    }
    out.push(within(
        "oracle.frac_power_semigroup",
        semigroup,
        scale,
        SEMIGROUP_TOL,
    ));
    Ok(())
}

fn check_norm(op: &WeightedCondOp, norm: f64, cfg: &RunConfig, out: &mut Checks) {
    let closed = op.norm_formula();
    out.push(within("norm.formula", (closed - norm).abs(), norm, cfg.tol));
}

fn check_polar(
    op: &WeightedCondOp,
    t: &ComplexMatrix,
    norm: f64,
    cfg: &RunConfig,
    out: &mut Checks,
) -> Step {
    let space = op.space();
    let closed = op.polar_closed();
    let abs = if cfg.inject_fault {
        closed.abs.scale(Complex64::new(1.0 + 1e-3, 0.0))
    } else {
        closed.abs
    };
    let u = closed.isometry;
    out.push(within(
        "polar.recompose",
        oracle::op_norm(&(&(&u * &abs) - t), space)?,
        norm,
        cfg.tol,
    ));
    let adj = oracle::weighted_adjoint(t, space)?;
    let root = oracle::frac_power_psd(&(&adj * t), space, 0.5)?;
    out.push(within(
        "polar.abs_vs_oracle",
        oracle::op_norm(&(&abs - &root), space)?,
        norm,
        cfg.tol,
    ));
    let u_adj = oracle::weighted_adjoint(&u, space)?;
    let partial = &(&u * &u_adj) * &u;
    out.push(within(
        "polar.partial_isometry",
        oracle::op_norm(&(&partial - &u), space)?,
        1.0,
        cfg.tol,
    ));
    let leak = oracle::kernel_leak(&u, &abs, space)?.max(oracle::kernel_leak(&abs, &u, space)?);
    out.push(within("polar.kernel", leak, norm, cfg.tol));
    // the dense polar reconstructs T as well
    let dense = oracle::polar(t, space, tol::RANK)?;
    out.push(within(
        "oracle.polar_recompose",
        oracle::op_norm(&(&(&dense.isometry * &dense.abs) - t), space)?,
        norm,
        1e-10,
    ));
    Ok(())
}

fn check_powers(
    op: &WeightedCondOp,
    t: &ComplexMatrix,
    norm: f64,
    cfg: &RunConfig,
    out: &mut Checks,
) -> Step {
    let space = op.space();
    let adj = oracle::weighted_adjoint(t, space)?;
    let gram = &adj * t;
    let cogram = t * &adj;
    for &p in &cfg.p_grid {
        for (side, m, name) in [(Side::Left, &gram, "left"), (Side::Right, &cogram, "right")] {
            let dense = oracle::frac_power_psd(m, space, p)?;
            let closed = op.self_product_power_closed(p, side)?;
            out.push(within(
                format!("power.{name}.{}", label(p)),
                oracle::op_norm(&(&closed - &dense), space)?,
                norm.powf(2.0 * p),
                cfg.tol,
            ));
        }
    }
    Ok(())
}

fn check_aluthge(op: &WeightedCondOp, norm: f64, cfg: &RunConfig, out: &mut Checks) -> Step {
    let space = op.space();
    let closed = op.aluthge_closed();
    let first = spectra::iterated_aluthge(op, 1)?;
    out.push(within(
        "aluthge.closed_vs_oracle",
        oracle::op_norm(&(&closed - &first), space)?,
        norm,
        cfg.tol,
    ));
    let mut m = first.clone();
    let mut drift: f64 = 0.0;
    for _ in 2..=ALUTHGE_DEPTH {
        m = oracle::aluthge(&m, space)?;
        drift = drift.max(oracle::op_norm(&(&m - &first), space)?);
    }
    out.push(within(
        "aluthge.iterate_stable",
        drift,
        norm,
        ALUTHGE_ITERATE_TOL,
    ));
    Ok(())
}

fn check_classes(op: &WeightedCondOp, cfg: &RunConfig, out: &mut Checks) -> Step {
    let report = classify::classify_all(op, &cfg.classify_config())?;
    for v in &report.verdicts {
        let class = match v.class.exponent() {
            Some(p) => format!("{}[{}]", v.class.label(), label(p)),
            None => v.class.label().to_string(),
        };
        out.push(PropertyCheck {
            name: format!("class.{class}.{}", v.kind.label()),
            value: v.margin,
            limit: cfg.tol,
            passed: v.is_consistent(),
        });
    }
    let mut p_constant = true;
    for f in &report.findings {
        match (f.kind, f.check) {
            (FindingKind::Discrepancy, _) => {}
            (_, "p_hyponormal_constant") => p_constant = false,
            (FindingKind::Violation, check) => out.push(PropertyCheck::holds(
                format!("class.finding.{check}"),
                false,
            )),
            (FindingKind::Failure, check) => out.push(PropertyCheck::holds(
                format!("class.failure.{check}"),
                false,
            )),
        }
    }
    out.push(PropertyCheck::holds("class.p_constant", p_constant));
    Ok(())
}

fn check_spectra(op: &WeightedCondOp, norm: f64, cfg: &RunConfig, out: &mut Checks) -> Step {
    let space = op.space();
    let report = spectra::spectrum(
        op,
        &SpectrumConfig {
            tol: cfg.tol,
            aluthge_depth: ALUTHGE_DEPTH,
        },
    )?;
    let r = report.spectral_radius;
    out.push(PropertyCheck::at_most(
        "spectra.multiset",
        report.multiset_gap,
        tol::EIG_MATCH * (1.0 + r),
    ));
    out.push(within(
        "spectra.radius_eigen",
        (report.eigen_radius - r).abs(),
        r,
        tol::EIG_MATCH,
    ));
    let aluthge_gap = report
        .aluthge_norms
        .iter()
        .map(|n| (n - r).abs())
        .fold(0.0, f64::max);
    out.push(within(
        "spectra.radius_aluthge",
        aluthge_gap,
        r,
        tol::EIG_MATCH,
    ));
    let hat = oracle::op_norm(&op.aluthge_closed(), space)?;
    out.push(within("spectra.hat_norm", (hat - r).abs(), r, cfg.tol));
    out.push(PropertyCheck::at_most(
        "spectra.radius_le_norm",
        r - norm,
        cfg.tol * (1.0 + norm),
    ));
    out.push(PropertyCheck::holds(
        "spectra.zero_in_spectrum",
        !report.must_be_singular || report.zero_in_spectrum,
    ));
    out.push(PropertyCheck::holds(
        "spectra.point_verified",
        report.nonzero_point_spectrum(cfg.tol).all(|e| e.verified),
    ));
    out.push(PropertyCheck::at_most(
        "spectra.level_sets",
        spectra::level_set_residual(op, &report.point_spectrum)?,
        EXACT_TOL * (1.0 + r),
    ));
    if let Some(eq) = report.joint_equality {
        out.push(PropertyCheck::holds("spectra.joint_equality", eq));
    }
    let iso = spectra::isolated_point_check(op, cfg.tol)?;
    out.push(PropertyCheck::holds("spectra.isolated", iso.passed()));
    out.push(PropertyCheck::holds(
        "spectra.adjoint_conjugate",
        iso.adjoint_conjugate,
    ));
    Ok(())
}

fn check_fixed_point(
    op: &WeightedCondOp,
    norm: f64,
    cfg: &RunConfig,
    out: &mut Checks,
) -> wcop_core::Result<bool> {
    let fp = spectra::aluthge_fixed_point_check(op, cfg.tol)?;
    if fp.asserted {
        out.push(within("fixed_point.distance", fp.distance, norm, cfg.tol));
    }
    Ok(fp.asserted)
}

/// All property checks for one instance. Oracle failures become failing
/// checks named `<group>.error`.
pub fn check_instance(op: &WeightedCondOp, cfg: &RunConfig) -> (Checks, bool) {
    let mut out = Vec::new();
    let t = op.assemble_matrix();
    let norm = match oracle::op_norm(&t, op.space()) {
        Ok(n) => n,
        Err(e) => return (vec![error_check("norm", e)], false),
    };
    check_norm(op, norm, cfg, &mut out);
    let steps: [(&str, Step); 6] = [
        ("condops", check_condops(op, &t, norm, &mut out)),
        ("polar", check_polar(op, &t, norm, cfg, &mut out)),
        ("power", check_powers(op, &t, norm, cfg, &mut out)),
        ("aluthge", check_aluthge(op, norm, cfg, &mut out)),
        ("class", check_classes(op, cfg, &mut out)),
        ("spectra", check_spectra(op, norm, cfg, &mut out)),
    ];
    let mut errors = Vec::new();
    for (group, r) in steps {
        if let Err(e) = r {
            errors.push(error_check(group, e));
        }
    }
    let asserted = match check_fixed_point(op, norm, cfg, &mut out) {
        Ok(a) => a,
        Err(e) => {
            errors.push(error_check("fixed_point", e));
            false
        }
    };
    out.extend(errors);
    (out, asserted)
}

/// Instance `index` of the campaign: random ones first, then structured
/// ones cycling through [`Family::ALL`].
pub fn campaign_instance(cfg: &RunConfig, index: usize) -> (Origin, WeightedCondOp) {
    let shape = cfg.shape();
    if index < cfg.instance_count {
        (
            Origin::Random,
            random::random_instance(cfg.seed, index as u64, shape),
        )
    } else {
        let k = index - cfg.instance_count;
        let family = Family::ALL[k % Family::ALL.len()];
        (
            Origin::Structured(family),
            random::structured_instance(cfg.seed, k as u64, family, shape),
        )
    }
}

/// Runs every instance in parallel; records come back in index order.
pub fn run_campaign(cfg: &RunConfig) -> Result<Vec<InstanceRecord>, String> {
    cfg.validate()?;
    let total = cfg.instance_count + cfg.structured_count();
    Ok((0..total)
        .into_par_iter()
        .map(|index| {
            let (origin, op) = campaign_instance(cfg, index);
            let (checks, fixed_point_asserted) = check_instance(&op, cfg);
            InstanceRecord {
                index,
                origin,
                fingerprint: format!("{:016x}", op.fingerprint()),
                instance: InstanceDto::from_op(&op),
                checks,
                fixed_point_asserted,
            }
        })
        .collect())
}

pub fn summarize(records: &[InstanceRecord]) -> VerifyOutcome {
    let mut summary: BTreeMap<String, PropertySummary> = BTreeMap::new();
    let mut violations = Vec::new();
    for r in records {
        for c in &r.checks {
            let s = summary.entry(c.name.clone()).or_default();
            s.checked += 1;
            let ratio = if c.limit > 0.0 {
                c.value / c.limit
            } else {
                c.value
            };
            s.worst = s.worst.max(ratio);
            if !c.passed {
                s.failed += 1;
                violations.push(Violation {
                    property: c.name.clone(),
                    index: r.index,
                    origin: r.origin,
                    instance: r.instance.clone(),
                    value: c.value,
                    limit: c.limit,
                });
            }
        }
    }
    VerifyOutcome {
        trials: records.len(),
        violations,
        summary,
        fixed_point_asserted: records.iter().filter(|r| r.fixed_point_asserted).count(),
    }
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifyOutcome, String> {
    Ok(summarize(&run_campaign(cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(count: usize) -> RunConfig {
        RunConfig {
            instance_count: count,
            max_points: 6,
            max_atoms: 3,
            ..RunConfig::default()
        }
    }

    #[test]
    fn empty_campaign_passes() {
        let out = cmd_verify(&small(0)).unwrap();
        assert_eq!(out.trials, 0);
        assert!(out.passed());
    }

    #[test]
    fn injected_fault_is_caught() {
        let cfg = RunConfig {
            inject_fault: true,
            structured: false,
            ..small(4)
        };
        let out = cmd_verify(&cfg).unwrap();
        assert!(out
            .violations
            .iter()
            .any(|v| v.property == "polar.abs_vs_oracle"));
    }

    #[test]
    fn deterministic() {
        let a = serde_json::to_string(&cmd_verify(&small(6)).unwrap()).unwrap();
        let b = serde_json::to_string(&cmd_verify(&small(6)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let bad = RunConfig {
            max_atoms: 0,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            max_points: 3,
            max_atoms: 4,
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            p_grid: vec![],
            ..RunConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn structured_instances_follow_random_ones() {
        let cfg = small(20);
        assert_eq!(cfg.structured_count(), 2);
        assert_eq!(campaign_instance(&cfg, 19).0, Origin::Random);
        assert_eq!(
            campaign_instance(&cfg, 20).0,
            Origin::Structured(Family::MeasurableMultiplier)
        );
    }
}
