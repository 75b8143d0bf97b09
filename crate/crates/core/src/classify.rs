//! Partial normality classes, each decided twice: by a pointwise criterion on
//! the conditional statistics of `u` and `w`, and by the defining operator
//! inequality evaluated on dense matrices.
//!
//! A criterion is either sufficient, necessary or an equivalence for its
//! class. [`ClassVerdict::is_consistent`] checks that the two verdicts respect
//! that direction; a failure is a counterexample to the criterion (or a
//! numerical defect) and is surfaced in the report rather than corrected.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked, else from libm
use num_traits::Float;

use crate::condops::{Side, WeightedCondOp};
use crate::error::{Error, Result};
use crate::oracle::{self, ComplexMatrix};
use crate::tol;

/// Witnesses recorded per verdict, at most.
const MAX_WITNESSES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassName {
    Normal,
    Hyponormal,
    PHyponormal(f64),
    PQuasihyponormal(f64),
    WeaklyHyponormal,
    Normaloid,
}

impl ClassName {
    pub fn label(&self) -> &'static str {
        match self {
            ClassName::Normal => "normal",
            ClassName::Hyponormal => "hyponormal",
            ClassName::PHyponormal(_) => "p_hyponormal",
            ClassName::PQuasihyponormal(_) => "p_quasihyponormal",
            ClassName::WeaklyHyponormal => "weakly_hyponormal",
            ClassName::Normaloid => "normaloid",
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            ClassName::PHyponormal(p) | ClassName::PQuasihyponormal(p) => Some(*p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionVerdict {
    Holds,
    Fails,
    /// The criterion's region is empty or its hypotheses are not met.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    Sufficient,
    Necessary,
    Equivalent,
}

impl CriterionKind {
    pub fn label(&self) -> &'static str {
        match self {
            CriterionKind::Sufficient => "sufficient",
            CriterionKind::Necessary => "necessary",
            CriterionKind::Equivalent => "equivalent",
        }
    }
}

/// A location where a criterion is violated. `lhs` and `rhs` are the two
/// sides of the tested relation (moduli for complex-valued sides) and `gap`
/// the amount by which it fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub atom: usize,
    pub point: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassVerdict {
    pub class: ClassName,
    pub kind: CriterionKind,
    pub oracle: bool,
    pub criterion: CriterionVerdict,
    /// Largest violation gap of the criterion over its region; it holds iff
    /// this is at most the tolerance.
    pub margin: f64,
    /// Class-specific oracle statistic: a commutator norm, a minimum
    /// eigenvalue or a relative norm deviation.
    pub oracle_margin: f64,
    pub witnesses: Vec<Witness>,
}

impl ClassVerdict {
    /// Sufficient: criterion ⇒ oracle. Necessary: oracle ⇒ criterion.
    /// Equivalent: both directions.
    pub fn is_consistent(&self) -> bool {
        use CriterionVerdict::*;
        match (self.kind, self.criterion) {
            (_, NotApplicable) => true,
            (CriterionKind::Sufficient, Holds) => self.oracle,
            (CriterionKind::Sufficient, Fails) => true,
            (CriterionKind::Necessary, Holds) => true,
            (CriterionKind::Necessary, Fails) => !self.oracle,
            (CriterionKind::Equivalent, Holds) => self.oracle,
            (CriterionKind::Equivalent, Fails) => !self.oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingKind {
    /// A logical invariant between verdicts failed.
    Violation,
    /// A printed formula disagrees with the computation; informational.
    Discrepancy,
    /// An oracle computation failed.
    Failure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub kind: FindingKind,
    pub check: &'static str,
    pub detail: String,
    pub value: f64,
}

impl Finding {
    fn new(kind: FindingKind, check: &'static str, detail: String, value: f64) -> Self {
        Self {
            kind,
            check,
            detail,
            value,
        }
    }
}

/// Verdicts for one class plus any cross-checks recorded on the way.
#[derive(Debug, Clone, Default)]
pub struct ClassOutcome {
    pub verdicts: Vec<ClassVerdict>,
    pub findings: Vec<Finding>,
}

impl ClassOutcome {
    fn extend(&mut self, other: ClassOutcome) {
        self.verdicts.extend(other.verdicts);
        self.findings.extend(other.findings);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyConfig {
    pub tol: f64,
    pub p_grid: Vec<f64>,
    pub max_power: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            tol: tol::COMPARE,
            p_grid: vec![0.5, 1.0, 2.0, 3.7],
            max_power: tol::MAX_POWER,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidTolerance(self.tol));
        }
        if self.p_grid.is_empty() {
            return Err(Error::EmptyExponentGrid);
        }
        if let Some(&p) = self.p_grid.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidExponent(p));
        }
        if self.max_power < 2 {
            return Err(Error::InvalidPowerCount(self.max_power));
        }
        Ok(())
    }
}

pub const SUPPORT_READING_NOTE: &str =
    "the necessary region for p-quasihyponormality uses the support of E(u) \
     (points where E(u) != 0) together with G = S(E(|w|^2))";

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub fingerprint: u64,
    pub config: ClassifyConfig,
    pub verdicts: Vec<ClassVerdict>,
    pub findings: Vec<Finding>,
    pub notes: Vec<&'static str>,
}

impl ClassificationReport {
    pub fn inconsistent_verdicts(&self) -> impl Iterator<Item = &ClassVerdict> {
        self.verdicts.iter().filter(|v| !v.is_consistent())
    }

    pub fn violations(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.kind != FindingKind::Discrepancy)
    }

    /// No inconsistent verdict and no violation or failure finding.
    pub fn is_consistent(&self) -> bool {
        self.inconsistent_verdicts().next().is_none() && self.violations().next().is_none()
    }

    /// Oracle verdict of the first record for `class`.
    pub fn oracle(&self, class: ClassName) -> Option<bool> {
        self.verdicts
            .iter()
            .find(|v| v.class == class)
            .map(|v| v.oracle)
    }

    pub fn verdict(&self, class: ClassName, kind: CriterionKind) -> Option<&ClassVerdict> {
        self.verdicts
            .iter()
            .find(|v| v.class == class && v.kind == kind)
    }
}

struct Gap {
    atom: usize,
    point: Option<usize>,
    lhs: f64,
    rhs: f64,
    gap: f64,
}

struct Criterion {
    verdict: CriterionVerdict,
    margin: f64,
    witnesses: Vec<Witness>,
}

fn judge(gaps: impl IntoIterator<Item = Gap>, tol: f64) -> Criterion {
    let mut seen = false;
    let mut margin: f64 = 0.0;
    let mut witnesses = Vec::new();
    for g in gaps {
        seen = true;
        margin = margin.max(g.gap);
        if g.gap > tol && witnesses.len() < MAX_WITNESSES {
            witnesses.push(Witness {
                atom: g.atom,
                point: g.point,
                lhs: g.lhs,
                rhs: g.rhs,
                gap: g.gap,
            });
        }
    }
    let verdict = if !seen {
        CriterionVerdict::NotApplicable
    } else if margin <= tol {
        CriterionVerdict::Holds
    } else {
        CriterionVerdict::Fails
    };
    Criterion {
        verdict,
        margin,
        witnesses,
    }
}

fn verdict(
    class: ClassName,
    kind: CriterionKind,
    oracle: bool,
    oracle_margin: f64,
    c: Criterion,
) -> ClassVerdict {
    ClassVerdict {
        class,
        kind,
        oracle,
        criterion: c.verdict,
        margin: c.margin,
        oracle_margin,
        witnesses: c.witnesses,
    }
}

fn atom_gap(atom: usize, lhs: f64, rhs: f64, gap: f64) -> Gap {
    Gap {
        atom,
        point: None,
        lhs,
        rhs,
        gap,
    }
}

fn at_least(atom: usize, lhs: f64, rhs: f64) -> Gap {
    atom_gap(atom, lhs, rhs, (rhs - lhs).max(0.0))
}

fn equal(atom: usize, lhs: f64, rhs: f64) -> Gap {
    atom_gap(atom, lhs, rhs, (lhs - rhs).abs())
}

/// Dense matrices shared by the oracles.
struct Dense {
    t: ComplexMatrix,
    t_adj: ComplexMatrix,
    norm: f64,
}

impl Dense {
    fn new(op: &WeightedCondOp) -> Result<Self> {
        let t = op.assemble_matrix();
        let t_adj = oracle::weighted_adjoint(&t, op.space())?;
        let norm = oracle::op_norm(&t, op.space())?;
        Ok(Self { t, t_adj, norm })
    }

    fn gram(&self) -> ComplexMatrix {
        &self.t_adj * &self.t
    }

    fn cogram(&self) -> ComplexMatrix {
        &self.t * &self.t_adj
    }
}

fn sqrt_stats(op: &WeightedCondOp, a: usize) -> (f64, f64) {
    (op.atom_eu2()[a].sqrt(), op.atom_ew2()[a].sqrt())
}

/// `|E(u)|² E(|w|²)` against `|E(w)|² E(|u|²)` per atom.
fn mean_balance(op: &WeightedCondOp, a: usize) -> (f64, f64) {
    (
        op.atom_eu()[a].norm_sqr() * op.atom_ew2()[a],
        op.atom_ew()[a].norm_sqr() * op.atom_eu2()[a],
    )
}

fn normal_criteria(op: &WeightedCondOp, tol: f64) -> (Criterion, Criterion) {
    let part = op.partition();
    let (u, w) = (op.u().values(), op.w().values());
    // (E|u|²)^{1/2} w̄ = u (E|w|²)^{1/2} pointwise
    let sufficient = judge(
        (0..op.len()).map(|i| {
            let a = part.atom_of(i);
            let (su, sw) = sqrt_stats(op, a);
            let lhs = w[i].conj() * su;
            let rhs = u[i] * sw;
            Gap {
                atom: a,
                point: Some(i),
                lhs: lhs.norm(),
                rhs: rhs.norm(),
                gap: (lhs - rhs).norm(),
            }
        }),
        tol,
    );
    let necessary = judge(
        (0..op.num_atoms()).map(|a| {
            let (l, r) = mean_balance(op, a);
            equal(a, l, r)
        }),
        tol,
    );
    (sufficient, necessary)
}

/// Normality: oracle `‖T*T − TT*‖ ≤ tol (1 + ‖T‖²)`; one sufficient and one
/// necessary pointwise criterion.
pub fn is_normal(op: &WeightedCondOp, tol: f64) -> Result<ClassOutcome> {
    let d = Dense::new(op)?;
    let comm = oracle::op_norm(&(&d.gram() - &d.cogram()), op.space())?;
    let oracle = tol::close(comm, d.norm * d.norm, tol);
    let (suff, nec) = normal_criteria(op, tol);
    Ok(ClassOutcome {
        verdicts: vec![
            verdict(
                ClassName::Normal,
                CriterionKind::Sufficient,
                oracle,
                comm,
                suff,
            ),
            verdict(
                ClassName::Normal,
                CriterionKind::Necessary,
                oracle,
                comm,
                nec,
            ),
        ],
        findings: Vec::new(),
    })
}

fn hyponormal_criteria(op: &WeightedCondOp, tol: f64) -> (Criterion, Criterion) {
    let part = op.partition();
    let (u, w) = (op.u().values(), op.w().values());
    // u (E|w|²)^{1/2} − (E|u|²)^{1/2} w̄ ≥ 0, read as a nonnegative real
    let sufficient = judge(
        (0..op.len()).map(|i| {
            let a = part.atom_of(i);
            let (su, sw) = sqrt_stats(op, a);
            let x = u[i] * sw;
            let y = w[i].conj() * su;
            let d = x - y;
            let gap = if d.re >= 0.0 { d.im.abs() } else { d.norm() };
            Gap {
                atom: a,
                point: Some(i),
                lhs: x.norm(),
                rhs: y.norm(),
                gap,
            }
        }),
        tol,
    );
    let necessary = judge(
        (0..op.num_atoms()).map(|a| {
            let (l, r) = mean_balance(op, a);
            at_least(a, l, r)
        }),
        tol,
    );
    (sufficient, necessary)
}

/// `scale` is the size of the operands whose difference is `a`.
fn psd_outcome(
    a: &ComplexMatrix,
    op: &WeightedCondOp,
    tol: f64,
    scale: f64,
) -> Result<(bool, f64)> {
    let m = oracle::psd_margin(a, op.space())?;
    Ok((m.is_psd_scaled(tol, scale), m.min_eigenvalue))
}

/// Hyponormality (`T*T ≥ TT*`) and p-hyponormality (`(T*T)^p ≥ (TT*)^p`) for
/// each `p` in the grid. Oracle powers come from the spectral routine; the
/// closed-form powers are compared against them and any mismatch is recorded
/// as a finding.
pub fn is_hyponormal_family(op: &WeightedCondOp, p_grid: &[f64], tol: f64) -> Result<ClassOutcome> {
    if p_grid.is_empty() {
        return Err(Error::EmptyExponentGrid);
    }
    let d = Dense::new(op)?;
    let (gram, cogram) = (d.gram(), d.cogram());
    let mut out = ClassOutcome::default();

    let mut push = |class: ClassName, oracle: bool, margin: f64| {
        let (suff, nec) = hyponormal_criteria(op, tol);
        out.verdicts.push(verdict(
            class,
            CriterionKind::Sufficient,
            oracle,
            margin,
            suff,
        ));
        out.verdicts.push(verdict(
            class,
            CriterionKind::Necessary,
            oracle,
            margin,
            nec,
        ));
    };

    let (oracle, margin) = psd_outcome(&(&gram - &cogram), op, tol, d.norm * d.norm)?;
    push(ClassName::Hyponormal, oracle, margin);

    let mut findings = Vec::new();
    for &p in p_grid {
        let left = oracle::frac_power_psd(&gram, op.space(), p)?;
        let right = oracle::frac_power_psd(&cogram, op.space(), p)?;
        for (side, dense, label) in [(Side::Left, &left, "left"), (Side::Right, &right, "right")] {
            let closed = op.self_product_power_closed(p, side)?;
            let err = oracle::op_norm(&(&closed - dense), op.space())?;
            let scale = oracle::op_norm(dense, op.space())?;
            if !tol::close(err, scale, tol) {
                findings.push(Finding::new(
                    FindingKind::Violation,
                    "closed_power_vs_oracle",
                    format!("{label} self-product power p={p} differs from the spectral power"),
                    err,
                ));
            }
        }
        let (oracle, margin) = psd_outcome(&(&left - &right), op, tol, d.norm.powf(2.0 * p))?;
        push(ClassName::PHyponormal(p), oracle, margin);
    }
    out.findings = findings;
    Ok(out)
}

fn quasi_criteria(op: &WeightedCondOp, tol: f64) -> (Criterion, Criterion, Criterion) {
    let holder = |a: usize| {
        at_least(
            a,
            op.atom_euw()[a].norm_sqr(),
            op.atom_eu2()[a] * op.atom_ew2()[a],
        )
    };
    let suff = judge((0..op.num_atoms()).map(holder), tol);
    let nec = judge(
        (0..op.num_atoms())
            .filter(|&a| op.atom_eu()[a].norm() > tol::SUPPORT && op.atom_in_g(a))
            .map(holder),
        tol,
    );
    let full_support = op
        .u()
        .values()
        .iter()
        .chain(op.w().values())
        .all(|z| z.norm() > tol::SUPPORT);
    let equiv = if full_support {
        judge((0..op.num_atoms()).map(holder), tol)
    } else {
        judge(core::iter::empty(), tol)
    };
    (suff, nec, equiv)
}

/// p-quasihyponormality: `T*((T*T)^p − (TT*)^p)T ≥ 0`. Criteria compare
/// `|E(uw)|²` with `E(|u|²) E(|w|²)`: sufficient everywhere, necessary on
/// `supp E(u) ∩ G`, and an equivalence when `u` and `w` vanish nowhere.
pub fn is_p_quasihyponormal(op: &WeightedCondOp, p: f64, tol: f64) -> Result<ClassOutcome> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let d = Dense::new(op)?;
    let left = oracle::frac_power_psd(&d.gram(), op.space(), p)?;
    let right = oracle::frac_power_psd(&d.cogram(), op.space(), p)?;
    let sandwich = &(&d.t_adj * &(&left - &right)) * &d.t;
    let (oracle, margin) = psd_outcome(&sandwich, op, tol, d.norm.powf(2.0 * p + 2.0))?;

    let class = ClassName::PQuasihyponormal(p);
    let (suff, nec, equiv) = quasi_criteria(op, tol);
    Ok(ClassOutcome {
        verdicts: vec![
            verdict(class, CriterionKind::Sufficient, oracle, margin, suff),
            verdict(class, CriterionKind::Necessary, oracle, margin, nec),
            verdict(class, CriterionKind::Equivalent, oracle, margin, equiv),
        ],
        findings: Vec::new(),
    })
}

fn weak_relation(op: &WeightedCondOp, a: usize) -> Gap {
    equal(
        a,
        op.atom_euw()[a].norm(),
        op.atom_eu2()[a] * op.atom_ew2()[a].sqrt(),
    )
}

/// `|E(uw)| = E(|u|²) (E|w|²)^{1/2}` on every atom of `S`, the sufficient
/// condition for weak hyponormality. Vacuously true when `S` is empty.
pub fn weak_condition_holds(op: &WeightedCondOp, tol: f64) -> bool {
    (0..op.num_atoms())
        .filter(|&a| op.atom_in_s(a))
        .all(|a| weak_relation(op, a).gap <= tol)
}

fn weak_criteria(op: &WeightedCondOp, tol: f64) -> (Criterion, Criterion) {
    let relation = |a: usize| weak_relation(op, a);
    let suff = judge(
        (0..op.num_atoms())
            .filter(|&a| op.atom_in_s(a))
            .map(relation),
        tol,
    );
    let nec = judge(
        (0..op.num_atoms())
            .filter(|&a| op.atom_eu()[a].norm() > tol::SUPPORT)
            .map(relation),
        tol,
    );
    (suff, nec)
}

/// Weak hyponormality: `|T̂| ≥ |T| ≥ |T̂*|` with the Aluthge transform `T̂`
/// taken from the dense oracle. The criterion `|E(uw)| = E(|u|²) (E|w|²)^{1/2}`
/// is tested on `S` (sufficient) and on `supp E(u)` (necessary).
///
/// Two extra checks are recorded as findings: whether the reading
/// `|T| = |T̂|` agrees with the inequalities, and whether the closed
/// expression `|E(uw)| χ_S E(|u|²)^{-3/2} ū E(u ·)` matches `|T̂|` and `|T̂*|`.
pub fn is_weakly_hyponormal(op: &WeightedCondOp, tol: f64) -> Result<ClassOutcome> {
    let space = op.space();
    let d = Dense::new(op)?;
    let abs_t = oracle::polar(&d.t, space, tol::RANK)?.abs;
    let hat = oracle::aluthge(&d.t, space)?;
    let abs_hat = oracle::polar(&hat, space, tol::RANK)?.abs;
    let hat_adj = oracle::weighted_adjoint(&hat, space)?;
    let abs_hat_adj = oracle::polar(&hat_adj, space, tol::RANK)?.abs;

    let upper = oracle::psd_margin(&(&abs_hat - &abs_t), space)?;
    let lower = oracle::psd_margin(&(&abs_t - &abs_hat_adj), space)?;
    let oracle = upper.is_psd_scaled(tol, d.norm) && lower.is_psd_scaled(tol, d.norm);
    let oracle_margin = upper.min_eigenvalue.min(lower.min_eigenvalue);

    let mut findings = Vec::new();
    let eq_gap = oracle::op_norm(&(&abs_t - &abs_hat), space)?;
    let eq_reading = tol::close(eq_gap, d.norm, tol);
    if eq_reading != oracle {
        findings.push(Finding::new(
            FindingKind::Discrepancy,
            "weak_hyponormal_readings",
            format!(
                "|T| = |T^| reads {eq_reading}, the inequalities |T^| >= |T| >= |T^*| read {oracle}"
            ),
            eq_gap,
        ));
    }
    for (exponent, check) in [
        (-1.5, "aluthge_modulus_identity"),
        (-1.0, "aluthge_modulus_identity_unit_power"),
    ] {
        let coef: Vec<f64> = (0..op.num_atoms())
            .map(|a| {
                if op.atom_in_s(a) {
                    op.atom_euw()[a].norm() * op.atom_eu2()[a].powf(exponent)
                } else {
                    0.0
                }
            })
            .collect();
        let left: Vec<Complex64> = op
            .u()
            .values()
            .iter()
            .enumerate()
            .map(|(i, z)| z.conj() * coef[op.partition().atom_of(i)])
            .collect();
        let m = op.block_matrix(&left, op.u().values());
        let scale = oracle::op_norm(&abs_hat, space)?;
        let err = oracle::op_norm(&(&m - &abs_hat), space)?
            .max(oracle::op_norm(&(&m - &abs_hat_adj), space)?);
        if !tol::close(err, scale, tol) {
            findings.push(Finding::new(
                FindingKind::Discrepancy,
                check,
                format!(
                    "|E(uw)| chi_S E(|u|^2)^({exponent}) u* E(u .) differs from |T^| and |T^*|"
                ),
                err,
            ));
        }
    }

    let (suff, nec) = weak_criteria(op, tol);
    let class = ClassName::WeaklyHyponormal;
    Ok(ClassOutcome {
        verdicts: vec![
            verdict(
                class,
                CriterionKind::Sufficient,
                oracle,
                oracle_margin,
                suff,
            ),
            verdict(class, CriterionKind::Necessary, oracle, oracle_margin, nec),
        ],
        findings,
    })
}

fn normaloid_criterion(op: &WeightedCondOp, tol: f64) -> Criterion {
    let (mut lhs, mut rhs, mut at) = (0.0f64, 0.0f64, 0);
    for a in 0..op.num_atoms() {
        lhs = lhs.max(op.atom_euw()[a].norm());
        let (su, sw) = sqrt_stats(op, a);
        if su * sw > rhs {
            rhs = su * sw;
            at = a;
        }
    }
    judge([equal(at, lhs, rhs)], tol)
}

/// Normaloid: oracle `‖Tⁿ‖ = ‖T‖ⁿ` for `n = 1..=max_power` (relative
/// tolerance `n · tol`, on `T / ‖T‖`); criterion
/// `‖E(uw)‖_∞ = ‖(E|u|²)^{1/2} (E|w|²)^{1/2}‖_∞`.
pub fn is_normaloid(op: &WeightedCondOp, max_power: usize, tol: f64) -> Result<ClassOutcome> {
    if max_power < 2 {
        return Err(Error::InvalidPowerCount(max_power));
    }
    let space = op.space();
    let d = Dense::new(op)?;
    let mut deviation: f64 = 0.0;
    let mut oracle = true;
    if d.norm > 0.0 {
        let unit = d.t.scale(Complex64::new(1.0 / d.norm, 0.0));
        let mut power = unit.clone();
        for k in 1..=max_power {
            if k > 1 {
                power = &power * &unit;
            }
            let dev = (oracle::op_norm(&power, space)? - 1.0).abs();
            deviation = deviation.max(dev);
            oracle &= dev <= tol * k as f64;
        }
    }

    let mut findings = Vec::new();
    let radius = oracle::eigenvalues(&d.t)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if radius > d.norm * (1.0 + tol) + tol {
        findings.push(Finding::new(
            FindingKind::Violation,
            "radius_le_norm",
            format!("spectral radius {radius} exceeds the norm {}", d.norm),
            radius - d.norm,
        ));
    }

    let crit = normaloid_criterion(op, tol);
    Ok(ClassOutcome {
        verdicts: vec![verdict(
            ClassName::Normaloid,
            CriterionKind::Equivalent,
            oracle,
            deviation,
            crit,
        )],
        findings,
    })
}

/// A pointwise criterion evaluated without any oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionRecord {
    pub class: ClassName,
    pub kind: CriterionKind,
    pub criterion: CriterionVerdict,
    pub margin: f64,
    pub witnesses: Vec<Witness>,
}

/// Every criterion from atom statistics alone, for operators too large for
/// the dense oracles. p-dependent criteria do not depend on `p` and are
/// reported once per class.
pub fn criteria_only(op: &WeightedCondOp, tol: f64) -> Vec<CriterionRecord> {
    let rec = |class, kind, c: Criterion| CriterionRecord {
        class,
        kind,
        criterion: c.verdict,
        margin: c.margin,
        witnesses: c.witnesses,
    };
    let (ns, nn) = normal_criteria(op, tol);
    let (hs, hn) = hyponormal_criteria(op, tol);
    let (qs, qn, qe) = quasi_criteria(op, tol);
    let (ws, wn) = weak_criteria(op, tol);
    use CriterionKind::*;
    vec![
        rec(ClassName::Normal, Sufficient, ns),
        rec(ClassName::Normal, Necessary, nn),
        rec(ClassName::Hyponormal, Sufficient, hs),
        rec(ClassName::Hyponormal, Necessary, hn),
        rec(ClassName::PQuasihyponormal(1.0), Sufficient, qs),
        rec(ClassName::PQuasihyponormal(1.0), Necessary, qn),
        rec(ClassName::PQuasihyponormal(1.0), Equivalent, qe),
        rec(ClassName::WeaklyHyponormal, Sufficient, ws),
        rec(ClassName::WeaklyHyponormal, Necessary, wn),
        rec(
            ClassName::Normaloid,
            Equivalent,
            normaloid_criterion(op, tol),
        ),
    ]
}

fn failure(check: &'static str, e: Error) -> Finding {
    Finding::new(FindingKind::Failure, check, format!("{e}"), f64::NAN)
}

/// Runs every class test and the report-level consistency checks.
/// Numerical failures inside a class test become `Failure` findings.
pub fn classify_all(op: &WeightedCondOp, config: &ClassifyConfig) -> Result<ClassificationReport> {
    config.validate()?;
    let tol = config.tol;
    let mut out = ClassOutcome::default();
    let mut collect = |check: &'static str, r: Result<ClassOutcome>| match r {
        Ok(o) => out.extend(o),
        Err(e) => out.findings.push(failure(check, e)),
    };
    collect("normal", is_normal(op, tol));
    collect("hyponormal", is_hyponormal_family(op, &config.p_grid, tol));
    for &p in &config.p_grid {
        collect("p_quasihyponormal", is_p_quasihyponormal(op, p, tol));
    }
    collect("weakly_hyponormal", is_weakly_hyponormal(op, tol));
    collect("normaloid", is_normaloid(op, config.max_power, tol));

    let mut report = ClassificationReport {
        fingerprint: op.fingerprint(),
        config: config.clone(),
        verdicts: out.verdicts,
        findings: out.findings,
        notes: vec![SUPPORT_READING_NOTE],
    };
    let chain = chain_findings(&report);
    report.findings.extend(chain);
    Ok(report)
}

fn chain_findings(report: &ClassificationReport) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut violation = |check: &'static str, detail: String| {
        out.push(Finding::new(FindingKind::Violation, check, detail, 0.0))
    };

    let hypo = report.oracle(ClassName::Hyponormal);
    for p in &report.config.p_grid {
        let ph = report.oracle(ClassName::PHyponormal(*p));
        if ph.is_some() && hypo.is_some() && ph != hypo {
            violation(
                "p_hyponormal_constant",
                format!("p-hyponormality at p={p} reads {ph:?}, hyponormality reads {hypo:?}"),
            );
        }
    }

    let normal = report.oracle(ClassName::Normal);
    if normal == Some(true) {
        if hypo == Some(false) {
            violation(
                "normal_implies_hyponormal",
                "normal but not hyponormal".into(),
            );
        }
        if report.oracle(ClassName::Normaloid) == Some(false) {
            violation(
                "normal_implies_normaloid",
                "normal but not normaloid".into(),
            );
        }
    }
    if hypo == Some(true) && report.oracle(ClassName::Normaloid) == Some(false) {
        violation(
            "hyponormal_implies_normaloid",
            "hyponormal but not normaloid".into(),
        );
    }
    if hypo == Some(true) {
        for p in &report.config.p_grid {
            if report.oracle(ClassName::PQuasihyponormal(*p)) == Some(false) {
                violation(
                    "hyponormal_implies_quasihyponormal",
                    format!("hyponormal but not p-quasihyponormal at p={p}"),
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{FiniteMeasureSpace, MeasurableFn, Partition};

    fn w1_parts() -> (FiniteMeasureSpace, Partition) {
        (
            FiniteMeasureSpace::uniform(4).unwrap(),
            Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap(),
        )
    }

    fn op(u: &[f64], w: &[f64]) -> WeightedCondOp {
        let (s, p) = w1_parts();
        WeightedCondOp::new(s, p, MeasurableFn::from_real(u), MeasurableFn::from_real(w)).unwrap()
    }

    fn w1() -> WeightedCondOp {
        op(&[1.0, 1.0, 2.0, 2.0], &[1.0, 3.0, 1.0, 1.0])
    }

    fn find(o: &ClassOutcome, kind: CriterionKind) -> &ClassVerdict {
        o.verdicts.iter().find(|v| v.kind == kind).unwrap()
    }

    #[test]
    fn averaging_is_in_every_class() {
        let e = op(&[1.0; 4], &[1.0; 4]);
        let r = classify_all(&e, &ClassifyConfig::default()).unwrap();
        assert!(r.verdicts.iter().all(|v| v.oracle), "{:?}", r.verdicts);
        assert!(r.is_consistent(), "{:?}", r.findings);
        let normal = is_normal(&e, 1e-8).unwrap();
        assert_eq!(
            find(&normal, CriterionKind::Sufficient).criterion,
            CriterionVerdict::Holds
        );
        assert_eq!(
            find(&normal, CriterionKind::Necessary).criterion,
            CriterionVerdict::Holds
        );
    }

    #[test]
    fn expectation_times_measurable_is_normal() {
        let (s, p) = w1_parts();
        let t =
            WeightedCondOp::expectation_times(s, p, MeasurableFn::from_real(&[5.0, 5.0, 2.0, 2.0]))
                .unwrap();
        assert!(is_normal(&t, 1e-8).unwrap().verdicts[0].oracle);
    }

    #[test]
    fn expectation_times_non_measurable_is_not_normal() {
        let (s, p) = w1_parts();
        let t =
            WeightedCondOp::expectation_times(s, p, MeasurableFn::from_real(&[1.0, 2.0, 1.0, 2.0]))
                .unwrap();
        let n = is_normal(&t, 1e-8).unwrap();
        assert!(!n.verdicts[0].oracle);
        assert!(n.verdicts[0].oracle_margin > 1e-3);
        let h = is_hyponormal_family(&t, &[0.5, 2.0], 1e-8).unwrap();
        assert!(h.verdicts.iter().all(|v| !v.oracle));
    }

    #[test]
    fn w1_quasihyponormal_criterion_fails_on_first_atom() {
        let t = w1();
        let o = is_p_quasihyponormal(&t, 1.0, 1e-8).unwrap();
        let suff = find(&o, CriterionKind::Sufficient);
        assert_eq!(suff.criterion, CriterionVerdict::Fails);
        assert!(!suff.oracle);
        let w = &suff.witnesses[0];
        assert_eq!(w.atom, 0);
        assert!((w.lhs - 4.0).abs() < 1e-12 && (w.rhs - 5.0).abs() < 1e-12);
        let eq = find(&o, CriterionKind::Equivalent);
        assert_eq!(eq.criterion, CriterionVerdict::Fails);
        assert!(o.verdicts.iter().all(ClassVerdict::is_consistent));
    }

    #[test]
    fn proportional_weights_are_quasihyponormal() {
        let (s, p) = w1_parts();
        // u = c · w̄ atomwise
        let w = MeasurableFn::new(vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(2.0, -0.5),
            Complex64::new(-1.0, 0.3),
            Complex64::new(0.4, 0.4),
        ]);
        let coef = [Complex64::new(0.5, 2.0), Complex64::new(-1.5, 0.0)];
        let u = MeasurableFn::new((0..4).map(|i| w.values()[i].conj() * coef[i / 2]).collect());
        let t = WeightedCondOp::new(s, p, u, w).unwrap();
        for q in [0.5, 1.0, 2.0, 3.7] {
            let o = is_p_quasihyponormal(&t, q, 1e-8).unwrap();
            assert_eq!(
                find(&o, CriterionKind::Sufficient).criterion,
                CriterionVerdict::Holds
            );
            assert!(o.verdicts[0].oracle);
        }
    }

    #[test]
    fn weakly_hyponormal_examples() {
        let (s, p) = w1_parts();
        let t = WeightedCondOp::times_expectation(
            s.clone(),
            p.clone(),
            MeasurableFn::from_real(&[2.0, 2.0, 3.0, 3.0]),
        )
        .unwrap();
        let o = is_weakly_hyponormal(&t, 1e-8).unwrap();
        assert!(o
            .verdicts
            .iter()
            .all(|v| v.oracle && v.criterion == CriterionVerdict::Holds));

        let t =
            WeightedCondOp::expectation_times(s, p, MeasurableFn::from_real(&[1.0, 2.0, 1.0, 2.0]))
                .unwrap();
        let o = is_weakly_hyponormal(&t, 1e-8).unwrap();
        let suff = find(&o, CriterionKind::Sufficient);
        assert!(!suff.oracle);
        assert_eq!(suff.criterion, CriterionVerdict::Fails);
        assert!((suff.witnesses[0].lhs - 1.5).abs() < 1e-12);
        assert!((suff.witnesses[0].rhs - 2.5).abs() < 1e-12);
    }

    #[test]
    fn printed_aluthge_modulus_differs_when_mean_square_is_not_one() {
        // W1 has E(|u|²) = 4 on the second atom
        let o = is_weakly_hyponormal(&w1(), 1e-8).unwrap();
        assert!(o
            .findings
            .iter()
            .any(|f| f.check == "aluthge_modulus_identity"));
        assert!(!o
            .findings
            .iter()
            .any(|f| f.check == "aluthge_modulus_identity_unit_power"));
    }

    #[test]
    fn normaloid_examples() {
        let e = op(&[1.0; 4], &[1.0; 4]);
        let o = is_normaloid(&e, 8, 1e-8).unwrap();
        assert!(o.verdicts[0].oracle);
        assert_eq!(o.verdicts[0].criterion, CriterionVerdict::Holds);

        let o = is_normaloid(&w1(), 8, 1e-8).unwrap();
        let v = &o.verdicts[0];
        assert!(!v.oracle);
        assert_eq!(v.criterion, CriterionVerdict::Fails);
        assert!((v.witnesses[0].lhs - 2.0).abs() < 1e-12);
        assert!((v.witnesses[0].rhs - 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(
            is_normaloid(&w1(), 1, 1e-8).unwrap_err(),
            Error::InvalidPowerCount(1)
        );
    }

    #[test]
    fn w1_report() {
        let r = classify_all(&w1(), &ClassifyConfig::default()).unwrap();
        assert_eq!(r.oracle(ClassName::Normal), Some(false));
        assert_eq!(r.oracle(ClassName::Hyponormal), Some(false));
        assert_eq!(r.oracle(ClassName::Normaloid), Some(false));
        assert!(r.inconsistent_verdicts().next().is_none());
        assert!(r.violations().next().is_none(), "{:?}", r.findings);
        assert_eq!(r.notes, vec![SUPPORT_READING_NOTE]);
    }

    #[test]
    fn config_validation() {
        let mut c = ClassifyConfig::default();
        c.p_grid.clear();
        assert_eq!(
            classify_all(&w1(), &c).unwrap_err(),
            Error::EmptyExponentGrid
        );
        let c = ClassifyConfig {
            tol: 0.0,
            ..ClassifyConfig::default()
        };
        assert_eq!(
            classify_all(&w1(), &c).unwrap_err(),
            Error::InvalidTolerance(0.0)
        );
    }

    #[test]
    fn nonnegative_difference_criterion_is_not_sufficient() {
        // a = u (E|w|²)^{1/2} = (0, √2), b = (E|u|²)^{1/2} w̄ = (−1, 1):
        // a − b ≥ 0 pointwise, yet u and w̄ are not parallel on the atom.
        let space = FiniteMeasureSpace::uniform(2).unwrap();
        let part = Partition::trivial(2).unwrap();
        let u = MeasurableFn::from_real(&[0.0, 2f64.sqrt()]);
        let w = MeasurableFn::from_real(&[-1.0, 1.0]);
        let t = WeightedCondOp::new(space, part, u, w).unwrap();
        let o = is_hyponormal_family(&t, &[1.0], 1e-8).unwrap();
        let suff = find(&o, CriterionKind::Sufficient);
        assert_eq!(suff.criterion, CriterionVerdict::Holds);
        assert!(!suff.oracle);
        assert!(!suff.is_consistent());
    }
}
