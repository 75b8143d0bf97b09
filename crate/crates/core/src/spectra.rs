//! Spectra of `T = M_w E M_u`.
//!
//! On each atom `T` is rank one with eigenvector `w` and eigenvalue `E(uw)`,
//! so the nonzero spectrum is the set of nonzero atom values of `E(uw)`,
//! counted once per atom. Every spectral value of a matrix is isolated and an
//! eigenvalue, and the approximate point spectrum coincides with the
//! spectrum; both identifications are used as-is rather than searched for.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked, else from libm
use num_traits::Float;

use crate::classify;
use crate::condops::WeightedCondOp;
use crate::error::{Error, Result};
use crate::oracle::{self, ComplexMatrix};
use crate::space::{IndexSet, MeasurableFn};
use crate::tol;

pub const APPROXIMATE_POINT_NOTE: &str =
    "in finite dimension T - λ is bounded below iff injective, so the approximate point spectrum is the spectrum";

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    pub tol: f64,
    /// Number of iterated Aluthge transforms whose norms are reported.
    pub aluthge_depth: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            tol: tol::COMPARE,
            aluthge_depth: 5,
        }
    }
}

/// One value of the point spectrum with its level set `{E(uw) = λ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpectrumEntry {
    pub lambda: Complex64,
    /// Atoms on which `E(uw)` equals `lambda`; empty for a zero eigenvalue
    /// that comes only from the kernel inside atoms.
    pub atoms: Vec<usize>,
    pub mass: f64,
    /// `σ_min(T − λ)`; small when an eigenvector exists.
    pub residual: f64,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    /// Distinct atom values of `E(uw)`.
    pub ess_range: Vec<Complex64>,
    pub point_spectrum: Vec<PointSpectrumEntry>,
    pub joint_point_spectrum: Vec<Complex64>,
    /// `max |E(uw)|` over atoms.
    pub spectral_radius: f64,
    /// `max |λ|` over the computed eigenvalues.
    pub eigen_radius: f64,
    pub norm: f64,
    /// `‖Δ_n(T)‖` for `n = 1..=aluthge_depth`.
    pub aluthge_norms: Vec<f64>,
    /// Largest matched distance between nonzero eigenvalues and nonzero atom
    /// values; infinite when the counts differ.
    pub multiset_gap: f64,
    pub multiset_match: bool,
    /// Whether 0 was found in the spectrum when `T` must be singular.
    pub zero_in_spectrum: bool,
    pub must_be_singular: bool,
    /// `Some(equal)` when the weak-hyponormality condition holds and the
    /// equality `σ_jp \ {0} = σ_p \ {0}` was asserted.
    pub joint_equality: Option<bool>,
}

impl SpectrumReport {
    pub fn nonzero_point_spectrum(&self, tol: f64) -> impl Iterator<Item = &PointSpectrumEntry> {
        self.point_spectrum
            .iter()
            .filter(move |e| e.lambda.norm() > tol)
    }
}

fn zero_cut(norm: f64) -> f64 {
    tol::EIG_MATCH * (1.0 + norm)
}

fn same(a: Complex64, b: Complex64, t: f64) -> bool {
    tol::close((a - b).norm(), a.norm().max(b.norm()), t)
}

/// Greedy one-to-one matching of two multisets. Returns the largest matched
/// distance, or infinity when sizes differ or some element is unmatched.
pub fn match_multisets(a: &[Complex64], b: &[Complex64], t: f64) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, &y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((k, d)) if same(x, b[k], t) => {
                used[k] = true;
                worst = worst.max(d);
            }
            _ => return f64::INFINITY,
        }
    }
    worst
}

/// Distinct values up to `t` (first representative wins).
fn distinct(values: impl IntoIterator<Item = Complex64>, t: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for v in values {
        if !out.iter().any(|&o| same(o, v, t)) {
            out.push(v);
        }
    }
    out
}

/// Distinct atom values of `E(uw)`; atoms agree if they are within `tol`.
pub fn ess_range_euw(op: &WeightedCondOp, tol: f64) -> Vec<Complex64> {
    distinct(op.atom_euw().iter().copied(), tol)
}

/// `max |E(uw)|` over atoms.
pub fn spectral_radius(op: &WeightedCondOp) -> f64 {
    op.atom_euw().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn shifted(t: &ComplexMatrix, lambda: Complex64) -> ComplexMatrix {
    t - &ComplexMatrix::identity(t.rows()).scale(lambda)
}

/// Level sets of `E(uw)` grouped within `tol`, each checked for an
/// eigenvector of `T`. Zero is included when `T` has a kernel.
pub fn point_spectrum(op: &WeightedCondOp, tol: f64) -> Result<Vec<PointSpectrumEntry>> {
    let space = op.space();
    let part = op.partition();
    let t = op.assemble_matrix();
    let cut = zero_cut(oracle::op_norm(&t, space)?);
    let residual = |lambda: Complex64| -> Result<f64> {
        let sv = oracle::singular_values(&shifted(&t, lambda), space)?;
        Ok(sv.last().copied().unwrap_or(0.0))
    };

    let mut entries: Vec<PointSpectrumEntry> = Vec::new();
    for (a, &v) in op.atom_euw().iter().enumerate() {
        let lambda = if v.norm() <= tol {
            Complex64::new(0.0, 0.0)
        } else {
            v
        };
        match entries.iter_mut().find(|e| same(e.lambda, lambda, tol)) {
            Some(e) => e.atoms.push(a),
            None => entries.push(PointSpectrumEntry {
                lambda,
                atoms: vec![a],
                mass: 0.0,
                residual: 0.0,
                verified: false,
            }),
        }
    }
    if !entries.iter().any(|e| e.lambda.norm() == 0.0) {
        entries.push(PointSpectrumEntry {
            lambda: Complex64::new(0.0, 0.0),
            atoms: Vec::new(),
            mass: 0.0,
            residual: 0.0,
            verified: false,
        });
    }
    let mut out = Vec::with_capacity(entries.len());
    for mut e in entries {
        e.mass = e.atoms.iter().map(|&a| part.atom_mass(space, a)).sum();
        e.residual = residual(e.lambda)?;
        e.verified = e.residual <= cut;
        let keep = if e.lambda.norm() == 0.0 {
            e.verified
        } else {
            e.mass > 0.0
        };
        if keep {
            out.push(e);
        }
    }
    Ok(out)
}

/// Indicators of level sets are eigenvectors of `E M_{uw}`: returns the
/// largest residual `‖E(uw χ_B) − λ χ_B‖` over the entries.
pub fn level_set_residual(op: &WeightedCondOp, entries: &[PointSpectrumEntry]) -> Result<f64> {
    let uw = op.u().mul(op.w())?;
    let e = WeightedCondOp::expectation_times(op.space().clone(), op.partition().clone(), uw)?;
    let n = op.len();
    let mut worst: f64 = 0.0;
    for entry in entries.iter().filter(|e| !e.atoms.is_empty()) {
        let points: IndexSet = entry
            .atoms
            .iter()
            .flat_map(|&a| op.partition().atom(a).iter().copied())
            .collect();
        let chi = MeasurableFn::indicator(n, &points);
        let image = e.apply(&chi)?;
        let expected = chi.map(|z| z * entry.lambda);
        worst = worst.max(image.max_abs_diff(&expected));
    }
    Ok(worst)
}

/// Eigenvalues `λ` of `T` admitting `x ≠ 0` with `Tx = λx` and `T*x = λ̄x`,
/// detected by the smallest singular value of `[T − λ; T* − λ̄]`.
pub fn joint_point_spectrum(op: &WeightedCondOp, tol: f64) -> Result<Vec<Complex64>> {
    let space = op.space();
    let t = op.assemble_matrix();
    let t_adj = oracle::weighted_adjoint(&t, space)?;
    let cut = zero_cut(oracle::op_norm(&t, space)?);
    let mut out = Vec::new();
    for lambda in candidates(op, &t, tol)? {
        let s = oracle::stacked_min_singular_value(
            &shifted(&t, lambda),
            &shifted(&t_adj, lambda.conj()),
            space,
        )?;
        if s <= cut {
            out.push(lambda);
        }
    }
    Ok(out)
}

/// Distinct eigenvalues, with near-zero ones snapped to 0 and nonzero ones
/// snapped to the matching atom value of `E(uw)` when there is one.
fn candidates(op: &WeightedCondOp, t: &ComplexMatrix, tol: f64) -> Result<Vec<Complex64>> {
    let cut = zero_cut(oracle::op_norm(t, op.space())?);
    let atoms = op.atom_euw();
    let snapped = oracle::eigenvalues(t)?.into_iter().map(|z| {
        if z.norm() <= cut {
            Complex64::new(0.0, 0.0)
        } else {
            atoms
                .iter()
                .copied()
                .find(|&v| same(v, z, tol::EIG_MATCH))
                .unwrap_or(z)
        }
    });
    Ok(distinct(snapped, tol))
}

/// `Δ_n(T)`: the dense Aluthge transform applied `n` times.
pub fn iterated_aluthge(op: &WeightedCondOp, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidPowerCount(0));
    }
    let mut m = op.assemble_matrix();
    for _ in 0..n {
        m = oracle::aluthge(&m, op.space())?;
    }
    Ok(m)
}

/// `‖Δ_n(T) − T̂‖` for `n = 1..=depth`, with `T̂` the closed form.
pub fn aluthge_drift(op: &WeightedCondOp, depth: usize) -> Result<Vec<f64>> {
    let closed = op.aluthge_closed();
    let mut m = op.assemble_matrix();
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        m = oracle::aluthge(&m, op.space())?;
        out.push(oracle::op_norm(&(&m - &closed), op.space())?);
    }
    Ok(out)
}

pub fn spectrum(op: &WeightedCondOp, config: &SpectrumConfig) -> Result<SpectrumReport> {
    let tol = config.tol;
    let space = op.space();
    let t = op.assemble_matrix();
    let norm = oracle::op_norm(&t, space)?;
    let cut = zero_cut(norm);
    let eigenvalues = oracle::eigenvalues(&t)?;

    let nonzero_eigs: Vec<Complex64> = eigenvalues
        .iter()
        .copied()
        .filter(|z| z.norm() > cut)
        .collect();
    let nonzero_atoms: Vec<Complex64> = op
        .atom_euw()
        .iter()
        .copied()
        .filter(|z| z.norm() > cut)
        .collect();
    let multiset_gap = match_multisets(&nonzero_eigs, &nonzero_atoms, tol::EIG_MATCH);

    let must_be_singular = op.len() > op.num_atoms() || nonzero_atoms.len() < op.num_atoms();
    let zero_in_spectrum = eigenvalues.iter().any(|z| z.norm() <= cut);

    let point = point_spectrum(op, tol)?;
    let joint = joint_point_spectrum(op, tol)?;
    let joint_equality = if classify::weak_condition_holds(op, tol) {
        let p: Vec<Complex64> = point
            .iter()
            .map(|e| e.lambda)
            .filter(|z| z.norm() > tol)
            .collect();
        let j: Vec<Complex64> = joint.iter().copied().filter(|z| z.norm() > tol).collect();
        Some(match_multisets(&p, &j, tol::EIG_MATCH).is_finite())
    } else {
        None
    };

    let mut aluthge_norms = Vec::with_capacity(config.aluthge_depth);
    let mut m = t.clone();
    for _ in 0..config.aluthge_depth {
        m = oracle::aluthge(&m, space)?;
        aluthge_norms.push(oracle::op_norm(&m, space)?);
    }

    Ok(SpectrumReport {
        eigen_radius: eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max),
        eigenvalues,
        ess_range: ess_range_euw(op, tol),
        point_spectrum: point,
        joint_point_spectrum: joint,
        spectral_radius: spectral_radius(op),
        norm,
        aluthge_norms,
        multiset_match: multiset_gap.is_finite(),
        multiset_gap,
        zero_in_spectrum,
        must_be_singular,
        joint_equality,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointOutcome {
    pub weakly_hyponormal: bool,
    pub kernel_nested: bool,
    /// `‖T − T̂‖` with `T̂` from the dense oracle.
    pub distance: f64,
    /// The hypotheses held, so `T = T̂` was required.
    pub asserted: bool,
    pub fixed: bool,
}

impl FixedPointOutcome {
    pub fn passed(&self) -> bool {
        !self.asserted || self.fixed
    }
}

/// A weakly hyponormal `T` with `ker T ⊆ ker T*` equals its Aluthge
/// transform. Without the hypotheses the distance is reported only.
pub fn aluthge_fixed_point_check(op: &WeightedCondOp, tol: f64) -> Result<FixedPointOutcome> {
    let space = op.space();
    let weak = classify::is_weakly_hyponormal(op, tol)?;
    let weakly_hyponormal = weak.verdicts.first().map(|v| v.oracle).unwrap_or(false);
    let t = op.assemble_matrix();
    let t_adj = oracle::weighted_adjoint(&t, space)?;
    let kernel_nested = oracle::kernel_subset(&t, &t_adj, space, tol)?;
    let hat = oracle::aluthge(&t, space)?;
    let distance = oracle::op_norm(&(&t - &hat), space)?;
    let norm = oracle::op_norm(&t, space)?;
    Ok(FixedPointOutcome {
        weakly_hyponormal,
        kernel_nested,
        distance,
        asserted: weakly_hyponormal && kernel_nested,
        fixed: tol::close(distance, norm, tol),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolatedPointOutcome {
    pub condition_holds: bool,
    /// Distinct nonzero eigenvalues; all are isolated.
    pub spectrum_nonzero: Vec<Complex64>,
    pub ess_range_nonzero: Vec<Complex64>,
    /// Every nonzero spectral value has an eigenvector.
    pub isolated_in_point_spectrum: bool,
    /// `σ_ap \ {0} = σ \ {0} = ess range E(uw) \ {0}` as sets.
    pub sets_agree: bool,
    /// `σ(T*)` is the conjugate of `σ(T)` as a multiset.
    pub adjoint_conjugate: bool,
}

impl IsolatedPointOutcome {
    pub fn passed(&self) -> bool {
        !self.condition_holds || (self.isolated_in_point_spectrum && self.sets_agree)
    }
}

fn same_sets(a: &[Complex64], b: &[Complex64], t: f64) -> bool {
    a.iter().all(|&x| b.iter().any(|&y| same(x, y, t)))
        && b.iter().all(|&y| a.iter().any(|&x| same(x, y, t)))
}

pub fn isolated_point_check(op: &WeightedCondOp, tol: f64) -> Result<IsolatedPointOutcome> {
    let space = op.space();
    let t = op.assemble_matrix();
    let norm = oracle::op_norm(&t, space)?;
    let cut = zero_cut(norm);
    let eigs = oracle::eigenvalues(&t)?;
    let spectrum_nonzero = distinct(
        eigs.iter().copied().filter(|z| z.norm() > cut),
        tol::EIG_MATCH,
    );
    let ess_range_nonzero: Vec<Complex64> = ess_range_euw(op, tol)
        .into_iter()
        .filter(|z| z.norm() > cut)
        .collect();
    let mut isolated_in_point_spectrum = true;
    for &lambda in &spectrum_nonzero {
        let sv = oracle::singular_values(&shifted(&t, lambda), space)?;
        isolated_in_point_spectrum &= sv.last().copied().unwrap_or(0.0) <= cut;
    }
    let adj_eigs = oracle::eigenvalues(&oracle::weighted_adjoint(&t, space)?)?;
    let conj: Vec<Complex64> = adj_eigs.iter().map(|z| z.conj()).collect();
    let big = |v: &[Complex64]| -> Vec<Complex64> {
        v.iter().copied().filter(|z| z.norm() > cut).collect()
    };
    Ok(IsolatedPointOutcome {
        condition_holds: classify::weak_condition_holds(op, tol),
        sets_agree: same_sets(&spectrum_nonzero, &ess_range_nonzero, tol::EIG_MATCH),
        adjoint_conjugate: match_multisets(&big(&eigs), &big(&conj), tol::EIG_MATCH).is_finite(),
        spectrum_nonzero,
        ess_range_nonzero,
        isolated_in_point_spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{FiniteMeasureSpace, Partition};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn op(u: &[f64], w: &[f64]) -> WeightedCondOp {
        let space = FiniteMeasureSpace::uniform(4).unwrap();
        let part = Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        WeightedCondOp::new(
            space,
            part,
            MeasurableFn::from_real(u),
            MeasurableFn::from_real(w),
        )
        .unwrap()
    }

    fn w1() -> WeightedCondOp {
        op(&[1.0, 1.0, 2.0, 2.0], &[1.0, 3.0, 1.0, 1.0])
    }

    fn m_w_e() -> WeightedCondOp {
        op(&[1.0; 4], &[2.0, 2.0, 3.0, 3.0])
    }

    #[test]
    fn averaging_spectrum() {
        let r = spectrum(&op(&[1.0; 4], &[1.0; 4]), &SpectrumConfig::default()).unwrap();
        let mut mods: Vec<f64> = r.eigenvalues.iter().map(|z| z.norm()).collect();
        mods.sort_by(f64::total_cmp);
        assert!(mods[0] < 1e-12 && mods[1] < 1e-12);
        assert!((mods[2] - 1.0).abs() < 1e-12 && (mods[3] - 1.0).abs() < 1e-12);
        assert_eq!(r.ess_range, vec![c(1.0)]);
        assert!(r.multiset_match && r.zero_in_spectrum && r.must_be_singular);
        assert_eq!(r.point_spectrum.len(), 2);
        assert_eq!(r.point_spectrum[0].atoms, vec![0, 1]);
        assert!(r.point_spectrum.iter().all(|e| e.verified));
        assert_eq!(r.joint_equality, Some(true));
        assert!((r.spectral_radius - 1.0).abs() < 1e-15);
    }

    #[test]
    fn w1_spectrum() {
        let r = spectrum(&w1(), &SpectrumConfig::default()).unwrap();
        let nonzero: Vec<_> = r.eigenvalues.iter().filter(|z| z.norm() > 1e-6).collect();
        assert_eq!(nonzero.len(), 2);
        assert!(nonzero.iter().all(|z| (**z - c(2.0)).norm() < 1e-10));
        assert_eq!(r.point_spectrum[0].atoms, vec![0, 1]);
        assert!((r.point_spectrum[0].mass - 1.0).abs() < 1e-15);
        assert!((r.spectral_radius - 2.0).abs() < 1e-15);
        assert!((r.norm - 5f64.sqrt()).abs() < 1e-10);
        assert_eq!(r.joint_equality, None);
        for n in &r.aluthge_norms {
            assert!((n - 2.0).abs() < 1e-7, "{n}");
        }
    }

    #[test]
    fn vanishing_atom() {
        let t = op(&[1.0, 1.0, 0.0, 0.0], &[1.0; 4]);
        let r = spectrum(&t, &SpectrumConfig::default()).unwrap();
        assert_eq!(r.ess_range, vec![c(1.0), c(0.0)]);
        assert!(r.multiset_match);
        let p = &r.point_spectrum;
        assert_eq!(
            p.iter().find(|e| e.lambda.norm() == 0.0).unwrap().atoms,
            vec![1]
        );
    }

    #[test]
    fn distinct_atom_values() {
        // E(uw) = (2, 5)
        let t = op(&[1.0, 1.0, 1.0, 1.0], &[1.0, 3.0, 5.0, 5.0]);
        let p = point_spectrum(&t, 1e-8).unwrap();
        let nonzero: Vec<_> = p.iter().filter(|e| e.lambda.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 2);
        assert!(nonzero.iter().all(|e| e.verified));
        assert!(level_set_residual(&t, &p).unwrap() < 1e-14);
    }

    #[test]
    fn joint_spectrum_of_m_w_e() {
        let j = joint_point_spectrum(&m_w_e(), 1e-8).unwrap();
        let mut nz: Vec<f64> = j.iter().filter(|z| z.norm() > 1e-8).map(|z| z.re).collect();
        nz.sort_by(f64::total_cmp);
        assert_eq!(nz.len(), 2);
        assert!((nz[0] - 2.0).abs() < 1e-10 && (nz[1] - 3.0).abs() < 1e-10);
        let r = spectrum(&m_w_e(), &SpectrumConfig::default()).unwrap();
        assert_eq!(r.joint_equality, Some(true));
    }

    #[test]
    fn w1_joint_spectrum_is_smaller() {
        // Tx = 2x and T*x = 2x share no eigenvector on the first atom.
        let j = joint_point_spectrum(&w1(), 1e-8).unwrap();
        assert!(j
            .iter()
            .all(|z| z.norm() < 1e-8 || (*z - c(2.0)).norm() < 1e-8));
        assert!(!w1_first_atom_is_joint());
    }

    fn w1_first_atom_is_joint() -> bool {
        let t = w1();
        let m = t.assemble_matrix();
        let a = oracle::weighted_adjoint(&m, t.space()).unwrap();
        let x = [c(1.0), c(3.0), c(0.0), c(0.0)];
        let tx = m.apply(&x).unwrap();
        let ax = a.apply(&x).unwrap();
        (0..4).all(|i| (tx[i] - x[i] * 2.0).norm() < 1e-9 && (ax[i] - x[i] * 2.0).norm() < 1e-9)
    }

    #[test]
    fn iterated_aluthge_is_stable() {
        let t = w1();
        let drift = aluthge_drift(&t, 3).unwrap();
        for (k, d) in drift.iter().enumerate() {
            assert!(*d <= 1e-8 * (k + 1) as f64, "n={} drift {d}", k + 1);
        }
        let d1 = iterated_aluthge(&t, 1).unwrap();
        let closed = t.aluthge_closed();
        assert!(oracle::op_norm(&(&d1 - &closed), t.space()).unwrap() < 1e-9);
        assert_eq!(
            iterated_aluthge(&t, 0).unwrap_err(),
            Error::InvalidPowerCount(0)
        );
    }

    #[test]
    fn fixed_points() {
        let e = aluthge_fixed_point_check(&op(&[1.0; 4], &[1.0; 4]), 1e-8).unwrap();
        assert!(e.asserted && e.fixed);
        let m = aluthge_fixed_point_check(&m_w_e(), 1e-8).unwrap();
        assert!(m.weakly_hyponormal && m.kernel_nested && m.fixed);
        let w = aluthge_fixed_point_check(&w1(), 1e-8).unwrap();
        assert!(!w.weakly_hyponormal && !w.asserted && !w.fixed);
        assert!(w.passed());
    }

    #[test]
    fn isolated_points() {
        let o = isolated_point_check(&m_w_e(), 1e-8).unwrap();
        assert!(o.condition_holds && o.passed() && o.adjoint_conjugate);
        assert_eq!(o.spectrum_nonzero.len(), 2);
        let z = isolated_point_check(&op(&[1.0, 1.0, 0.0, 0.0], &[1.0; 4]), 1e-8).unwrap();
        assert!(z.sets_agree);
        assert_eq!(z.ess_range_nonzero, vec![c(1.0)]);
    }

    #[test]
    fn multiset_matching() {
        let a = [c(1.0), c(1.0), c(2.0)];
        assert_eq!(match_multisets(&a, &[c(2.0), c(1.0), c(1.0)], 1e-7), 0.0);
        assert!(match_multisets(&a, &[c(2.0), c(2.0), c(1.0)], 1e-7).is_infinite());
        assert!(match_multisets(&a, &[c(1.0), c(2.0)], 1e-7).is_infinite());
    }
}
