//! The weighted conditional type operator `T = M_w E M_u`, acting as
//! `f ↦ w · E(u f)`, together with its closed-form norm, self-product powers,
//! polar factors and Aluthge transform.
//!
//! Every closed form here is of the shape `M_a E M_b` for per-point
//! coefficients `a` and `b`, which makes them cheap to assemble and easy to
//! compare against the dense oracle.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked, else from libm
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::oracle::ComplexMatrix;
use crate::space::{atom_means, FiniteMeasureSpace, IndexSet, MeasurableFn, Partition};
use crate::tol;

/// Which self-product a power refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(T*T)^p`
    Left,
    /// `(TT*)^p`
    Right,
}

/// Closed-form polar factors `T = U |T|`.
#[derive(Debug, Clone)]
pub struct ClosedPolar {
    pub abs: ComplexMatrix,
    pub isometry: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct WeightedCondOp {
    space: FiniteMeasureSpace,
    part: Partition,
    u: MeasurableFn,
    w: MeasurableFn,
    // per-atom conditional statistics
    eu2: Vec<f64>,
    ew2: Vec<f64>,
    euw: Vec<Complex64>,
    eu: Vec<Complex64>,
    ew: Vec<Complex64>,
    in_s: Vec<bool>,
    in_g: Vec<bool>,
}

impl WeightedCondOp {
    pub fn new(
        space: FiniteMeasureSpace,
        part: Partition,
        u: MeasurableFn,
        w: MeasurableFn,
    ) -> Result<Self> {
        for f in [&u, &w] {
            if f.len() != space.len() {
                return Err(Error::ShapeMismatch {
                    expected: space.len(),
                    found: f.len(),
                });
            }
        }
        let real = |v: Vec<Complex64>| -> Vec<f64> { v.into_iter().map(|z| z.re).collect() };
        let eu2 = real(atom_means(&space, &part, u.abs_sq().values())?);
        let ew2 = real(atom_means(&space, &part, w.abs_sq().values())?);
        let euw = atom_means(&space, &part, u.mul(&w)?.values())?;
        let eu = atom_means(&space, &part, u.values())?;
        let ew = atom_means(&space, &part, w.values())?;
        let in_s = eu2.iter().map(|&v| v > tol::SUPPORT).collect();
        let in_g = ew2.iter().map(|&v| v > tol::SUPPORT).collect();
        Ok(Self {
            space,
            part,
            u,
            w,
            eu2,
            ew2,
            euw,
            eu,
            ew,
            in_s,
            in_g,
        })
    }

    /// `E M_u`.
    pub fn expectation_times(
        space: FiniteMeasureSpace,
        part: Partition,
        u: MeasurableFn,
    ) -> Result<Self> {
        let n = space.len();
        Self::new(
            space,
            part,
            u,
            MeasurableFn::constant(n, Complex64::new(1.0, 0.0)),
        )
    }

    /// `M_w E`.
    pub fn times_expectation(
        space: FiniteMeasureSpace,
        part: Partition,
        w: MeasurableFn,
    ) -> Result<Self> {
        let n = space.len();
        Self::new(
            space,
            part,
            MeasurableFn::constant(n, Complex64::new(1.0, 0.0)),
            w,
        )
    }

    /// `T* = M_ū E M_w̄`, again of weighted conditional type.
    pub fn adjoint(&self) -> Self {
        Self::new(
            self.space.clone(),
            self.part.clone(),
            self.w.conj(),
            self.u.conj(),
        )
        .expect("shapes already validated")
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn partition(&self) -> &Partition {
        &self.part
    }

    pub fn u(&self) -> &MeasurableFn {
        &self.u
    }

    pub fn w(&self) -> &MeasurableFn {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn num_atoms(&self) -> usize {
        self.part.num_atoms()
    }

    /// `E(|u|²)` per atom.
    pub fn atom_eu2(&self) -> &[f64] {
        &self.eu2
    }

    /// `E(|w|²)` per atom.
    pub fn atom_ew2(&self) -> &[f64] {
        &self.ew2
    }

    /// `E(uw)` per atom.
    pub fn atom_euw(&self) -> &[Complex64] {
        &self.euw
    }

    /// `E(u)` per atom.
    pub fn atom_eu(&self) -> &[Complex64] {
        &self.eu
    }

    /// `E(w)` per atom.
    pub fn atom_ew(&self) -> &[Complex64] {
        &self.ew
    }

    /// Whether atom `a` lies in `S = S(E(|u|²))`.
    pub fn atom_in_s(&self, a: usize) -> bool {
        self.in_s[a]
    }

    /// Whether atom `a` lies in `G = S(E(|w|²))`.
    pub fn atom_in_g(&self, a: usize) -> bool {
        self.in_g[a]
    }

    pub fn eu2(&self) -> MeasurableFn {
        self.part.expand(
            &self
                .eu2
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    pub fn ew2(&self) -> MeasurableFn {
        self.part.expand(
            &self
                .ew2
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    pub fn euw(&self) -> MeasurableFn {
        self.part.expand(&self.euw)
    }

    pub fn s(&self) -> IndexSet {
        self.points_where(&self.in_s)
    }

    pub fn g(&self) -> IndexSet {
        self.points_where(&self.in_g)
    }

    fn points_where(&self, atoms: &[bool]) -> IndexSet {
        (0..self.len())
            .filter(|&i| atoms[self.part.atom_of(i)])
            .collect()
    }

    pub fn apply(&self, f: &MeasurableFn) -> Result<MeasurableFn> {
        if f.len() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        let e = atom_means(&self.space, &self.part, self.u.mul(f)?.values())?;
        Ok(MeasurableFn::new(
            self.w
                .values()
                .iter()
                .enumerate()
                .map(|(i, &wi)| wi * e[self.part.atom_of(i)])
                .collect(),
        ))
    }

    /// Matrix of `M_left E M_right`: entry `(i, j)` is
    /// `left(i) right(j) μ(j) / μ(B)` when `i, j` share the atom `B`.
    pub fn block_matrix(&self, left: &[Complex64], right: &[Complex64]) -> ComplexMatrix {
        let n = self.len();
        let mass = self.space.mass();
        let atom_mass: Vec<f64> = (0..self.num_atoms())
            .map(|a| self.part.atom_mass(&self.space, a))
            .collect();
        let mut m = ComplexMatrix::zeros(n, n).to_row_major();
        for atom in self.part.atoms() {
            let am = atom_mass[self.part.atom_of(atom[0])];
            for &i in atom {
                for &j in atom {
                    m[i * n + j] = left[i] * right[j] * (mass[j] / am);
                }
            }
        }
        ComplexMatrix::from_row_major(n, n, m).expect("n×n entries")
    }

    /// Matrix of `T`; column `j` is `T` applied to the indicator of point `j`.
    pub fn assemble_matrix(&self) -> ComplexMatrix {
        self.block_matrix(self.w.values(), self.u.values())
    }

    /// `‖T‖ = max over atoms of (E|w|²)^{1/2} (E|u|²)^{1/2}`.
    pub fn norm_formula(&self) -> f64 {
        self.eu2
            .iter()
            .zip(&self.ew2)
            .map(|(a, b)| (a * b).sqrt())
            .fold(0.0, f64::max)
    }

    /// Per-point coefficient `ū (E|u|²)^{p-1} χ_S (E|w|²)^p` (left) or
    /// `w (E|w|²)^{p-1} χ_G (E|u|²)^p` (right). Off the support the
    /// coefficient is zero and the negative power is never evaluated.
    fn power_coefficient(&self, p: f64, side: Side) -> Vec<Complex64> {
        let (base, other, chi, weight) = match side {
            Side::Left => (&self.eu2, &self.ew2, &self.in_s, self.u.conj()),
            Side::Right => (&self.ew2, &self.eu2, &self.in_g, self.w.clone()),
        };
        let per_atom: Vec<f64> = (0..self.num_atoms())
            .map(|a| {
                if chi[a] {
                    base[a].powf(p - 1.0) * other[a].powf(p)
                } else {
                    0.0
                }
            })
            .collect();
        self.scale_by_atom(weight.values(), &per_atom)
    }

    fn scale_by_atom(&self, values: &[Complex64], per_atom: &[f64]) -> Vec<Complex64> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| v * per_atom[self.part.atom_of(i)])
            .collect()
    }

    /// `(T*T)^p = M_{ū (E|u|²)^{p-1} χ_S (E|w|²)^p} E M_u` and
    /// `(TT*)^p = M_{w (E|w|²)^{p-1} χ_G (E|u|²)^p} E M_w̄`.
    pub fn self_product_power_closed(&self, p: f64, side: Side) -> Result<ComplexMatrix> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidExponent(p));
        }
        let left = self.power_coefficient(p, side);
        let right = match side {
            Side::Left => self.u.clone(),
            Side::Right => self.w.conj(),
        };
        Ok(self.block_matrix(&left, right.values()))
    }

    /// `|T| f = (E|w|² / E|u|²)^{1/2} χ_S ū E(u f)` and
    /// `U f = (χ_{S∩G} / (E|w|² E|u|²))^{1/2} w E(u f)`.
    pub fn polar_closed(&self) -> ClosedPolar {
        let abs_coef: Vec<f64> = (0..self.num_atoms())
            .map(|a| {
                if self.in_s[a] {
                    (self.ew2[a] / self.eu2[a]).sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        let iso_coef: Vec<f64> = (0..self.num_atoms())
            .map(|a| {
                if self.in_s[a] && self.in_g[a] {
                    (self.ew2[a] * self.eu2[a]).sqrt().recip()
                } else {
                    0.0
                }
            })
            .collect();
        ClosedPolar {
            abs: self.block_matrix(
                &self.scale_by_atom(self.u.conj().values(), &abs_coef),
                self.u.values(),
            ),
            isometry: self.block_matrix(
                &self.scale_by_atom(self.w.values(), &iso_coef),
                self.u.values(),
            ),
        }
    }

    /// Coefficient `χ_S E(uw) / E(|u|²)` per atom.
    pub fn aluthge_coefficient(&self) -> Vec<Complex64> {
        (0..self.num_atoms())
            .map(|a| {
                if self.in_s[a] {
                    self.euw[a] / self.eu2[a]
                } else {
                    Complex64::zero()
                }
            })
            .collect()
    }

    /// `T̂ f = (χ_S E(uw) / E(|u|²)) ū E(u f)`.
    pub fn aluthge_closed(&self) -> ComplexMatrix {
        let coef = self.aluthge_coefficient();
        let left: Vec<Complex64> = self
            .u
            .values()
            .iter()
            .enumerate()
            .map(|(i, &ui)| ui.conj() * coef[self.part.atom_of(i)])
            .collect();
        self.block_matrix(&left, self.u.values())
    }

    /// FNV-1a hash of masses, atoms and weights; identifies an instance in
    /// reports.
    pub fn fingerprint(&self) -> u64 {
        const PRIME: u64 = 0x0100_0000_01b3;
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(PRIME);
            }
        };
        for &m in self.space.mass() {
            eat(m.to_bits());
        }
        for atom in self.part.atoms() {
            eat(u64::MAX);
            for &i in atom {
                eat(i as u64);
            }
        }
        for z in self.u.values().iter().chain(self.w.values()) {
            eat(z.re.to_bits());
            eat(z.im.to_bits());
        }
        h
    }

    /// The three factors `(M_w, E, M_u)` as separate matrices.
    pub fn factors(&self) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        let ones = alloc::vec![Complex64::new(1.0, 0.0); self.len()];
        (
            ComplexMatrix::diagonal(self.w.values()),
            self.block_matrix(&ones, &ones),
            ComplexMatrix::diagonal(self.u.values()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{self, op_norm, weighted_adjoint};
    use crate::space::cond_expect;
    use alloc::vec;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn w1_parts() -> (FiniteMeasureSpace, Partition) {
        (
            FiniteMeasureSpace::uniform(4).unwrap(),
            Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap(),
        )
    }

    fn op(u: &[f64], w: &[f64]) -> WeightedCondOp {
        let (space, part) = w1_parts();
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

    fn norm_diff(t: &WeightedCondOp, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        op_norm(&(a - b), t.space()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let e = op(&[1.0; 4], &[1.0; 4]);
        let f = MeasurableFn::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let (space, part) = w1_parts();
        assert_eq!(
            e.apply(&f).unwrap(),
            cond_expect(&space, &part, &f).unwrap()
        );
        let t = w1();
        assert_eq!(
            t.apply(&MeasurableFn::zeros(4)).unwrap(),
            MeasurableFn::zeros(4)
        );
        let got = t.apply(&MeasurableFn::from_real(&[1.0; 4])).unwrap();
        assert!(got.max_abs_diff(&MeasurableFn::from_real(&[1.0, 3.0, 2.0, 2.0])) < 1e-15);
        assert!(t.apply(&MeasurableFn::zeros(3)).is_err());
    }

    #[test]
    fn assembled_matrix_of_averaging() {
        let e = op(&[1.0; 4], &[1.0; 4]).assemble_matrix();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i / 2 == j / 2 { 0.5 } else { 0.0 };
                assert!((e.get(i, j) - c(want)).norm() < 1e-15);
            }
        }
        assert_eq!(w1().assemble_matrix().rank(), 2);
    }

    #[test]
    fn factorization_matches_product() {
        let t = w1();
        let (mw, e, mu) = t.factors();
        let prod = &(&mw * &e) * &mu;
        assert!((&prod - &t.assemble_matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn norm_examples() {
        assert!((op(&[1.0; 4], &[1.0; 4]).norm_formula() - 1.0).abs() < 1e-15);
        let t = w1();
        assert!((t.norm_formula() - 5f64.sqrt()).abs() < 1e-14);
        let oracle_norm = op_norm(&t.assemble_matrix(), t.space()).unwrap();
        assert!((oracle_norm - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn adjoint_is_weighted_type() {
        let space = FiniteMeasureSpace::new(vec![0.3, 0.9, 0.2, 0.5]).unwrap();
        let part = Partition::new(vec![vec![0, 2], vec![1, 3]], 4).unwrap();
        let u = MeasurableFn::new(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.1),
            Complex64::new(0.3, -1.0),
            Complex64::new(2.0, 0.0),
        ]);
        let w = MeasurableFn::new(vec![
            Complex64::new(0.0, 1.0),
            Complex64::new(1.5, 0.5),
            Complex64::new(-1.0, -1.0),
            Complex64::new(0.2, 0.7),
        ]);
        let t = WeightedCondOp::new(space, part, u, w).unwrap();
        let dense = weighted_adjoint(&t.assemble_matrix(), t.space()).unwrap();
        assert!((&dense - &t.adjoint().assemble_matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn power_at_one_is_gram() {
        let t = w1();
        let m = t.assemble_matrix();
        let adj = weighted_adjoint(&m, t.space()).unwrap();
        let left = t.self_product_power_closed(1.0, Side::Left).unwrap();
        assert!(norm_diff(&t, &left, &(&adj * &m)) < 1e-10);
        let right = t.self_product_power_closed(1.0, Side::Right).unwrap();
        assert!(norm_diff(&t, &right, &(&m * &adj)) < 1e-10);
        assert_eq!(
            t.self_product_power_closed(0.0, Side::Left).unwrap_err(),
            Error::InvalidExponent(0.0)
        );
    }

    #[test]
    fn half_power_matches_oracle() {
        let t = w1();
        let m = t.assemble_matrix();
        let gram = &weighted_adjoint(&m, t.space()).unwrap() * &m;
        let want = oracle::frac_power_psd(&gram, t.space(), 0.5).unwrap();
        let got = t.self_product_power_closed(0.5, Side::Left).unwrap();
        assert!(norm_diff(&t, &got, &want) < 1e-9);
    }

    #[test]
    fn vanishing_atom_gives_zero_block() {
        let t = op(&[1.0, 1.0, 0.0, 0.0], &[1.0, 3.0, 1.0, 1.0]);
        assert!(!t.atom_in_s(1));
        let m = t.assemble_matrix();
        let gram = &weighted_adjoint(&m, t.space()).unwrap() * &m;
        for p in [0.5, 1.0, 2.0, 3.7] {
            let closed = t.self_product_power_closed(p, Side::Left).unwrap();
            for i in 2..4 {
                for j in 2..4 {
                    assert_eq!(closed.get(i, j), Complex64::zero());
                }
            }
            let want = oracle::frac_power_psd(&gram, t.space(), p).unwrap();
            assert!(norm_diff(&t, &closed, &want) < 1e-9);
        }
    }

    #[test]
    fn polar_of_averaging_is_itself() {
        let t = op(&[1.0; 4], &[1.0; 4]);
        let pol = t.polar_closed();
        let e = t.assemble_matrix();
        assert!((&pol.abs - &e).max_abs() < 1e-15);
        assert!((&pol.isometry - &e).max_abs() < 1e-15);
    }

    #[test]
    fn polar_w1_matches_oracle() {
        let t = w1();
        let pol = t.polar_closed();
        let m = t.assemble_matrix();
        assert!(norm_diff(&t, &(&pol.isometry * &pol.abs), &m) <= 1e-10);
        let gram = &weighted_adjoint(&m, t.space()).unwrap() * &m;
        let root = oracle::frac_power_psd(&gram, t.space(), 0.5).unwrap();
        assert!(norm_diff(&t, &pol.abs, &root) <= 1e-10);
    }

    #[test]
    fn polar_isometry_vanishes_off_support() {
        let t = op(&[1.0, 1.0, 0.0, 0.0], &[1.0; 4]);
        let pol = t.polar_closed();
        for i in 0..4 {
            for j in 2..4 {
                assert_eq!(pol.isometry.get(i, j), Complex64::zero());
            }
        }
        let dense = oracle::polar(&t.assemble_matrix(), t.space(), tol::RANK).unwrap();
        assert!(norm_diff(&t, &pol.isometry, &dense.isometry) < 1e-10);
    }

    #[test]
    fn aluthge_examples() {
        let e = op(&[1.0; 4], &[1.0; 4]);
        assert!((&e.aluthge_closed() - &e.assemble_matrix()).max_abs() < 1e-15);
        let t = w1();
        let dense = oracle::aluthge(&t.assemble_matrix(), t.space()).unwrap();
        assert!(norm_diff(&t, &t.aluthge_closed(), &dense) <= 1e-9);
        // a second transform changes nothing
        let twice = oracle::aluthge(&dense, t.space()).unwrap();
        assert!(norm_diff(&t, &twice, &dense) <= 1e-9);
    }

    #[test]
    fn holder_guard_on_w1() {
        let t = w1();
        for a in 0..t.num_atoms() {
            assert!(t.atom_euw()[a].norm_sqr() <= t.atom_eu2()[a] * t.atom_ew2()[a] + 1e-12);
        }
    }
}
