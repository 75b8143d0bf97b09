//! Finite measure spaces, partitions standing in for σ-subalgebras, and the
//! conditional expectation onto a partition.
//!
//! A σ-subalgebra of a finite space with strictly positive masses is generated
//! by a partition of the points into atoms. Conditional expectation is then the
//! mass-weighted average over each atom:
//!
//! ```text
//! E(f)(x) = Σ_{y ∈ B} f(y) μ(y) / Σ_{y ∈ B} μ(y),    x ∈ B
//! ```

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked, else from libm
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasureSpace {
    mass: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl FiniteMeasureSpace {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::EmptySpace);
        }
        if let Some((index, &value)) = mass
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(Error::NonPositiveMass { index, value });
        }
        Ok(Self { mass, labels: None })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.mass.len() {
            return Err(Error::LabelCount {
                expected: self.mass.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// μ-weighted inner product `Σ f(x) conj(g(x)) μ(x)`.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        f.iter()
            .zip(g)
            .zip(&self.mass)
            .map(|((a, b), m)| a * b.conj() * *m)
            .sum()
    }
}

/// A partition of the points into nonempty disjoint atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    atoms: Vec<Vec<usize>>,
    atom_of: Vec<usize>,
}

impl Partition {
    /// Validates that `atoms` partitions `0..n`. Members of each atom are
    /// stored sorted; atom order is kept.
    pub fn new(atoms: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        const UNSET: usize = usize::MAX;
        let mut atom_of = vec![UNSET; n];
        let mut sorted = Vec::with_capacity(atoms.len());
        for (a, members) in atoms.into_iter().enumerate() {
            if members.is_empty() {
                return Err(Error::EmptyAtom { atom: a });
            }
            for &point in &members {
                if point >= n {
                    return Err(Error::PointOutOfRange { atom: a, point, n });
                }
                if atom_of[point] != UNSET {
                    return Err(Error::OverlappingAtoms { point });
                }
                atom_of[point] = a;
            }
            let mut members = members;
            members.sort_unstable();
            sorted.push(members);
        }
        if let Some(point) = atom_of.iter().position(|&a| a == UNSET) {
            return Err(Error::UncoveredPoint { point });
        }
        Ok(Self {
            atoms: sorted,
            atom_of,
        })
    }

    /// Builds a partition from an atom index per point. Atom indices must
    /// form a contiguous range `0..k`.
    pub fn from_assignment(assignment: &[usize]) -> Result<Self> {
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        let mut atoms = vec![Vec::new(); k];
        for (point, &a) in assignment.iter().enumerate() {
            atoms[a].push(point);
        }
        Self::new(atoms, assignment.len())
    }

    /// The trivial σ-algebra: one atom holding every point.
    pub fn trivial(n: usize) -> Result<Self> {
        Self::new(vec![(0..n).collect()], n)
    }

    /// The full σ-algebra: every point is its own atom.
    pub fn discrete(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| vec![i]).collect(), n)
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn atom(&self, a: usize) -> &[usize] {
        &self.atoms[a]
    }

    pub fn atom_of(&self, point: usize) -> usize {
        self.atom_of[point]
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_points(&self) -> usize {
        self.atom_of.len()
    }

    pub fn atom_mass(&self, space: &FiniteMeasureSpace, a: usize) -> f64 {
        self.atoms[a].iter().map(|&i| space.mass()[i]).sum()
    }

    /// Expands per-atom values into a function on points.
    pub fn expand(&self, per_atom: &[Complex64]) -> MeasurableFn {
        MeasurableFn::new(self.atom_of.iter().map(|&a| per_atom[a]).collect())
    }

    fn check(&self, space: &FiniteMeasureSpace) -> Result<()> {
        if space.len() != self.num_points() {
            return Err(Error::ShapeMismatch {
                expected: space.len(),
                found: self.num_points(),
            });
        }
        Ok(())
    }
}

/// A complex-valued function on the points of a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurableFn {
    values: Vec<Complex64>,
}

impl MeasurableFn {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::ShapeMismatch {
                expected: re.len(),
                found: im.len(),
            });
        }
        Ok(Self::new(
            re.iter()
                .zip(im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        ))
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::new(vec![c; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn indicator(n: usize, set: &IndexSet) -> Self {
        Self::new(
            (0..n)
                .map(|i| Complex64::new(if set.contains(i) { 1.0 } else { 0.0 }, 0.0))
                .collect(),
        )
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// `|f|²`, embedded as a real-valued complex function.
    pub fn abs_sq(&self) -> Self {
        self.map(|z| Complex64::new(z.norm_sqr(), 0.0))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(self.values.iter().map(|&z| f(z)).collect())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        ))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A set of point indices, e.g. the support `S(f) = {x : f(x) ≠ 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet(BTreeSet<usize>);

impl IndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn insert(&mut self, i: usize) -> bool {
        self.0.insert(i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.0.intersection(&other.0).copied().collect())
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Mass-weighted mean of `values` over every atom.
pub fn atom_means(
    space: &FiniteMeasureSpace,
    part: &Partition,
    values: &[Complex64],
) -> Result<Vec<Complex64>> {
    part.check(space)?;
    if values.len() != space.len() {
        return Err(Error::ShapeMismatch {
            expected: space.len(),
            found: values.len(),
        });
    }
    let mass = space.mass();
    Ok(part
        .atoms()
        .iter()
        .map(|atom| {
            let (num, den) = atom
                .iter()
                .fold((Complex64::new(0.0, 0.0), 0.0), |(num, den), &i| {
                    (num + values[i] * mass[i], den + mass[i])
                });
            num / den
        })
        .collect())
}

pub fn cond_expect(
    space: &FiniteMeasureSpace,
    part: &Partition,
    f: &MeasurableFn,
) -> Result<MeasurableFn> {
    let means = atom_means(space, part, f.values())?;
    Ok(part.expand(&means))
}

/// Indices where `|f(x)| > tol`.
pub fn support(f: &MeasurableFn, tol: f64) -> IndexSet {
    f.values()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > tol)
        .map(|(i, _)| i)
        .collect()
}

/// True when `f` is constant on every atom: no value deviates from its atom's
/// arithmetic mean by more than `tol`.
pub fn is_measurable_wrt(f: &MeasurableFn, part: &Partition, tol: f64) -> bool {
    if f.len() != part.num_points() {
        return false;
    }
    let v = f.values();
    part.atoms().iter().all(|atom| {
        let mean = atom.iter().map(|&i| v[i]).sum::<Complex64>() / atom.len() as f64;
        atom.iter().all(|&i| (v[i] - mean).norm() <= tol)
    })
}

/// Midpoint discretization of the unit square with Lebesgue measure, the
/// σ-algebra of vertical strips `A × [0, 1]`, and the weights
/// `u(x, y) = y^(x/8)`, `w(x, y) = √((4 + x) y)`.
#[derive(Debug, Clone)]
pub struct UnitSquareInstance {
    pub grid: usize,
    pub space: FiniteMeasureSpace,
    pub part: Partition,
    pub u: MeasurableFn,
    pub w: MeasurableFn,
}

impl UnitSquareInstance {
    /// x-coordinate of the midpoint of strip `i`.
    pub fn strip_midpoint(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.grid as f64
    }
}

/// Point `(i, j)` (x-cell `i`, y-cell `j`) has index `i * grid + j`; atom `i`
/// is the strip of x-cell `i`.
pub fn build_unit_square_instance(grid: usize) -> Result<UnitSquareInstance> {
    if grid < 2 {
        return Err(Error::InvalidGrid(grid));
    }
    let n = grid * grid;
    let h = 1.0 / grid as f64;
    let space = FiniteMeasureSpace::new(vec![h * h; n])?;
    let part = Partition::new(
        (0..grid)
            .map(|i| (i * grid..(i + 1) * grid).collect())
            .collect(),
        n,
    )?;
    let mut u = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..grid {
        let x = (i as f64 + 0.5) * h;
        for j in 0..grid {
            let y = (j as f64 + 0.5) * h;
            u.push(Complex64::new(y.powf(x / 8.0), 0.0));
            w.push(Complex64::new(((4.0 + x) * y).sqrt(), 0.0));
        }
    }
    Ok(UnitSquareInstance {
        grid,
        space,
        part,
        u: MeasurableFn::new(u),
        w: MeasurableFn::new(w),
    })
}
