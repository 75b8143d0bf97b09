//! Seeded instance generation. Instance `i` of a campaign draws from its own
//! ChaCha stream, so results do not depend on scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wcop_core::{Complex64, FiniteMeasureSpace, MeasurableFn, Partition, WeightedCondOp};

/// Probability that a random instance has `u` or `w` vanish on one atom.
pub const VANISH_PROBABILITY: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub max_points: usize,
    pub max_atoms: usize,
}

/// Instances with known structure, appended to the random campaign so that
/// the hypotheses of the class criteria are actually met.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `M_w E` with `w` constant on atoms.
    MeasurableMultiplier,
    /// `E M_u` with `u` constant on atoms.
    MeasurableAveraging,
    /// `E M_u` with `u` not constant on some atom.
    VaryingAveraging,
    /// `M_w E` with `w` not constant on some atom.
    VaryingMultiplier,
    /// `u = c w̄` on every atom, `c` constant per atom.
    Proportional,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::MeasurableMultiplier,
        Family::MeasurableAveraging,
        Family::VaryingAveraging,
        Family::VaryingMultiplier,
        Family::Proportional,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "family")]
pub enum Origin {
    Random,
    Structured(Family),
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0))
}

/// Labels in `0..k` for `n` points with every label used.
fn surjective_assignment(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let mut slots: Vec<usize> = (0..n).collect();
    slots.shuffle(rng);
    for (label, &slot) in slots.iter().take(k).enumerate() {
        labels[slot] = label;
    }
    labels
}

struct Skeleton {
    space: FiniteMeasureSpace,
    part: Partition,
}

fn skeleton(rng: &mut impl Rng, min_points: usize, shape: Shape, split: bool) -> Skeleton {
    let n = rng.random_range(min_points..=shape.max_points.max(min_points));
    // `split` keeps at least one atom with two points
    let top = if split { n - 1 } else { n }.min(shape.max_atoms).max(1);
    let k = rng.random_range(1..=top);
    let mass: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..=1.0)).collect();
    let assignment = surjective_assignment(rng, n, k);
    Skeleton {
        space: FiniteMeasureSpace::new(mass).expect("masses in [0.1, 1]"),
        part: Partition::from_assignment(&assignment).expect("surjective assignment"),
    }
}

/// Point count uniform in `[2, max_points]`, atom count uniform in
/// `[1, min(points, max_atoms)]`, masses uniform in `[0.1, 1]` and weights
/// with parts uniform in `[−2, 2]`.
pub fn random_instance(seed: u64, index: u64, shape: Shape) -> WeightedCondOp {
    let mut rng = stream(seed, index);
    let s = skeleton(&mut rng, 2, shape, false);
    let n = s.space.len();
    let mut u: Vec<Complex64> = (0..n).map(|_| complex(&mut rng)).collect();
    let mut w: Vec<Complex64> = (0..n).map(|_| complex(&mut rng)).collect();
    if rng.random_bool(VANISH_PROBABILITY) {
        let atom = rng.random_range(0..s.part.num_atoms());
        let target = if rng.random_bool(0.5) { &mut u } else { &mut w };
        for &i in s.part.atom(atom) {
            target[i] = Complex64::new(0.0, 0.0);
        }
    }
    WeightedCondOp::new(s.space, s.part, MeasurableFn::new(u), MeasurableFn::new(w))
        .expect("generated shapes agree")
}

/// Structured instances live on streams disjoint from the random ones.
pub fn structured_instance(seed: u64, index: u64, family: Family, shape: Shape) -> WeightedCondOp {
    let mut rng = stream(seed, (1 << 48) | index);
    let split = matches!(family, Family::VaryingAveraging | Family::VaryingMultiplier);
    let s = skeleton(&mut rng, if split { 3 } else { 2 }, shape, split);
    let n = s.space.len();
    let one = MeasurableFn::constant(n, Complex64::new(1.0, 0.0));
    let per_atom: Vec<Complex64> = (0..s.part.num_atoms()).map(|_| complex(&mut rng)).collect();
    let measurable = s.part.expand(&per_atom);
    let varying = MeasurableFn::new((0..n).map(|_| complex(&mut rng)).collect());
    let (u, w) = match family {
        Family::MeasurableMultiplier => (one, measurable),
        Family::MeasurableAveraging => (measurable, one),
        Family::VaryingAveraging => (varying, one),
        Family::VaryingMultiplier => (one, varying),
        Family::Proportional => (
            varying.conj().mul(&measurable).expect("same length"),
            varying,
        ),
    };
    WeightedCondOp::new(s.space, s.part, u, w).expect("generated shapes agree")
}
