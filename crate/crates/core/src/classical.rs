//! Classical kicked top: the stroboscopic map on the unit sphere, Poincaré
//! sections and the chaotic-sea mask over a [`PhaseGrid`].

use std::f64::consts::PI;

use rand::rngs::Xoshiro256PlusPlus;
use rand::{RngExt, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::spin::PhasePoint;

/// Steps between renormalizations of the spin vector.
pub const RENORMALIZE_EVERY: u64 = 10_000;
/// Seeds whose finite-time exponent falls below this are treated as regular.
pub const SEED_EXPONENT_THRESHOLD: f64 = 0.05;
pub const SEED_TRIALS: usize = 20;
pub const SEED_TRIAL_KICKS: usize = 200;
pub const SEED_DISPLACEMENT: f64 = 1e-8;

/// Unit spin vector `X = <S>/S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ClassicalState {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_point(p: PhasePoint) -> Self {
        let [x, y, z] = p.unit_vector();
        Self { x, y, z }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn normalized(self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::new(self.x / n, self.y / n, self.z / n)
    }

    fn distance(&self, other: &Self) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }
}

/// One kick of period: rotation about `x` by `alpha`, then about `z` by
/// `Psi = kappa * Z'` where `Z'` is the rotated `z` component.
#[derive(Clone, Copy, Debug)]
pub struct KickedTopMap {
    pub alpha: f64,
    pub kappa: f64,
    sin_a: f64,
    cos_a: f64,
}

impl KickedTopMap {
    pub fn new(alpha: f64, kappa: f64) -> Self {
        let (sin_a, cos_a) = alpha.sin_cos();
        Self {
            alpha,
            kappa,
            sin_a,
            cos_a,
        }
    }

    #[inline]
    pub fn step(&self, s: ClassicalState) -> ClassicalState {
        let y1 = s.y * self.cos_a - s.z * self.sin_a;
        let z1 = s.y * self.sin_a + s.z * self.cos_a;
        let (sin_p, cos_p) = (self.kappa * z1).sin_cos();
        ClassicalState {
            x: s.x * cos_p - y1 * sin_p,
            y: s.x * sin_p + y1 * cos_p,
            z: z1,
        }
    }

    pub fn inverse_step(&self, s: ClassicalState) -> ClassicalState {
        let (sin_p, cos_p) = (self.kappa * s.z).sin_cos();
        let x1 = s.x * cos_p + s.y * sin_p;
        let y1 = -s.x * sin_p + s.y * cos_p;
        ClassicalState {
            x: x1,
            y: y1 * self.cos_a + s.z * self.sin_a,
            z: -y1 * self.sin_a + s.z * self.cos_a,
        }
    }

    /// Iterates `n` kicks, renormalizing every [`RENORMALIZE_EVERY`] steps.
    pub fn iterate(&self, mut s: ClassicalState, n: u64, mut visit: impl FnMut(ClassicalState)) -> ClassicalState {
        for i in 1..=n {
            s = self.step(s);
            if i % RENORMALIZE_EVERY == 0 {
                s = s.normalized();
            }
            visit(s);
        }
        s
    }

    /// Mean log separation growth per kick of a `SEED_DISPLACEMENT` partner,
    /// rescaled back to the initial distance after every kick.
    pub fn finite_time_exponent(&self, start: ClassicalState, kicks: usize, displacement: f64) -> f64 {
        // displace along a tangent direction
        let tangent = if start.z.abs() < 0.9 {
            ClassicalState::new(-start.y, start.x, 0.0)
        } else {
            ClassicalState::new(0.0, -start.z, start.y)
        }
        .normalized();
        let mut a = start;
        let mut b = ClassicalState::new(
            start.x + displacement * tangent.x,
            start.y + displacement * tangent.y,
            start.z + displacement * tangent.z,
        )
        .normalized();
        let d0 = a.distance(&b);
        let mut sum = 0.0;
        for _ in 0..kicks {
            a = self.step(a);
            b = self.step(b);
            let d = a.distance(&b);
            sum += (d / d0).ln();
            let r = d0 / d;
            b = ClassicalState::new(a.x + (b.x - a.x) * r, a.y + (b.y - a.y) * r, a.z + (b.z - a.z) * r)
                .normalized();
        }
        sum / kicks as f64
    }
}

pub fn classical_step(s: ClassicalState, alpha: f64, kappa: f64) -> ClassicalState {
    KickedTopMap::new(alpha, kappa).step(s)
}

/// `(phi, cos theta)` with `phi = atan2(Y, X)`; the poles map to `phi = 0`.
pub fn to_canonical(s: ClassicalState) -> (f64, f64) {
    let phi = if s.x == 0.0 && s.y == 0.0 {
        0.0
    } else {
        s.y.atan2(s.x)
    };
    (phi, s.z.clamp(-1.0, 1.0))
}

pub fn random_unit(rng: &mut Xoshiro256PlusPlus) -> ClassicalState {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(-PI..PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    ClassicalState::new(r * phi.cos(), r * phi.sin(), z)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoincareParams {
    pub alpha: f64,
    pub kappa: f64,
    pub trajectories: usize,
    pub kicks: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct PoincareSection {
    /// `(phi, cos theta)` for every recorded iterate, initial points included,
    /// grouped by trajectory.
    pub points: Vec<(f64, f64)>,
    pub params: PoincareParams,
}

impl PoincareSection {
    /// Fraction of grid cells holding at least one point.
    pub fn visited_fraction(&self, grid: PhaseGrid) -> f64 {
        let mut seen = vec![false; grid.cells()];
        for &(phi, ct) in &self.points {
            seen[grid.locate(phi, ct)] = true;
        }
        seen.iter().filter(|&&v| v).count() as f64 / grid.cells() as f64
    }
}

pub fn poincare_section(alpha: f64, kappa: f64, trajectories: usize, kicks: usize, seed: u64) -> Result<PoincareSection> {
    if trajectories == 0 || kicks == 0 {
        return Err(Error::InvalidArgument(
            "poincare section needs at least one trajectory and one kick".into(),
        ));
    }
    let map = KickedTopMap::new(alpha, kappa);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let starts: Vec<ClassicalState> = (0..trajectories).map(|_| random_unit(&mut rng)).collect();
    let per_traj: Vec<Vec<(f64, f64)>> = starts
        .par_iter()
        .map(|&s0| {
            let mut pts = Vec::with_capacity(kicks + 1);
            pts.push(to_canonical(s0));
            map.iterate(s0, kicks as u64, |s| pts.push(to_canonical(s)));
            pts
        })
        .collect();
    Ok(PoincareSection {
        points: per_traj.into_iter().flatten().collect(),
        params: PoincareParams {
            alpha,
            kappa,
            trajectories,
            kicks,
            seed,
        },
    })
}

/// Chaotic (`+1`) versus regular (`-1`) labels over a phase grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaoticMask {
    pub grid: PhaseGrid,
    pub labels: Vec<i8>,
    pub visit_counts: Vec<u32>,
    /// `false` when no seed showed chaotic separation growth; all labels are
    /// then `-1`.
    pub chaotic_sea: bool,
    pub seed_point: Option<PhasePoint>,
    pub seed_exponent: f64,
    pub kicks: u64,
}

impl ChaoticMask {
    /// A mask with every cell carrying `label`.
    pub fn uniform(grid: PhaseGrid, label: i8) -> Self {
        assert!(label == 1 || label == -1);
        Self {
            grid,
            labels: vec![label; grid.cells()],
            visit_counts: vec![0; grid.cells()],
            chaotic_sea: label == 1,
            seed_point: None,
            seed_exponent: 0.0,
            kicks: 0,
        }
    }

    pub fn cell_area(&self) -> f64 {
        self.grid.cell_area()
    }

    pub fn label(&self, p: usize, q: usize) -> i8 {
        self.labels[self.grid.index(p, q)]
    }

    pub fn chaotic_cells(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn chaotic_fraction(&self) -> f64 {
        self.chaotic_cells() as f64 / self.grid.cells() as f64
    }

    pub fn negated(&self) -> Self {
        let mut m = self.clone();
        for l in &mut m.labels {
            *l = -*l;
        }
        m
    }
}

/// Seed for the mask orbit: user supplied, or the best of [`SEED_TRIALS`]
/// random points by finite-time exponent.
#[derive(Clone, Copy, Debug)]
pub enum SeedChoice {
    Auto { rng_seed: u64 },
    Point(PhasePoint),
}

/// Picks the trial point with the largest finite-time exponent.
pub fn select_seed(map: &KickedTopMap, rng_seed: u64) -> (ClassicalState, f64) {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(rng_seed);
    let trials: Vec<ClassicalState> = (0..SEED_TRIALS).map(|_| random_unit(&mut rng)).collect();
    trials
        .into_iter()
        .map(|s| (s, map.finite_time_exponent(s, SEED_TRIAL_KICKS, SEED_DISPLACEMENT)))
        .fold((ClassicalState::new(0.0, 0.0, 1.0), f64::NEG_INFINITY), |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        })
}

/// Marks every cell visited by an `n_kicks` orbit from a chaotic seed.
///
/// With [`SeedChoice::Auto`] a regular phase space yields an all `-1` mask
/// with `chaotic_sea = false`; an explicit seed that fails validation is an
/// error.
pub fn chaotic_mask(alpha: f64, kappa: f64, grid: PhaseGrid, n_kicks: u64, seed: SeedChoice) -> Result<ChaoticMask> {
    let map = KickedTopMap::new(alpha, kappa);
    let (start, exponent) = match seed {
        SeedChoice::Auto { rng_seed } => select_seed(&map, rng_seed),
        SeedChoice::Point(p) => {
            let s = ClassicalState::from_point(p);
            (s, map.finite_time_exponent(s, SEED_TRIAL_KICKS, SEED_DISPLACEMENT))
        }
    };
    if exponent < SEED_EXPONENT_THRESHOLD {
        if let SeedChoice::Point(_) = seed {
            return Err(Error::RegularSeed {
                exponent,
                threshold: SEED_EXPONENT_THRESHOLD,
            });
        }
        let mut mask = ChaoticMask::uniform(grid, -1);
        mask.seed_exponent = exponent;
        mask.kicks = n_kicks;
        return Ok(mask);
    }

    let mut visit_counts = vec![0u32; grid.cells()];
    let (phi0, ct0) = to_canonical(start);
    visit_counts[grid.locate(phi0, ct0)] += 1;
    map.iterate(start, n_kicks, |s| {
        let (phi, ct) = to_canonical(s);
        let c = grid.locate(phi, ct);
        visit_counts[c] = visit_counts[c].saturating_add(1);
    });
    let labels = visit_counts.iter().map(|&v| if v > 0 { 1 } else { -1 }).collect();
    let (phi, ct) = to_canonical(start);
    Ok(ChaoticMask {
        grid,
        labels,
        visit_counts,
        chaotic_sea: true,
        seed_point: PhasePoint::from_canonical(phi, ct).ok(),
        seed_exponent: exponent,
        kicks: n_kicks,
    })
}
