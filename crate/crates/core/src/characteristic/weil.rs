//! Invariant polynomials on matrix Lie algebras and the Chern–Weil integral
//! of sampled curvature.
//!
//! Chern forms use `det(1 + (i/2π) F) = Σ_q c_q`, computed from the power
//! traces `p_j = Tr X^j`, `X = (i/2π) F`, by Newton's identities
//! `k c_k = Σ_{j=1}^{k} (−1)^{j−1} c_{k−j} p_j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior;
use crate::forms::MatrixForm;
use crate::linalg::{self, c, commutator, CMat};

/// The fully symmetrized trace `P(a_1, …, a_q) = (1/q!) Σ_π Tr(a_{π1} ⋯ a_{πq})`
/// on `n × n` matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymmetrizedTrace {
    pub q: usize,
    pub n: usize,
}

pub fn symmetrized_trace(q: usize, n: usize) -> Result<SymmetrizedTrace> {
    if q == 0 || n == 0 {
        return Err(Error::invalid("symmetrized trace needs q >= 1 and n >= 1"));
    }
    if q > 8 {
        return Err(Error::Capacity(format!("degree {q} exceeds 8")));
    }
    Ok(SymmetrizedTrace { q, n })
}

fn permutations(q: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..q {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut next = p.clone();
                    next.insert(pos, k);
                    next
                })
            })
            .collect();
    }
    out
}

impl SymmetrizedTrace {
    pub fn evaluate(&self, args: &[CMat]) -> Result<Complex64> {
        if args.len() != self.q || args.iter().any(|a| a.shape() != (self.n, self.n)) {
            return Err(Error::invalid("expected q arguments of size n x n"));
        }
        let perms = permutations(self.q);
        let total: Complex64 = perms
            .iter()
            .map(|p| linalg::trace(&p.iter().fold(linalg::identity(self.n), |acc, &i| acc * &args[i])))
            .sum();
        Ok(total / perms.len() as f64)
    }

    /// Largest change of `P` under argument permutations, on `trials` random
    /// traceless inputs.
    pub fn symmetry_residual<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let args: Vec<CMat> = (0..self.q).map(|_| linalg::traceless_part(&linalg::random_complex(rng, self.n, self.n))).collect();
            let base = self.evaluate(&args).expect("shapes match");
            for p in permutations(self.q) {
                let permuted: Vec<CMat> = p.iter().map(|&i| args[i].clone()).collect();
                worst = worst.max((self.evaluate(&permuted).expect("shapes match") - base).norm());
            }
        }
        worst
    }

    /// Largest `|Σ_i P(a_1, …, [γ, a_i], …, a_q)|` on `trials` random
    /// traceless inputs.
    pub fn invariance_residual<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize) -> f64 {
        let mut worst = 0.0f64;
        for _ in 0..trials {
            let mut draw = || linalg::traceless_part(&linalg::random_complex(rng, self.n, self.n));
            let gamma = draw();
            let args: Vec<CMat> = (0..self.q).map(|_| draw()).collect();
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..self.q {
                let mut moved = args.clone();
                moved[i] = commutator(&gamma, &args[i]);
                s += self.evaluate(&moved).expect("shapes match");
            }
            worst = worst.max(s.norm());
        }
        worst
    }
}

/// A curvature 2-form sampled on `ℝ^d`.
pub trait CurvatureField: Sync {
    fn base_dim(&self) -> usize;
    fn rank(&self) -> usize;
    /// Centre of the radial integration grid.
    fn center(&self) -> Vec<f64> {
        vec![0.0; self.base_dim()]
    }
    /// `F_{μν}(x)` in row-major `d × d` order.
    fn curvature(&self, x: &[f64]) -> Vec<CMat>;
}

/// Top-degree coefficient of the Chern form `c_q` for curvature components
/// `F_{μν}` on `ℝ^{2q}`, i.e. the density with respect to `dx^1 ⋯ dx^{2q}`.
pub fn chern_density(f: &[CMat], d: usize, q: usize) -> Result<Complex64> {
    if q == 0 || d != 2 * q {
        return Err(Error::invalid(format!("base dimension {d} must equal 2q = {}", 2 * q)));
    }
    if d > exterior::MAX_GENERATORS || f.len() != d * d {
        return Err(Error::invalid("expected d*d curvature components"));
    }
    let n = f[0].nrows();
    if f.iter().any(|m| m.shape() != (n, n)) {
        return Err(Error::invalid("curvature components must be square and of equal size"));
    }
    let mut x = MatrixForm::zero(d, 2, n, n);
    let factor = c(0.0, 1.0 / (2.0 * PI));
    for mu in 0..d {
        for nu in mu + 1..d {
            x.add_term(&[mu, nu], &f[mu * d + nu] * factor);
        }
    }
    let trace_form = |w: &MatrixForm| w.map_coefficients(1, 1, |a| CMat::from_element(1, 1, linalg::trace(a)));
    let mut power = x.clone();
    let mut p = vec![trace_form(&power)];
    for _ in 1..q {
        power = power.wedge(&x);
        p.push(trace_form(&power));
    }
    let mut cs = vec![MatrixForm::scalar(d, linalg::identity(1))];
    for k in 1..=q {
        let mut ck = MatrixForm::zero(d, 2 * k, 1, 1);
        for j in 1..=k {
            let term = cs[k - j].wedge(&p[j - 1]);
            ck = if j % 2 == 1 { ck.add(&term) } else { ck.sub(&term) };
        }
        cs.push(ck.scale(c(1.0 / k as f64, 0.0)));
    }
    let top: Vec<usize> = (0..d).collect();
    Ok(cs[q].coefficient(&top)[(0, 0)])
}

/// Radial midpoint grid on the ball of radius `r_max` around the field's
/// centre, with an equal-weight average over axis and diagonal directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub cells: usize,
}

fn directions(d: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for k in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[k] = s;
            out.push(v);
        }
    }
    let norm = 1.0 / (d as f64).sqrt();
    for signs in 0..1u32 << d {
        out.push((0..d).map(|k| if signs >> k & 1 == 1 { -norm } else { norm }).collect());
    }
    out
}

/// Area of the unit sphere `S^{d−1}` for even `d`.
fn sphere_area(d: usize) -> f64 {
    let half = d / 2;
    2.0 * PI.powi(half as i32) / (1..half).map(|k| k as f64).product::<f64>()
}

#[derive(Debug, Clone, Serialize)]
pub struct ChernResult {
    pub q: usize,
    pub value: f64,
    /// Largest imaginary part of the sampled density.
    pub imaginary_residual: f64,
    pub grid: RadialGrid,
}

/// `∫ c_q(F)` over the radial grid.
pub fn chern_weil_number(field: &dyn CurvatureField, q: usize, grid: RadialGrid) -> Result<ChernResult> {
    let d = field.base_dim();
    if q == 0 || d != 2 * q {
        return Err(Error::invalid(format!("base dimension {d} must equal 2q = {}", 2 * q)));
    }
    if d > 16 {
        return Err(Error::Capacity(format!("base dimension {d} exceeds 16")));
    }
    if grid.cells == 0 || !(grid.r_max.is_finite() && grid.r_max > 0.0) {
        return Err(Error::invalid("grid needs a positive radius and at least one cell"));
    }
    let centre = field.center();
    let dirs = directions(d);
    let dr = grid.r_max / grid.cells as f64;
    let area = sphere_area(d);
    let cells: Vec<(f64, f64)> = (0..grid.cells)
        .into_par_iter()
        .map(|i| {
            let r = (i as f64 + 0.5) * dr;
            let mut sum = 0.0;
            let mut imag = 0.0f64;
            for dir in &dirs {
                let x: Vec<f64> = centre.iter().zip(dir).map(|(c0, u)| c0 + r * u).collect();
                let dens = chern_density(&field.curvature(&x), d, q).expect("dimensions were checked");
                sum += dens.re;
                imag = imag.max(dens.im.abs());
            }
            (area * r.powi(d as i32 - 1) * dr * sum / dirs.len() as f64, imag)
        })
        .collect();
    let value = cells.iter().map(|c| c.0).sum();
    let imaginary_residual = cells.iter().fold(0.0f64, |m, c| m.max(c.1));
    Ok(ChernResult { q, value, imaginary_residual, grid })
}

/// `su(2)` generators `T_a = σ_a / (2i)`, with `[T_a, T_b] = ε_{abc} T_c`.
pub fn su2_generators() -> [CMat; 3] {
    linalg::pauli().map(|s| s * c(0.0, -0.5))
}

/// Anti-self-dual 't Hooft symbol `η̄^a_{μν}` with coordinates `(x_1, x_2,
/// x_3, x_4)` indexed `0..4`.
pub fn thooft_bar(a: usize, mu: usize, nu: usize) -> f64 {
    match (mu, nu) {
        (3, 3) => 0.0,
        (m, 3) => -f64::from(u8::from(m == a)),
        (3, n) => f64::from(u8::from(n == a)),
        (m, n) => levi_civita(a, m, n),
    }
}

fn levi_civita(a: usize, b: usize, c0: usize) -> f64 {
    match (a, b, c0) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// The unit-charge `SU(2)` instanton of scale `rho` centred at `center`, in
/// regular gauge: `A_μ = 2 η̄^a_{μν} y^ν / (y² + ρ²) T_a`, `y = x − center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bpst {
    pub rho: f64,
    pub center: [f64; 4],
}

impl Bpst {
    pub fn new(rho: f64, center: [f64; 4]) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) || center.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("instanton needs a positive finite scale and finite centre"));
        }
        Ok(Bpst { rho, center })
    }

    fn shifted(&self, x: &[f64]) -> [f64; 4] {
        std::array::from_fn(|k| x[k] - self.center[k])
    }

    pub fn potential(&self, x: &[f64]) -> [CMat; 4] {
        let y = self.shifted(x);
        let den = y.iter().map(|v| v * v).sum::<f64>() + self.rho * self.rho;
        let t = su2_generators();
        std::array::from_fn(|mu| {
            let mut a = CMat::zeros(2, 2);
            for (ai, ta) in t.iter().enumerate() {
                let coef: f64 = (0..4).map(|nu| thooft_bar(ai, mu, nu) * y[nu]).sum();
                a += ta * c(2.0 * coef / den, 0.0);
            }
            a
        })
    }
}

impl CurvatureField for Bpst {
    fn base_dim(&self) -> usize {
        4
    }

    fn rank(&self) -> usize {
        2
    }

    fn center(&self) -> Vec<f64> {
        self.center.to_vec()
    }

    /// `F_{μν} = −4ρ² η̄^a_{μν} / (y² + ρ²)² T_a`.
    fn curvature(&self, x: &[f64]) -> Vec<CMat> {
        let y = self.shifted(x);
        let den = y.iter().map(|v| v * v).sum::<f64>() + self.rho * self.rho;
        let s = -4.0 * self.rho * self.rho / (den * den);
        let t = su2_generators();
        let mut out = Vec::with_capacity(16);
        for mu in 0..4 {
            for nu in 0..4 {
                let mut f = CMat::zeros(2, 2);
                for (ai, ta) in t.iter().enumerate() {
                    f += ta * c(s * thooft_bar(ai, mu, nu), 0.0);
                }
                out.push(f);
            }
        }
        out
    }
}

/// A `U(1)` vortex on `ℝ²` with `F_{12} = −2i k ρ² / (r² + ρ²)²`, embedded in
/// `U(rank)` along the first diagonal entry; its first Chern number is `k`.
/// With `traceless` the entry `−F` is added in the second slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vortex {
    pub charge: f64,
    pub rho: f64,
    pub rank: usize,
    pub traceless: bool,
}

impl Vortex {
    pub fn new(charge: f64, rho: f64, rank: usize, traceless: bool) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) || !charge.is_finite() {
            return Err(Error::invalid("vortex needs a finite charge and positive scale"));
        }
        if rank == 0 || (traceless && rank < 2) {
            return Err(Error::invalid("vortex rank must be >= 1, or >= 2 when traceless"));
        }
        Ok(Vortex { charge, rho, rank, traceless })
    }
}

impl CurvatureField for Vortex {
    fn base_dim(&self) -> usize {
        2
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn curvature(&self, x: &[f64]) -> Vec<CMat> {
        let den = x[0] * x[0] + x[1] * x[1] + self.rho * self.rho;
        let b = c(0.0, -2.0 * self.charge * self.rho * self.rho / (den * den));
        let mut f12 = CMat::zeros(self.rank, self.rank);
        f12[(0, 0)] = b;
        if self.traceless {
            f12[(1, 1)] = -b;
        }
        let zero = CMat::zeros(self.rank, self.rank);
        vec![zero.clone(), f12.clone(), -f12, zero]
    }
}

/// Zero curvature on `ℝ^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flat {
    pub dim: usize,
    pub rank: usize,
}

impl CurvatureField for Flat {
    fn base_dim(&self) -> usize {
        self.dim
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn curvature(&self, _x: &[f64]) -> Vec<CMat> {
        vec![CMat::zeros(self.rank, self.rank); self.dim * self.dim]
    }
}
