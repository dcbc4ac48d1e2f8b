//! One function per subcommand. Each returns its result object, the
//! residual checks and, for the vacuum search, the iteration trace.

use std::path::Path;
use std::sync::Arc;

use ncdg_core::bundle::{self, BundleCheckOptions};
use ncdg_core::characteristic::{
    characteristic_form, chern_weil_number, exactness, invariant_polynomials, lecomte_obstruction, Bpst,
    CurvatureField, Flat, LieSES, RadialGrid, SesDescriptor, Splitting, Vortex,
};
use ncdg_core::characteristic::lecomte::{EXACTNESS_TOL, MAX_FORM_DEGREE};
use ncdg_core::cohomology;
use ncdg_core::connection::{self, ConnectionForm};
use ncdg_core::encoding;
use ncdg_core::lattice::{self, FieldConfig, Lattice, MinimizeOptions};
use ncdg_core::lie::{self, LieBasis};
use ncdg_core::linalg::CMat;
use ncdg_core::reduction::{self, ReductionData, SymmetryActions};
use ncdg_core::Error;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::inputs::{self, BundleDescriptor, FieldSpec, InitialKind, ReduceInput, YmhConfig};
use crate::report::{CliError, Outcome, Tolerances};

type Run = Result<Outcome, CliError>;

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, CliError> {
    Ok(serde_json::to_value(x)?)
}

fn su_basis(n: usize) -> Result<Arc<LieBasis>, CliError> {
    Ok(Arc::new(lie::build_su_basis(n)?))
}

pub const BASIS_TOLS: &[(&str, f64)] = &[("closure", 1e-12), ("jacobi", 1e-12)];

pub fn basis(n: usize, tol: &Tolerances) -> Run {
    let b = su_basis(n)?;
    let mut out = Outcome::new(json!({ "n": n, "dim": b.dim(), "basis": to_value(&*b)? }));
    out.check(tol, "closure", b.closure_residual(), true);
    out.check(tol, "jacobi", b.jacobi_residual(), true);
    Ok(out)
}

pub const COHOMOLOGY_TOLS: &[(&str, f64)] = &[("euler", 0.0)];

pub fn cohomology(n: usize, representatives: bool, tol: &Tolerances) -> Run {
    let b = su_basis(n)?;
    let rep = cohomology::cohomology(&b, representatives)?;
    let mut out = Outcome::new(to_value(&rep)?);
    out.check(tol, "euler", (rep.euler_complex - rep.euler_cohomology).unsigned_abs() as f64, true);
    Ok(out)
}

pub const CURVATURE_TOLS: &[(&str, f64)] = &[("flat", 1e-12)];

pub fn curvature(n: usize, path: &Path, tol: &Tolerances) -> Run {
    let b = su_basis(n)?;
    let raw: Value = inputs::read_json(path)?;
    let conn = ConnectionForm::from_json(b, raw)?;
    let f = connection::curvature(&conn);
    let curvature_max = f.max_abs();
    let mut out = Outcome::new(json!({
        "n": n,
        "r": conn.r(),
        "curvature": to_value(&f)?,
        "curvature_max": curvature_max,
        "flat": curvature_max <= tol.get("flat"),
        "hermitean_compatible": connection::check_hermitean_compat(&conn),
    }));
    out.check(tol, "flat", curvature_max, false);
    Ok(out)
}

pub const FLAT_TOLS: &[(&str, f64)] = &[("curvature", 1e-12)];

pub fn classify_flat(n: usize, r: usize, tol: &Tolerances) -> Run {
    let b = su_basis(n)?;
    let cls = connection::classify_flat(r, &b)?;
    let mut out = Outcome::new(json!({
        "n": n,
        "r": r,
        "orbit_count": cls.orbits.len(),
        "pairwise_inequivalent": cls.pairwise_inequivalent,
        "orbits": to_value(&cls.orbits)?,
    }));
    out.check(tol, "curvature", cls.max_curvature_residual, true);
    out.require("inequivalent", cls.pairwise_inequivalent);
    Ok(out)
}

pub const YMH_TOLS: &[(&str, f64)] = &[("action", 1e-8), ("classification", lattice::CLASSIFY_TOL)];

pub fn ymh_minimize(cfg: &YmhConfig, seed: u64, tol: &Tolerances) -> Run {
    let finite = [cfg.h, cfg.m, cfg.initial.scale, cfg.initial.noise, cfg.initial.gauge_noise, cfg.action_tol];
    if finite.iter().any(|x| !x.is_finite()) || cfg.initial.noise < 0.0 || cfg.initial.gauge_noise < 0.0 {
        return Err(Error::InvalidParameter("configuration numbers must be finite, noise nonnegative".into()).into());
    }
    let basis = su_basis(cfg.n)?;
    let lat = Lattice::new(cfg.d, cfg.sites, cfg.h)?;
    let n = cfg.n;
    let s = ncdg_core::linalg::c(cfg.initial.scale, 0.0);
    let b0: Vec<CMat> = match cfg.initial.kind {
        InitialKind::Zero => vec![CMat::zeros(n, n); basis.dim()],
        InitialKind::Random => vec![CMat::zeros(n, n); basis.dim()],
        InitialKind::Defining => basis.elements().iter().map(|e| e * s).collect(),
        InitialKind::Dual => basis.elements().iter().map(|e| -e.transpose() * s).collect(),
    };
    let mut f = FieldConfig::constant(lat, basis, cfg.m, &vec![CMat::zeros(n, n); cfg.d], &b0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = if cfg.initial.kind == InitialKind::Random { cfg.initial.scale.abs() } else { cfg.initial.noise };
    f.add_noise(&mut rng, cfg.initial.gauge_noise, noise);
    let opts = MinimizeOptions {
        max_steps: cfg.max_steps,
        b_only: cfg.b_only,
        action_tol: cfg.action_tol,
        ..MinimizeOptions::default()
    };
    let res = lattice::minimize(&f, &opts)?;
    let mean_b: Vec<_> = res.config.mean_b().iter().map(encoding::to_json).collect();
    let mut out = Outcome::new(json!({
        "final_action": res.final_action,
        "initial_action": res.trace.first().map(|t| t.action),
        "gradient_norm": res.gradient_norm,
        "steps": res.trace.len().saturating_sub(1),
        "converged": res.converged,
        "class": to_value(&res.class)?,
        "mean_b": mean_b,
        "lattice_volume": lat.volume(),
    }));
    out.check(tol, "action", res.final_action, false);
    out.check(tol, "classification", res.class.closure_residual, false);
    if !res.converged {
        out.failure = Some(format!("descent stopped after {} steps without converging", res.trace.len() - 1));
    }
    out.trace = Some(res.trace.iter().map(|t| (t.step, t.action, t.gradient_norm)).collect());
    Ok(out)
}

pub const BUNDLE_TOLS: &[(&str, f64)] = &[
    ("transition_unitarity", 1e-12),
    ("alpha_gluing", bundle::ALGEBRAIC_TOL),
    ("horizontality", bundle::ALGEBRAIC_TOL),
    ("gauge_covariance", bundle::FD_TOL),
];

pub fn bundle_check(desc: &BundleDescriptor, seed: u64, tol: &Tolerances) -> Run {
    let opts = BundleCheckOptions {
        instance: desc.instance,
        n: desc.n,
        charge: desc.charge,
        samples: desc.samples,
        pairs: desc.pairs,
        curvature_pairs: desc.curvature_pairs,
        scale: desc.scale,
        seed,
    };
    let rep = bundle::bundle_check(&opts)?;
    let mut out = Outcome::new(json!({
        "instance": desc.instance,
        "transition_unitarity": rep.transition_unitarity,
        "alpha_gluing_residual": rep.alpha_gluing_residual,
        "horizontality_residual": rep.horizontality_residual,
        "gauge_covariance_residual": rep.gauge_covariance_residual,
    }));
    out.check(tol, "transition_unitarity", rep.transition_unitarity, true);
    out.check(tol, "alpha_gluing", rep.alpha_gluing_residual, true);
    out.check(tol, "horizontality", rep.horizontality_residual, true);
    out.check(tol, "gauge_covariance", rep.gauge_covariance_residual, true);
    Ok(out)
}

pub const LECOMTE_TOLS: &[(&str, f64)] = &[
    ("ideal", 1e-12),
    ("bianchi", 1e-12),
    ("invariance", 1e-10),
    ("closure", 1e-12),
    ("difference_exactness", EXACTNESS_TOL),
];

pub fn lecomte(path: &Path, q: Option<usize>, splittings: usize, seed: u64, tol: &Tolerances) -> Run {
    let desc: SesDescriptor = inputs::read_json(path)?;
    let ses = LieSES::from_descriptor(&desc)?;
    let hd = ses.h_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phis = vec![Splitting::canonical(&ses)];
    for _ in 0..splittings {
        phis.push(Splitting::random(&mut rng, &ses, 1.0));
    }
    let mut outside = 0.0f64;
    let mut bianchi = 0.0f64;
    let mut canonical_r = None;
    for phi in &phis {
        let ob = lecomte_obstruction(&ses, phi)?;
        outside = outside.max(ob.outside_ideal);
        bianchi = bianchi.max(ob.bianchi_residual);
        if canonical_r.is_none() {
            canonical_r = Some(ob.ideal_part(&ses));
        }
    }
    let degrees: Vec<usize> = match q {
        Some(q) if q == 0 => return Err(CliError::usage("q must be positive")),
        Some(q) => vec![q],
        None => (1..=(hd / 2).min(MAX_FORM_DEGREE / 2)).collect(),
    };
    let mut invariance = 0.0f64;
    let mut closure = 0.0f64;
    let mut difference = 0.0f64;
    let mut classes = Vec::new();
    for &q in &degrees {
        let polys = invariant_polynomials(&ses, q)?;
        let mut forms = Vec::new();
        for p in &polys {
            invariance = invariance.max(p.invariance_residual(&ses));
            let base = characteristic_form(p, &ses, &phis[0])?;
            closure = closure.max(base.closure_residual);
            for phi in &phis[1..] {
                let other = characteristic_form(p, &ses, phi)?;
                closure = closure.max(other.closure_residual);
                difference = difference.max(exactness(&ses, &other.alpha.sub(&base.alpha)).residual);
            }
            let ex = exactness(&ses, &base.alpha);
            forms.push(json!({
                "polynomial": to_value(p)?,
                "alpha": to_value(&base.alpha)?,
                "closure_residual": base.closure_residual,
                "exact": ex.exact,
                "exactness_residual": ex.residual,
            }));
        }
        classes.push(json!({ "q": q, "invariant_polynomials": polys.len(), "forms": forms }));
    }
    let mut out = Outcome::new(json!({
        "g_dim": ses.g_dim(),
        "i_dim": ses.i_dim(),
        "h_dim": hd,
        "jacobi_residual": ses.jacobi_residual(),
        "splittings": phis.len(),
        "obstruction": to_value(&canonical_r)?,
        "classes": classes,
    }));
    out.check(tol, "ideal", outside, true);
    out.check(tol, "bianchi", bianchi, true);
    out.check(tol, "invariance", invariance, true);
    out.check(tol, "closure", closure, true);
    out.check(tol, "difference_exactness", difference, true);
    Ok(out)
}

pub const CHERN_TOLS: &[(&str, f64)] = &[("imaginary", 1e-12), ("integrality", 1e-2)];

pub struct GridArgs {
    pub r_max: Option<f64>,
    pub cells: usize,
}

pub fn chern(path: &Path, q: Option<usize>, grid: &GridArgs, tol: &Tolerances) -> Run {
    let spec: FieldSpec = inputs::read_json(path)?;
    let (field, scale): (Box<dyn CurvatureField>, f64) = match spec {
        FieldSpec::Bpst { rho, center } => (Box::new(Bpst::new(rho, center)?), rho),
        FieldSpec::Vortex { charge, rho, rank, traceless } => {
            (Box::new(Vortex::new(charge, rho, rank, traceless)?), rho)
        }
        FieldSpec::Flat { dim, rank } => {
            if rank == 0 || dim == 0 || dim % 2 == 1 {
                return Err(CliError::usage("flat field needs positive rank and positive even dimension"));
            }
            (Box::new(Flat { dim, rank }), 1.0)
        }
    };
    let q = q.unwrap_or(field.base_dim() / 2);
    let r_max = grid.r_max.unwrap_or(20.0 * scale);
    let res = chern_weil_number(field.as_ref(), q, RadialGrid { r_max, cells: grid.cells })?;
    let nearest = res.value.round();
    let mut out = Outcome::new(json!({
        "field": to_value(&spec)?,
        "q": q,
        "value": res.value,
        "nearest_integer": nearest,
        "grid": to_value(&res.grid)?,
    }));
    out.check(tol, "imaginary", res.imaginary_residual, true);
    out.check(tol, "integrality", (res.value - nearest).abs(), false);
    Ok(out)
}

pub const REDUCE_TOLS: &[(&str, f64)] = &[("centralizer", 1e-10), ("invariant_maps", 1e-10)];

fn real_matrix(rows: &[Vec<f64>], d: usize) -> Result<DMatrix<f64>, CliError> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Parse(format!("expected a {d}x{d} real matrix")).into());
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

pub fn reduce(path: &Path, tol: &Tolerances) -> Run {
    let input: ReduceInput = inputs::read_json(path)?;
    let rd = ReductionData::from_descriptor(&input.data)?;
    let sym = &input.symmetry;
    let d = sym.k_dim + sym.z0_dim;
    let mut actions = SymmetryActions::trivial(&rd, sym.k_dim, sym.z0_dim);
    if let Some(ms) = &sym.on_matrices {
        if ms.len() != d {
            return Err(Error::Parse("on_matrices must list k_dim + z0_dim matrices".into()).into());
        }
        actions.on_matrices = ms.iter().map(|m| encoding::square_from_json(m, rd.n())).collect::<Result<_, _>>()?;
    }
    if let Some(ms) = &sym.on_lm {
        if ms.len() != d {
            return Err(Error::Parse("on_lm must list k_dim + z0_dim matrices".into()).into());
        }
        actions.on_lm = ms.iter().map(|m| real_matrix(m, rd.lm_dim())).collect::<Result<_, _>>()?;
    }
    let w = reduction::centralizer_w(&rd)?;
    let f = reduction::invariant_maps_f(&rd)?;
    let dims = reduction::reduced_space_dims(&rd, &actions)?;
    let mut out = Outcome::new(json!({
        "n": rd.n(),
        "h0_dim": rd.h0_dim(),
        "lm_dim": rd.lm_dim(),
        "centralizer_dim": w.dim,
        "centralizer_basis": w.basis.iter().map(encoding::to_json).collect::<Vec<_>>(),
        "invariant_maps_dim": f.dim,
        "invariant_maps_basis": to_value(&f.basis)?,
        "reduced": to_value(&dims)?,
    }));
    out.check(tol, "centralizer", w.product_residual.max(w.identity_residual), true);
    out.check(tol, "invariant_maps", f.residual, true);
    Ok(out)
}
