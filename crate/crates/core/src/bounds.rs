//! Convergence-radius machinery for the pressure and virial series.
//!
//! Everything here reduces to two absolutely convergent radial integrals,
//!
//!   C(β)  = ∫ |e^{−βV(x)} − 1| dx,      Ĉ(β) = ∫ (1 − e^{−β|V(x)|}) dx,
//!
//! evaluated by adaptive quadrature with an analytic hard-core disc and a
//! rigorously bounded tail. C feeds the classical Penrose–Ruelle coefficient
//! bound and radius; Ĉ feeds the tree-graph bound, which trades e^{2βB(n−1)}
//! for e^{βBn} and C for the never-larger Ĉ. The virial radii use the same
//! pair of integrals through the scalar optimization g(u).
//!
//! Monte Carlo spot checks (`mayer_cn_mc`, `lemma3_check`) estimate the
//! finite-box coefficient integrals directly and compare them against the
//! claimed bounds; they are validation tools, not production estimators.

use serde::Serialize;
use thiserror::Error;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec;
use crate::potentials::{pair_energy, Configuration, PairPotential, PotentialError};
use crate::quad;
use crate::sum::Neumaier;
use crate::ursell;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("radial integrals are implemented for dimensions 1-3, got {dimension}")]
    UnsupportedDimension { dimension: usize },
    #[error("radius denominator is zero or undefined")]
    DegenerateRadius,
    #[error("g(u) requires u >= 1, got {u}")]
    GDomain { u: f64 },
    #[error("bad parameter {name}: {reason}")]
    BadParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Which coefficient bound / radius family to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusBound {
    /// e^{2βB(n−1)} n^{n−2} C^{n−1}/n! and R = 1/(e^{2βB+1} C).
    PenroseRuelle,
    /// e^{βBn} n^{n−2} Ĉ^{n−1}/n! and R = 1/(e^{βB+1} Ĉ).
    TreeGraph,
}

/// Which virial-series radius to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VirialBound {
    /// g(e^{2βB}) / (e^{2βB} · C), the classical radius. Some statements of
    /// it carry Ĉ instead of C; `literal` selects that variant.
    LebowitzPenrose,
    /// g(e^{βB}) / (e^{βB} · Ĉ).
    TreeGraph,
}

/// A value with a rigorous (quadrature + tail) absolute error estimate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RadialIntegral {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy)]
enum Integrand {
    AbsMayer,
    HatMayer,
    SignedMayer,
}

fn surface_factor(dimension: usize) -> Result<f64, BoundsError> {
    match dimension {
        1 => Ok(2.0),
        2 => Ok(std::f64::consts::TAU),
        3 => Ok(4.0 * std::f64::consts::PI),
        _ => Err(BoundsError::UnsupportedDimension { dimension }),
    }
}

/// β e^{β|V(r)|} ∫_r^∞ |V| s^{d−1} ds bounds every tail here, since
/// |e^{−βv} − 1| ≤ β|v| e^{β|v|} and 1 − e^{−β|v|} ≤ β|v|, with |V|
/// non-increasing past the temperedness radius.
fn tail_bound(p: &PairPotential, beta: f64, r: f64) -> f64 {
    let moment = p
        .tail_abs_moment(r, p.dimension())
        .expect("constructors reject non-tempered tails");
    let edge = p.evaluate_radial(r).abs().as_f64();
    beta * moment * (beta * edge).exp()
}

fn radial_integral(
    p: &PairPotential,
    beta: f64,
    kind: Integrand,
) -> Result<RadialIntegral, BoundsError> {
    let d = p.dimension();
    let s_d = surface_factor(d)?;
    let core = p.hard_core_radius();
    // inside a hard core the factor is exactly ±1: integrate r^{d−1} by hand
    let core_term = match kind {
        Integrand::SignedMayer => -core.powi(d as i32) / d as f64,
        _ => core.powi(d as i32) / d as f64,
    };

    let f = |r: f64| {
        let v = p.evaluate_radial(r);
        let factor = match kind {
            Integrand::AbsMayer => v.mayer(beta).abs(),
            Integrand::HatMayer => v.hat_factor(beta),
            Integrand::SignedMayer => v.mayer(beta),
        };
        factor * r.powi(d as i32 - 1)
    };

    let mut r0 = 4.0_f64
        .max(2.0 * p.temperedness_radius())
        .max(2.0 * core);
    let mut edges = vec![core];
    edges.extend(
        p.quad_breakpoints()
            .into_iter()
            .filter(|&x| x > core && x < r0),
    );
    edges.push(r0);

    let mut value = Neumaier::new();
    let mut error = 0.0;
    for w in edges.windows(2) {
        let q = quad::integrate(&f, w[0], w[1], 1e-10, 1e-14);
        value.add(q.value);
        error += q.error;
    }

    // extend the truncation point until the analytic tail bound is negligible,
    // then fold whatever remains into the reported error
    let mut tail = tail_bound(p, beta, r0);
    while tail > 1e-11 * value.total().abs().max(1e-12) && r0 < 1e6 {
        let q = quad::integrate(&f, r0, 2.0 * r0, 1e-10, 1e-14);
        value.add(q.value);
        error += q.error;
        r0 *= 2.0;
        tail = tail_bound(p, beta, r0);
    }
    error += tail;

    Ok(RadialIntegral {
        value: s_d * (core_term + value.total()),
        error: s_d * error,
    })
}

/// C(β) = ∫ |e^{−βV} − 1| dx over ℝ^d.
pub fn quad_c(p: &PairPotential, beta: f64) -> Result<RadialIntegral, BoundsError> {
    radial_integral(p, beta, Integrand::AbsMayer)
}

/// Ĉ(β) = ∫ (1 − e^{−β|V|}) dx over ℝ^d. Never exceeds C(β).
pub fn quad_chat(p: &PairPotential, beta: f64) -> Result<RadialIntegral, BoundsError> {
    radial_integral(p, beta, Integrand::HatMayer)
}

/// Second Mayer coefficient c₂ = (1/2) ∫ (e^{−βV} − 1) dx, sign kept.
pub fn mayer_c2(p: &PairPotential, beta: f64) -> Result<RadialIntegral, BoundsError> {
    let q = radial_integral(p, beta, Integrand::SignedMayer)?;
    Ok(RadialIntegral {
        value: 0.5 * q.value,
        error: 0.5 * q.error,
    })
}

fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Upper bound on |c_n| from the chosen theorem, with `integral` the matching
/// C(β) (Penrose–Ruelle) or Ĉ(β) (tree-graph) value.
pub fn mayer_bound(
    n: usize,
    beta: f64,
    b: f64,
    integral: f64,
    which: RadiusBound,
) -> Result<f64, BoundsError> {
    if n < 2 {
        return Err(BoundsError::BadParameter {
            name: "n",
            reason: "coefficient bounds start at n = 2",
        });
    }
    let nf = n as f64;
    let stability = match which {
        RadiusBound::PenroseRuelle => (2.0 * beta * b * (nf - 1.0)).exp(),
        RadiusBound::TreeGraph => (beta * b * nf).exp(),
    };
    Ok(stability * nf.powi(n as i32 - 2) * integral.powi(n as i32 - 1) / factorial(n))
}

/// Radius of guaranteed convergence for the pressure (Mayer) series implied
/// by the corresponding coefficient bound.
pub fn radius(beta: f64, b: f64, integral: f64, which: RadiusBound) -> Result<f64, BoundsError> {
    let denom = match which {
        RadiusBound::PenroseRuelle => (2.0 * beta * b + 1.0).exp() * integral,
        RadiusBound::TreeGraph => (beta * b + 1.0).exp() * integral,
    };
    if denom == 0.0 || denom.is_nan() {
        return Err(BoundsError::DegenerateRadius);
    }
    Ok(denom.recip())
}

/// g(u) together with where the maximum sits.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GEvaluation {
    pub u: f64,
    pub value: f64,
    pub argmax: f64,
}

/// g(u) = max_{0<w<1} ((1+u)e^{−w} − 1) w / u for u ≥ 1.
///
/// Evaluated as w(e^{−w}(1 + 1/u) − 1/u), which survives u up to and
/// including +∞ (where g → 1/e). The maximand is strictly concave in w, so a
/// coarse grid plus bisection on the derivative pins the maximum down hard.
pub fn g_function(u: f64) -> Result<GEvaluation, BoundsError> {
    if !(u >= 1.0) {
        return Err(BoundsError::GDomain { u });
    }
    let inv = if u.is_infinite() { 0.0 } else { u.recip() };
    let h = |w: f64| w * ((-w).exp() * (1.0 + inv) - inv);
    let dh = |w: f64| (1.0 + inv) * (-w).exp() * (1.0 - w) - inv;

    let mut best_k = 1usize;
    let mut best = f64::NEG_INFINITY;
    for k in 1..=999 {
        let v = h(k as f64 * 1e-3);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let mut lo = (best_k as f64 - 1.0) * 1e-3;
    let mut hi = ((best_k as f64 + 1.0) * 1e-3).min(1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if dh(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let argmax = 0.5 * (lo + hi);
    Ok(GEvaluation {
        u,
        value: h(argmax),
        argmax,
    })
}

/// Lower bound on the virial-series convergence radius.
pub fn virial_radius(
    beta: f64,
    b: f64,
    c: f64,
    c_hat: f64,
    which: VirialBound,
    literal: bool,
) -> Result<f64, BoundsError> {
    let (u, integral) = match which {
        VirialBound::LebowitzPenrose => {
            ((2.0 * beta * b).exp(), if literal { c_hat } else { c })
        }
        VirialBound::TreeGraph => ((beta * b).exp(), c_hat),
    };
    let g = g_function(u)?.value;
    let denom = u * integral;
    if denom == 0.0 || denom.is_nan() {
        return Err(BoundsError::DegenerateRadius);
    }
    Ok(g / denom)
}

/// Everything the `radii` command prints, in one flat record. Field order is
/// the CSV column order.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub potential: String,
    pub beta: f64,
    pub stability_constant: f64,
    pub c: f64,
    pub c_hat: f64,
    pub r_pr: f64,
    pub r_star: f64,
    /// r_star / r_pr, computed as e^{βB} C / Ĉ.
    pub mayer_ratio: f64,
    pub g_old: f64,
    pub g_new: f64,
    pub r_lp: f64,
    pub r_virial_star: f64,
    pub c_error: f64,
    pub chat_error: f64,
}

impl BoundsReport {
    pub fn csv_header() -> &'static str {
        "potential,beta,stability_constant,c,c_hat,r_pr,r_star,mayer_ratio,\
         g_old,g_new,r_lp,r_virial_star,c_error,chat_error"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.potential,
            self.beta,
            self.stability_constant,
            self.c,
            self.c_hat,
            self.r_pr,
            self.r_star,
            self.mayer_ratio,
            self.g_old,
            self.g_new,
            self.r_lp,
            self.r_virial_star,
            self.c_error,
            self.chat_error
        )
    }
}

/// Compute both integrals and every radius for one potential at one β.
/// `literal_lp` switches the classical virial radius from C to Ĉ.
pub fn bounds_report(
    p: &PairPotential,
    beta: f64,
    literal_lp: bool,
) -> Result<BoundsReport, BoundsError> {
    let b = p.stability_value()?;
    let c = quad_c(p, beta)?;
    let chat = quad_chat(p, beta)?;
    let r_pr = radius(beta, b, c.value, RadiusBound::PenroseRuelle)?;
    let r_star = radius(beta, b, chat.value, RadiusBound::TreeGraph)?;
    let g_old = g_function((2.0 * beta * b).exp())?.value;
    let g_new = g_function((beta * b).exp())?.value;
    let r_lp = virial_radius(
        beta,
        b,
        c.value,
        chat.value,
        VirialBound::LebowitzPenrose,
        literal_lp,
    )?;
    let r_virial_star =
        virial_radius(beta, b, c.value, chat.value, VirialBound::TreeGraph, false)?;
    Ok(BoundsReport {
        potential: p.name().to_string(),
        beta,
        stability_constant: b,
        c: c.value,
        c_hat: chat.value,
        r_pr,
        r_star,
        mayer_ratio: (beta * b).exp() * c.value / chat.value,
        g_old,
        g_new,
        r_lp,
        r_virial_star,
        c_error: c.error,
        chat_error: chat.error,
    })
}

/// Monte Carlo estimate of a finite-box Mayer coefficient against its bound.
#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub n: usize,
    pub beta: f64,
    pub samples: u64,
    pub seed: u64,
    pub box_half_width: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub within_bound: bool,
    /// true when the potential still has weight β|V| > 1e−6 at the box edge,
    /// i.e. the box is too small to stand in for infinite volume
    pub range_warning: bool,
}

fn check_mc_params(box_half_width: f64, samples: u64) -> Result<(), BoundsError> {
    if !(box_half_width.is_finite() && box_half_width > 0.0) {
        return Err(BoundsError::BadParameter {
            name: "box_half_width",
            reason: "must be positive and finite",
        });
    }
    if samples < 2 {
        return Err(BoundsError::BadParameter {
            name: "samples",
            reason: "need at least 2 samples for a variance",
        });
    }
    Ok(())
}

/// Mean/variance accumulation shared by the two estimators. The sample space
/// is split into fixed chunks, each driven by its own counter-based RNG
/// stream, so the result is bit-identical for every worker count.
fn mc_mean<F>(samples: u64, seed: u64, eval: F) -> (f64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let parts = exec::chunked(samples, |range| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(range.start);
        let mut sum = Neumaier::new();
        let mut sumsq = Neumaier::new();
        for _ in range {
            let x = eval(&mut rng);
            sum.add(x);
            sumsq.add(x * x);
        }
        (sum, sumsq)
    });
    let mut sum = Neumaier::new();
    let mut sumsq = Neumaier::new();
    for (s, s2) in parts {
        sum.add(s.total());
        sumsq.add(s2.total());
    }
    let nn = samples as f64;
    let mean = sum.total() / nn;
    let var = ((sumsq.total() - nn * mean * mean) / (nn - 1.0)).max(0.0);
    (mean, (var / nn).sqrt())
}

/// Estimate c_n = (1/n!) ∫_{Λ^{n−1}} φ^T(0, x₂, …, x_n) dx over the box
/// Λ = [−L, L]^d and compare |c_n| with the tree-graph bound.
pub fn mayer_cn_mc(
    p: &PairPotential,
    beta: f64,
    n: usize,
    box_half_width: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, BoundsError> {
    if !(2..=4).contains(&n) {
        return Err(BoundsError::BadParameter {
            name: "n",
            reason: "Monte Carlo coefficients cover n in 2..=4",
        });
    }
    check_mc_params(box_half_width, samples)?;
    let b = p.stability_value()?;
    let chat = quad_chat(p, beta)?;
    let bound = mayer_bound(n, beta, b, chat.value, RadiusBound::TreeGraph)?;

    let d = p.dimension();
    let l = box_half_width;
    let (mean, sigma) = mc_mean(samples, seed, |rng| {
        let mut pts = Vec::with_capacity(n);
        pts.push(vec![0.0; d]);
        for _ in 1..n {
            pts.push((0..d).map(|_| rng.random_range(-l..=l)).collect());
        }
        let c = Configuration::new(pts).expect("sampled coordinates are finite");
        ursell::ursell_direct(p, beta, &c).expect("n and dimension already validated")
    });
    let scale = (2.0 * l).powi((d * (n - 1)) as i32) / factorial(n);
    let estimate = mean * scale;
    let std_error = sigma * scale;
    let edge_weight = p.evaluate_radial(l).abs().as_f64();
    Ok(McEstimate {
        n,
        beta,
        samples,
        seed,
        box_half_width: l,
        estimate,
        std_error,
        bound,
        within_bound: estimate.abs() <= bound + 3.0 * std_error,
        range_warning: beta * edge_weight > 1e-6,
    })
}

/// Spanning-tree shapes for the bare tree-integral check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeShape {
    Star,
    Path,
}

impl TreeShape {
    pub fn edges(self, n: usize) -> Vec<[usize; 2]> {
        match self {
            TreeShape::Star => (1..n).map(|k| [0, k]).collect(),
            TreeShape::Path => (1..n).map(|k| [k - 1, k]).collect(),
        }
    }
}

/// Monte Carlo check of one tree integral against |Λ| Ĉ^{n−1}.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma3Report {
    pub n: usize,
    pub beta: f64,
    pub samples: u64,
    pub seed: u64,
    pub box_half_width: f64,
    pub tree_edges: Vec<[usize; 2]>,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub ok: bool,
}

/// ∫_{Λ^n} Π_{{i,j}∈τ} (1 − e^{−β|V(x_i−x_j)|}) dx ≤ |Λ| Ĉ(β)^{n−1},
/// estimated by direct sampling for a star or path tree on n ∈ {3, 4}.
pub fn lemma3_check(
    p: &PairPotential,
    beta: f64,
    n: usize,
    shape: TreeShape,
    box_half_width: f64,
    samples: u64,
    seed: u64,
) -> Result<Lemma3Report, BoundsError> {
    if !(3..=4).contains(&n) {
        return Err(BoundsError::BadParameter {
            name: "n",
            reason: "the tree-integral check covers n in 3..=4",
        });
    }
    check_mc_params(box_half_width, samples)?;
    let chat = quad_chat(p, beta)?;
    let edges = shape.edges(n);

    let d = p.dimension();
    let l = box_half_width;
    let (mean, sigma) = mc_mean(samples, seed, |rng| {
        let c = Configuration::random_in_box(n, d, l, rng);
        edges
            .iter()
            .map(|&[i, j]| {
                pair_energy(p, &c, i, j)
                    .expect("sampled coordinates are finite")
                    .hat_factor(beta)
            })
            .product()
    });
    let volume = (2.0 * l).powi(d as i32);
    let scale = volume.powi(n as i32);
    let estimate = mean * scale;
    let std_error = sigma * scale;
    let bound = volume * chat.value.powi(n as i32 - 1);
    Ok(Lemma3Report {
        n,
        beta,
        samples,
        seed,
        box_half_width: l,
        tree_edges: edges,
        estimate,
        std_error,
        bound,
        ok: estimate <= bound + 3.0 * std_error,
    })
}
