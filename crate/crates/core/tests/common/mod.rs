#![allow(dead_code)]

use nflp::flp::{nflp_log_abs_pdf, pi_weight};
use nflp::{Dataset, MixtureShape, Solution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval:
/// the interval with the largest error estimate is bisected until the summed
/// estimate falls below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    for _ in 0..5000 {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= tol {
            break;
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (a, b, _, _) = parts.swap_remove(worst);
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        parts.push((a, m, v1, e1));
        parts.push((m, b, v2, e2));
    }
    parts.iter().map(|p| p.2).sum()
}

/// Total mass of a density of `ln|Z|` given on the real line, where the part
/// beyond `ln τ` decays like a power of `ℓ`. The tail is integrated in
/// `t = ln ℓ`, where it decays exponentially at rate `λ`.
pub fn log_abs_mass<F: Fn(f64) -> f64>(density: F, shape: &MixtureShape<f64>) -> f64 {
    let ln_tau = shape.tau.ln();
    let central = integrate(&density, -40.0, ln_tau, 1e-12);
    let t0 = ln_tau.ln();
    let t1 = (t0 + 40.0 / shape.lambda.max(1e-3)).min(700.0);
    let tail = integrate(|t: f64| density(t.exp()) * t.exp(), t0, t1, 1e-12);
    central + tail
}

pub fn nflp_mass(shape: &MixtureShape<f64>) -> f64 {
    log_abs_mass(|l| nflp_log_abs_pdf(l, shape), shape)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Intercept plus `p − 1` normal covariates, `y = xᵀβ + ε` with `ε ~ N(0, 1)`;
/// the first `outliers` responses are shifted by `shift`.
pub fn regression_sample(rng: &mut ChaCha8Rng, n: usize, p: usize, outliers: usize, shift: f64) -> Dataset<f64> {
    let beta: Vec<f64> = (0..p).map(|j| 1.0 - 0.5 * j as f64).collect();
    let cols: Vec<(String, Vec<f64>)> = (1..p).map(|j| (format!("x{j}"), (0..n).map(|_| normal(rng)).collect())).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let mut v = beta[0] + normal(rng);
            for (j, (_, c)) in cols.iter().enumerate() {
                v += beta[j + 1] * c[i];
            }
            if i < outliers {
                v += shift;
            }
            v
        })
        .collect();
    let named: Vec<(&str, Vec<f64>)> = cols.iter().map(|(n, c)| (n.as_str(), c.clone())).collect();
    Dataset::with_intercept(&named, y).unwrap()
}

/// Largest violation of the four fixed-point equations, each on its own
/// scale: `ω̂ − Σπ/n`, the weighted normal equations relative to `‖XᵀD_πy‖`,
/// the relative error in `σ̂²`, and `π − π_ω̂(r)`.
pub fn fixed_point_residuals(sol: &Solution<f64>, data: &Dataset<f64>) -> [f64; 4] {
    let n = data.n() as f64;
    let p = data.p();
    let sum_pi: f64 = sol.pi.iter().sum();
    let e_omega = (sol.omega_hat - sum_pi / n).abs();

    let res = data.residuals(&sol.beta_hat);
    let mut scale = 0.0f64;
    let mut e_beta = 0.0f64;
    for j in 0..p {
        let mut g = 0.0;
        let mut s = 0.0;
        for i in 0..data.n() {
            let x = data.x()[(i, j)];
            g += sol.pi[i] * x * res[i];
            s += sol.pi[i] * (x * data.y()[i]).abs();
        }
        e_beta = e_beta.max(g.abs());
        scale = scale.max(s);
    }
    let e_beta = e_beta / scale.max(1.0);

    let ss: f64 = res.iter().zip(&sol.pi).map(|(r, w)| w * r * r).sum();
    let s2 = ss / (sum_pi - p as f64);
    let e_sigma = (sol.sigma_hat * sol.sigma_hat - s2).abs() / s2;

    let e_pi = res
        .iter()
        .zip(&sol.pi)
        .map(|(r, w)| (pi_weight(r / sol.sigma_hat, &sol.shape) - w).abs())
        .fold(0.0, f64::max);
    [e_omega, e_beta, e_sigma, e_pi]
}
