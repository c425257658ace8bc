//! Independent transcriptions of the bound formulas plus random parameter draws that
//! compare them against the library. Written from the displays, not from the library code:
//! different grouping (κ through β_{r,n}, relative rates through logs of the rates,
//! closed-form ω integrals for exponential rates).

#![allow(dead_code)]

use diffopt_core::bounds::{
    alpha_tilde_omega, beta_rn, c_constants, kappa_r, omega_integral, omega_r, semigroup_constants, stein_factors,
    step_threshold, suboptimality_entropy_form, suboptimality_generalized_gibbs, CoefficientConstants, SteinInputs,
};
use diffopt_core::verify::{DissipativityConstants, ExponentialRate, GrowthConstants, RateModel};
use diffopt_core::{Provenance, SmoothnessEstimate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod oracle {
    /// (n)!! = n(n−2)(n−4)···, with (−1)!! = 0!! = 1.
    pub fn double_factorial(n: i64) -> f64 {
        (1..=n.max(0)).rev().step_by(2).map(|k| k as f64).product()
    }

    pub fn alpha_tilde(r: u8, alpha: f64, lambda_a: f64, n: u32) -> f64 {
        match r {
            1 => alpha,
            _ => (alpha - n as f64 * lambda_a / 4.0).max(0.0),
        }
    }

    pub fn beta_rn(alpha: f64, beta: f64, lambda_a: f64, r: u8, n: u32) -> f64 {
        let at = alpha_tilde(r, alpha, lambda_a, n);
        let (nf, rf) = (n as f64, r as f64);
        beta + nf * lambda_a / 8.0 + at / 2.0 * ((nf * lambda_a + 6.0 * rf * beta) / (2.0 * rf * at)).powf(nf)
    }

    pub fn kappa(n: u32, alpha: f64, beta: f64, lambda_a: f64, r: u8) -> f64 {
        2.0 + 2.0 * beta_rn(alpha, beta, lambda_a, r, n) / alpha
    }

    pub fn step_threshold(alpha: f64, lambda_b: f64, lambda_sigma: f64, n_e: u32) -> f64 {
        let base = 1.0 + lambda_b / 2.0 + lambda_sigma / 2.0;
        let v = alpha / (2.0 * double_factorial(n_e as i64 - 1) * base.powf(n_e as f64));
        if v < 1.0 {
            v
        } else {
            1.0
        }
    }

    pub fn c123(z: [f64; 4], lb: f64, ls: f64, n: u32, n_e: u32) -> [f64; 3] {
        let nf = n as f64;
        let t = 1.0 + 3f64.powf(nf - 1.0);
        let c1 = 6.0 * z[0];
        let c2 = (2.0 * z[1] * lb.powf(2.0) + z[2] * lb * ls.powf(2.0) + z[3] * t * ls.powf(4.0)) / 16.0;
        let c3 = (z[2] * lb.powf(3.0)
            + z[3] * lb.powf(4.0) * t
            + 4.0 * z[3] * 1.5f64.powf(nf) / nf.powf(4.0)
                * (lb.powf(4.0) + (n_e as f64).powf(2.0) * ls.powf(4.0))
                * (lb.powf(nf) + double_factorial(n as i64) * ls.powf(nf)))
            / 48.0;
        [c1, c2, c3]
    }

    /// ϱ₁, ϱ₂ as plain exponentials (A, k) ↦ A e^{−kt/2}.
    #[derive(Debug, Clone, Copy)]
    pub struct Rates {
        pub a1: f64,
        pub k1: f64,
        pub a2: f64,
        pub k2: f64,
    }

    impl Rates {
        pub fn rho1(&self, t: f64) -> f64 {
            self.a1 * (-self.k1 * t / 2.0).exp()
        }

        pub fn rho2(&self, t: f64) -> f64 {
            self.a2 * (-self.k2 * t / 2.0).exp()
        }

        /// ϱ̃_r(t) from the defining log ratios (t > 0).
        pub fn relative(&self, r: u8, t: f64) -> f64 {
            match r {
                1 => (self.rho2(t) / self.rho1(t)).ln(),
                _ => (self.rho1(t) / (self.rho1(0.0) * self.rho2(t))).ln() / (self.rho1(t) / self.rho1(0.0)).ln(),
            }
        }
    }

    pub fn omega(t: f64, rates: &Rates, lambda_a: f64, beta: f64, n: u32, r: u8, at: f64) -> f64 {
        let (nf, rf) = (n as f64, r as f64);
        let rel = rates.relative(r, t).max(1.0);
        let brace = rel * 2.0 * lambda_a * nf + 3.0 * rf * beta;
        1.0 + 4.0 * rates.rho1(t).powf(1.0 / rf - 1.0) * rates.rho1(0.0).sqrt() * (1.0 + 2.0 / at.powf(nf) * brace.powf(nf))
    }

    /// Rates whose relative rate never exceeds 1, so ω_r(t) = 1 + K e^{λt}.
    pub fn omega_flat_k(rates: &Rates, lambda_a: f64, beta: f64, n: u32, r: u8, at: f64) -> (f64, f64) {
        let (nf, rf) = (n as f64, r as f64);
        let k = 4.0 * rates.a1.powf(1.0 / rf - 1.0) * rates.a1.sqrt()
            * (1.0 + 2.0 * ((2.0 * lambda_a * nf + 3.0 * rf * beta) / at).powf(nf));
        (k, rates.k1 / 2.0 * (1.0 - 1.0 / rf))
    }

    pub fn omega_flat(t: f64, rates: &Rates, lambda_a: f64, beta: f64, n: u32, r: u8, at: f64) -> f64 {
        let (k, lam) = omega_flat_k(rates, lambda_a, beta, n, r, at);
        1.0 + k * (lam * t).exp()
    }

    /// ∫₀^∞ A₁e^{−k₁t/2}(1 + K e^{λ(t+s)})dt = A₁(2/k₁ + K e^{λs}·2r/k₁).
    pub fn omega_integral_flat(s: f64, rates: &Rates, lambda_a: f64, beta: f64, n: u32, r: u8, at: f64) -> f64 {
        let (k, lam) = omega_flat_k(rates, lambda_a, beta, n, r, at);
        rates.a1 * (2.0 / rates.k1 + k * (lam * s).exp() * 2.0 * r as f64 / rates.k1)
    }

    /// μ_i(b), μ_i(σ), φ_i(σ) for i = 1..4 (index i−1).
    #[derive(Debug, Clone, Copy)]
    pub struct Coeffs {
        pub mu_b: [f64; 4],
        pub mu_s: [f64; 4],
        pub phi_s: [f64; 4],
    }

    impl Coeffs {
        pub fn v(&self, i: usize, n: i32) -> f64 {
            self.mu_b[i - 1] + n as f64 * self.mu_s[i - 1] * self.mu_s[i - 1] + self.phi_s[i - 1] * self.phi_s[i - 1]
        }

        /// V with |n|: bounds the magnitude of every term of a signed V.
        pub fn v_abs(&self, i: usize, n: i32) -> f64 {
            self.v(i, n.abs())
        }
    }

    fn frac(num: f64, den: f64) -> f64 {
        if num == 0.0 && den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// (γ_{i,n}, θ_{i,n}).
    pub fn gamma_theta(c: &Coeffs, i: usize, n: i32) -> (f64, f64) {
        gamma_theta_with(|i, m| c.v(i, m), i, n)
    }

    pub fn gamma_theta_with(v: impl Fn(usize, i32) -> f64, i: usize, n: i32) -> (f64, f64) {
        let nf = n as f64;
        match i {
            1 => (1.0, nf * v(1, n - 2)),
            2 => (frac(v(2, n - 2), nf * v(1, 2 * n - 2)), 3.0 * nf * v(1, 2 * n - 2) + nf * v(2, n - 2)),
            3 => (
                frac(15.0 * v(2, n - 2) + 5.0 * v(3, n - 2), 4.0 * nf * v(1, 4 * n - 2)),
                7.0 * nf * v(1, 3 * n - 2) + 10.0 * nf * v(2, n - 2) + 3.0 * nf * v(3, n - 2),
            ),
            _ => {
                assert_eq!(n, 2, "only γ_{{4,2}} is defined");
                (
                    frac(v(4, 0) + 6.0 * v(3, 0) + 5.0 * v(2, 0), 16.0 * v(1, 6)),
                    31.0 * v(1, 5) + 27.0 * v(2, 2) + 12.0 * v(3, 1) + v(4, 0),
                )
            }
        }
    }

    pub struct ZetaInputs {
        pub rates: Rates,
        pub coeffs: Coeffs,
        /// π̃_{i,0}(σ), i = 1..3.
        pub pi_s: [f64; 3],
        /// π̃_{i,0}(σ⁻¹), i = 0..2.
        pub pi_si: [f64; 3],
        pub mu_tilde: f64,
        /// π̃_{i,n}(f), i = 1..4.
        pub pi_f: [f64; 4],
        pub alpha: f64,
        pub beta: f64,
        pub lambda_a: f64,
        pub r: u8,
        pub n: u32,
    }

    /// ζ₁..ζ₄ from the final displays, for rates with relative rate ≤ 1.
    pub fn zetas(z: &ZetaInputs) -> [f64; 4] {
        let (alpha, beta, la, r, n) = (z.alpha, z.beta, z.lambda_a, z.r, z.n);
        let at = if r == 1 { alpha } else { alpha - n as f64 * la };
        let w = |t| omega_flat(t, &z.rates, la, beta, n, r, at);
        let int = |s| omega_integral_flat(s, &z.rates, la, beta, n, r, at);
        let b6 = 1.0 + (beta_rn(alpha, beta, la, r, 6 * n) / alpha).powf(1.0 / 6.0);
        let g = |i, m| gamma_theta(&z.coeffs, i, m).0;
        let th = |i, m| gamma_theta(&z.coeffs, i, m).1;
        let r0 = z.rates.rho1(0.0);
        let max = |s: &[f64]| s.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
        let mt = z.mu_tilde;

        let zeta1 = mt * int(0.0);

        let xi2 = 4.0 * mt * b6 * r0 * w(1.0) * z.pi_si[0] * (1.0 + g(2, 2).sqrt() + z.coeffs.mu_s[0]) * (th(2, 2) / 2.0).exp();
        let zeta2 = 2.0 * xi2 * r0 * w(0.0) + xi2 * int(0.0);

        let xi3 = 4.0 * mt * z.pi_s[0] * max(&z.pi_s[0..2]) * z.pi_si[0] * max(&z.pi_si[0..2]) * r0 * w(1.0)
            * (th(3, 4) / 2.0).exp()
            * (7.0 + 7.0 * g(2, 2).powf(0.5) + g(2, 3).powf(1.0 / 3.0) + g(3, 2).powf(0.5))
            * b6
            * b6;
        let zeta3 = 4.0 * max(&z.pi_f[0..3]) * (1.0 + 3.0 * g(2, 3).powf(1.0 / 3.0) + g(3, 2).powf(0.5))
            * (th(3, 4) / 2.0).exp()
            * b6
            + xi3 * int(1.0);

        let g22 = g(2, 2);
        let g23 = g(2, 3);
        let g24 = g(2, 4);
        let g26 = g(2, 6);
        let xi4 = 4.0 * mt * z.pi_s[0] * z.pi_s[0] * max(&z.pi_s[0..3]) * z.pi_si[0] * z.pi_si[0] * max(&z.pi_si[0..3])
            * th(4, 2).exp()
            * r0
            * w(1.0)
            * b6.powf(3.0)
            * (42.0 + 32.0 * g22.powf(0.5) + 6.0 * g22 + 2.0 * g23.powf(1.0 / 3.0) + 3.0 * g23.powf(2.0 / 3.0)
                + 24.0 * g24.powf(0.25)
                + 3.0 * g24.powf(0.5)
                + 12.0 * g26.powf(1.0 / 6.0)
                + 5.0 * g(3, 2).powf(0.5)
                + 5.0 * g(3, 3).powf(1.0 / 3.0)
                + g(4, 2).powf(0.5)
                + 6.0 * g22.powf(0.5) * g26.powf(1.0 / 6.0));
        let zeta4 = 6.0 * max(&z.pi_f)
            * (1.0 + 6.0 * g24.powf(0.25) + 4.0 * g23 + 3.0 * g23.powf(2.0 / 3.0) + 4.0 * g(3, 3).powf(1.0 / 3.0)
                + g(4, 2).powf(0.5))
            * (3.0 * th(4, 2) / 2.0).exp()
            * b6
            + xi4 * int(2.0);
        [zeta1, zeta2, zeta3, zeta4]
    }

    /// [(d/(2γ))((1/θ)log(2γ/d) + 1 + log β + log μ₂ − log 2α)]^{1/θ}.
    pub fn subopt_gibbs(gamma: f64, theta: f64, d: usize, alpha: f64, beta: f64, mu2: f64) -> f64 {
        let df = d as f64;
        let s = df / (2.0 * gamma) * ((2.0 * gamma / df).ln() / theta + 1.0 + beta.ln() + mu2.ln() - (2.0 * alpha).ln());
        s.powf(1.0 / theta)
    }

    /// Both terms of (d/(2θ))log(2C/d) + (d/2)(1 + log β − log α), returned separately.
    pub fn subopt_entropy_terms(c: f64, theta: f64, d: usize, alpha: f64, beta: f64) -> (f64, f64) {
        let df = d as f64;
        (df / (2.0 * theta) * (2.0 * c / df).ln(), df / 2.0 * (1.0 + beta.ln() - alpha.ln()))
    }
}

/// Worst relative disagreement over a batch of draws.
#[derive(Debug, Clone)]
pub struct OracleCheck {
    pub name: &'static str,
    pub draws: usize,
    pub max_rel: f64,
    pub failures: Vec<String>,
}

impl OracleCheck {
    fn new(name: &'static str) -> Self {
        Self { name, draws: 0, max_rel: 0.0, failures: Vec::new() }
    }

    /// Records |lib − oracle| / scale (scale defaults to the larger magnitude).
    fn record(&mut self, lib: f64, want: f64, scale: Option<f64>, ctx: impl FnOnce() -> String) {
        let scale = scale.unwrap_or_else(|| lib.abs().max(want.abs()));
        let rel = if lib == want { 0.0 } else { (lib - want).abs() / scale };
        let rel = if rel.is_nan() { f64::INFINITY } else { rel };
        if rel > self.max_rel {
            self.max_rel = rel;
        }
        if rel > TOL && self.failures.len() < 5 {
            self.failures.push(format!("lib {lib:e} vs oracle {want:e} ({})", ctx()));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.max_rel <= TOL
    }
}

pub const TOL: f64 = 1e-10;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

pub fn check_kappa_beta(draws: usize, seed: u64) -> Vec<OracleCheck> {
    let mut rng = rng(seed);
    let (mut kappa, mut beta_c) = (OracleCheck::new("kappa_r"), OracleCheck::new("beta_rn"));
    for _ in 0..draws {
        let r: u8 = rng.random_range(1..=2);
        let n: u32 = rng.random_range(1..=12);
        let alpha = log_uniform(&mut rng, 0.05, 50.0);
        let beta = log_uniform(&mut rng, 1e-3, 20.0);
        // r = 2 needs α − nλ_a/4 > 0.
        let lambda_a = rng.random_range(0.0..0.95) * if r == 2 { 4.0 * alpha / n as f64 } else { 10.0 };
        let ctx = || format!("r={r} n={n} α={alpha} β={beta} λ_a={lambda_a}");
        kappa.record(kappa_r(n, alpha, beta, lambda_a, r).unwrap(), oracle::kappa(n, alpha, beta, lambda_a, r), None, ctx);
        beta_c.record(beta_rn(alpha, beta, lambda_a, r, n).unwrap(), oracle::beta_rn(alpha, beta, lambda_a, r, n), None, ctx);
        kappa.draws += 1;
        beta_c.draws += 1;
    }
    vec![kappa, beta_c]
}

pub fn check_step_threshold(draws: usize, seed: u64) -> OracleCheck {
    let mut rng = rng(seed);
    let mut out = OracleCheck::new("step_threshold");
    for _ in 0..draws {
        let alpha = log_uniform(&mut rng, 1e-3, 1e3);
        let lb = log_uniform(&mut rng, 1e-3, 50.0);
        let ls = log_uniform(&mut rng, 1e-3, 50.0);
        let n_e = 2 * rng.random_range(1..=6);
        out.record(step_threshold(alpha, lb, ls, n_e), oracle::step_threshold(alpha, lb, ls, n_e), None, || {
            format!("α={alpha} λ_b={lb} λ_σ={ls} n_e={n_e}")
        });
        out.draws += 1;
    }
    out
}

pub fn check_c_constants(draws: usize, seed: u64) -> OracleCheck {
    let mut rng = rng(seed);
    let mut out = OracleCheck::new("c1-c3");
    for _ in 0..draws {
        let z: [f64; 4] = std::array::from_fn(|_| log_uniform(&mut rng, 1e-3, 1e3));
        let lb = log_uniform(&mut rng, 1e-2, 20.0);
        let ls = log_uniform(&mut rng, 1e-2, 20.0);
        let n: u32 = rng.random_range(1..=5);
        let n_e = n + 4 + (n % 2) + 2 * rng.random_range(0..=2);
        let got = c_constants(&z, lb, ls, n, n_e).unwrap();
        let want = oracle::c123(z, lb, ls, n, n_e);
        for (g, w) in [got.c_1, got.c_2, got.c_3].into_iter().zip(want) {
            out.record(g, w, None, || format!("ζ={z:?} λ_b={lb} λ_σ={ls} n={n} n_e={n_e}"));
        }
        out.draws += 1;
    }
    out
}

fn draw_rates(rng: &mut ChaCha8Rng) -> oracle::Rates {
    oracle::Rates {
        a1: log_uniform(rng, 1.0, 5.0),
        k1: log_uniform(rng, 0.1, 10.0),
        a2: log_uniform(rng, 0.2, 5.0),
        k2: log_uniform(rng, 0.1, 10.0),
    }
}

fn rate_model(r: &oracle::Rates) -> RateModel {
    RateModel::with_l2(ExponentialRate::new(r.a1, r.k1), ExponentialRate::new(r.a2, r.k2), "oracle draw")
}

pub fn check_omega(draws: usize, seed: u64) -> Vec<OracleCheck> {
    let mut rng = rng(seed);
    let (mut point, mut integral) = (OracleCheck::new("omega_r"), OracleCheck::new("omega_r integral"));
    for _ in 0..draws {
        let rates = draw_rates(&mut rng);
        let model = rate_model(&rates);
        let r: u8 = rng.random_range(1..=2);
        let n: u32 = rng.random_range(1..=4);
        let beta = log_uniform(&mut rng, 1e-3, 5.0);
        let lambda_a = rng.random_range(0.0..3.0);
        let at = log_uniform(&mut rng, 0.1, 10.0);
        let t = rng.random_range(0.02..10.0);
        point.record(
            omega_r(t, &model, lambda_a, beta, n, r, at).unwrap(),
            oracle::omega(t, &rates, lambda_a, beta, n, r, at),
            None,
            || format!("{rates:?} r={r} n={n} t={t}"),
        );
        point.draws += 1;

        // Integrals: rates with ϱ̃_r ≤ 1 everywhere (A₂ ≤ 1 ≤ A₁, k₂ ≥ k₁) have a closed form.
        let flat = oracle::Rates {
            a1: rates.a1,
            k1: rates.k1,
            a2: rng.random_range(0.2..1.0),
            k2: rates.k1 * rng.random_range(1.0..3.0),
        };
        let model = rate_model(&flat);
        let s = [0.0, 1.0, 2.0][rng.random_range(0..3)];
        integral.record(
            omega_integral(s, &model, lambda_a, beta, n, r, at).unwrap(),
            oracle::omega_integral_flat(s, &flat, lambda_a, beta, n, r, at),
            None,
            || format!("{flat:?} r={r} n={n} shift={s}"),
        );
        integral.draws += 1;
    }
    vec![point, integral]
}

fn draw_coefficients(rng: &mut ChaCha8Rng, hi: f64) -> (oracle::Coeffs, CoefficientConstants) {
    // Occasionally zero out every coefficient above first order (0/0 conventions).
    let higher_zero = rng.random_bool(0.15);
    let mut draw = |i: usize| if i > 0 && higher_zero { 0.0 } else { rng.random_range(0.0..hi) };
    let mu_b: [f64; 4] = std::array::from_fn(|i| if i == 0 { 0.05 + draw(i) } else { draw(i) });
    let mu_s: [f64; 4] = std::array::from_fn(&mut draw);
    let phi_s: [f64; 4] = std::array::from_fn(&mut draw);
    let pi_sigma: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.1..2.0));
    let pi_sigma_inv: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.1..2.0));
    (
        oracle::Coeffs { mu_b, mu_s, phi_s },
        CoefficientConstants { mu_b, mu_sigma: mu_s, phi_sigma: phi_s, pi_sigma, pi_sigma_inv, provenance: Provenance::Analytic },
    )
}

pub fn check_semigroup_tables(draws: usize, seed: u64) -> Vec<OracleCheck> {
    let mut rng = rng(seed);
    let (mut gamma, mut theta) = (OracleCheck::new("gamma table"), OracleCheck::new("theta table"));
    for _ in 0..draws {
        let (oc, lc) = draw_coefficients(&mut rng, 3.0);
        let n: u32 = rng.random_range(1..=6);
        let table = semigroup_constants(&lc, n).unwrap();
        for (key, g) in &table.gamma_c {
            let (i, m) = key.split_once(',').unwrap();
            let (i, m): (usize, i32) = (i.parse().unwrap(), m.parse().unwrap());
            let (wg, wt) = oracle::gamma_theta(&oc, i, m);
            gamma.record(*g, wg, None, || format!("({i},{m}) {oc:?}"));
            // θ mixes signs through V_{1,−1}; compare on the magnitude of its terms.
            let scale = oracle::gamma_theta_with(|i, m| oc.v_abs(i, m), i, m).1.max(f64::MIN_POSITIVE);
            theta.record(table.theta_c[key], wt, Some(scale), || format!("({i},{m}) {oc:?}"));
        }
        gamma.draws += 1;
        theta.draws += 1;
    }
    vec![gamma, theta]
}

pub fn check_zetas(draws: usize, seed: u64) -> OracleCheck {
    let mut rng = rng(seed);
    let mut out = OracleCheck::new("zeta_1-zeta_4");
    for _ in 0..draws {
        let (oc, lc) = draw_coefficients(&mut rng, 0.4);
        let r: u8 = rng.random_range(1..=2);
        let n: u32 = rng.random_range(1..=2);
        let alpha = log_uniform(&mut rng, 0.5, 20.0);
        let beta = log_uniform(&mut rng, 0.01, 5.0);
        // Keeps α − nλ_a and α − 6nλ_a/4 positive.
        let lambda_a = rng.random_range(0.0..0.5) * alpha / (2.0 * n as f64);
        let lambda_b = log_uniform(&mut rng, 0.1, 10.0);
        let lambda_sigma = log_uniform(&mut rng, 0.1, 10.0);
        let a1 = log_uniform(&mut rng, 1.0, 3.0);
        let k1 = log_uniform(&mut rng, 0.5, 5.0);
        let rates = oracle::Rates { a1, k1, a2: rng.random_range(0.3..1.0), k2: k1 * rng.random_range(1.0..2.0) };
        let mu_tilde = log_uniform(&mut rng, 0.1, 10.0);
        let pi_f: [f64; 4] = std::array::from_fn(|_| log_uniform(&mut rng, 0.1, 10.0));
        let inputs = oracle::ZetaInputs {
            rates,
            coeffs: oc,
            pi_s: lc.pi_sigma,
            pi_si: lc.pi_sigma_inv,
            mu_tilde,
            pi_f,
            alpha,
            beta,
            lambda_a,
            r,
            n,
        };
        let want = oracle::zetas(&inputs);
        let model = rate_model(&rates);
        let growth = GrowthConstants::analytic(lambda_b, lambda_sigma, lambda_a, r);
        let diss = DissipativityConstants::analytic(alpha, beta);
        let smooth = SmoothnessEstimate::analytic(n, mu_tilde, pi_f, [f64::INFINITY; 3]);
        let got = stein_factors(&SteinInputs {
            rate: &model,
            growth: &growth,
            dissipativity: &diss,
            smoothness: &smooth,
            coefficients: &lc,
            n,
        })
        .unwrap();
        let at_lib = alpha_tilde_omega(r, alpha, lambda_a, n, &model).unwrap();
        let at_want = if r == 1 { alpha } else { alpha - n as f64 * lambda_a };
        out.record(at_lib, at_want, None, || format!("α̃ r={r} n={n}"));
        for (i, (g, w)) in got.zeta().into_iter().zip(want).enumerate() {
            out.record(g, w, None, || format!("ζ_{} r={r} n={n} {rates:?}", i + 1));
        }
        out.draws += 1;
    }
    out
}

pub fn check_suboptimality(draws: usize, seed: u64) -> Vec<OracleCheck> {
    let mut rng = rng(seed);
    let (mut gibbs, mut entropy) = (OracleCheck::new("suboptimality (gen. Gibbs)"), OracleCheck::new("suboptimality (entropy)"));
    while gibbs.draws < draws {
        let gamma = log_uniform(&mut rng, 0.5, 1e4);
        let theta = rng.random_range(0.1..=1.0);
        let d: usize = rng.random_range(1..=50);
        let alpha = log_uniform(&mut rng, 0.05, 20.0);
        let beta = log_uniform(&mut rng, 0.05, 20.0);
        let mu2 = log_uniform(&mut rng, 0.05, 20.0);
        let want = oracle::subopt_gibbs(gamma, theta, d, alpha, beta, mu2);
        // Only parameters with a nonnegative bracket are valid.
        if !(want >= 0.0) {
            continue;
        }
        gibbs.record(suboptimality_generalized_gibbs(gamma, theta, d, alpha, beta, mu2).unwrap(), want, None, || {
            format!("γ={gamma} θ={theta} d={d} α={alpha} β={beta} μ₂={mu2}")
        });
        gibbs.draws += 1;

        let c = log_uniform(&mut rng, 0.5, 1e4);
        let (t1, t2) = oracle::subopt_entropy_terms(c, theta, d, alpha, beta);
        entropy.record(suboptimality_entropy_form(c, theta, d, alpha, beta).unwrap(), t1 + t2, Some(t1.abs() + t2.abs()), || {
            format!("C={c} θ={theta} d={d} α={alpha} β={beta}")
        });
        entropy.draws += 1;
    }
    vec![gibbs, entropy]
}

/// Every transcription check with `draws` draws each.
pub fn all_oracle_checks(draws: usize, seed: u64) -> Vec<OracleCheck> {
    let mut out = check_kappa_beta(draws, seed);
    out.push(check_step_threshold(draws, seed + 1));
    out.push(check_c_constants(draws, seed + 2));
    out.extend(check_omega(draws, seed + 3));
    out.extend(check_semigroup_tables(draws, seed + 4));
    out.push(check_zetas(draws, seed + 5));
    out.extend(check_suboptimality(draws, seed + 6));
    out
}
