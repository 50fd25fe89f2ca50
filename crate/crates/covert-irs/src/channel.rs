//! Cascade channel model.
//!
//! Alice reaches the panel over `h_as`, each panel element reaches Willie
//! over `g_sw` and Bob over `g_sb`, and two direct paths `h_aw`, `h_ab`
//! bypass the panel.  Every coefficient is an independent circularly
//! symmetric complex Gaussian whose real and imaginary parts have standard
//! deviation sigma, so magnitudes are Rayleigh with scale sigma and the
//! element cascades `h_as * g_sw` have double-Rayleigh magnitudes.
//!
//! Sampling is deterministic: a realization is a pure function of
//! `(seed, stream)`, which is what makes Monte-Carlo runs reproducible
//! regardless of thread scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::special::{bessel_k0, bessel_k1};
use crate::{Error, Result};

/// Map an angle to the canonical interval `(-pi, pi]`.
pub fn normalize_phase(x: f64) -> f64 {
    let y = x.rem_euclid(std::f64::consts::TAU);
    if y > std::f64::consts::PI {
        y - std::f64::consts::TAU
    } else {
        y
    }
}

/// Which receiver a cascade is aimed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    Willie,
    Bob,
}

/// Scenario parameters: element count, per-link scale parameters, noise
/// variances, transmit power and the RNG seed.  Construct through
/// [`ChannelParams::builder`]; instances are always valid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    n_elements: usize,
    sigma_as: f64,
    sigma_sw: f64,
    sigma_sb: f64,
    sigma_aw: f64,
    sigma_ab: f64,
    noise_var_w: f64,
    noise_var_b: f64,
    tx_power: f64,
    seed: u64,
}

/// Builder with every field defaulted to `1.0` (seed `0`).
#[derive(Debug, Clone)]
pub struct ChannelParamsBuilder {
    params: ChannelParams,
}

macro_rules! setters_and_getters {
    ($($field:ident),*) => {
        impl ChannelParamsBuilder {
            $(pub fn $field(mut self, value: f64) -> Self {
                self.params.$field = value;
                self
            })*
        }
        impl ChannelParams {
            $(pub fn $field(&self) -> f64 {
                self.$field
            })*
        }
    };
}

setters_and_getters!(
    sigma_as, sigma_sw, sigma_sb, sigma_aw, sigma_ab, noise_var_w, noise_var_b, tx_power
);

impl ChannelParamsBuilder {
    pub fn seed(mut self, seed: u64) -> Self {
        self.params.seed = seed;
        self
    }

    pub fn n_elements(mut self, n: usize) -> Self {
        self.params.n_elements = n;
        self
    }

    pub fn build(self) -> Result<ChannelParams> {
        let p = self.params;
        if p.n_elements == 0 {
            return Err(Error::InvalidParams("n_elements must be at least 1".into()));
        }
        let positives = [
            ("sigma_as", p.sigma_as),
            ("sigma_sw", p.sigma_sw),
            ("sigma_sb", p.sigma_sb),
            ("sigma_aw", p.sigma_aw),
            ("sigma_ab", p.sigma_ab),
            ("noise_var_w", p.noise_var_w),
            ("noise_var_b", p.noise_var_b),
            ("tx_power", p.tx_power),
        ];
        for (name, value) in positives {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(p)
    }
}

impl ChannelParams {
    pub fn builder(n_elements: usize) -> ChannelParamsBuilder {
        ChannelParamsBuilder {
            params: ChannelParams {
                n_elements,
                sigma_as: 1.0,
                sigma_sw: 1.0,
                sigma_sb: 1.0,
                sigma_aw: 1.0,
                sigma_ab: 1.0,
                noise_var_w: 1.0,
                noise_var_b: 1.0,
                tx_power: 1.0,
                seed: 0,
            },
        }
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Noise variance at `receiver`.
    pub fn noise_var(&self, receiver: Receiver) -> f64 {
        match receiver {
            Receiver::Willie => self.noise_var_w,
            Receiver::Bob => self.noise_var_b,
        }
    }
}

/// One draw of every channel coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_as: Vec<Complex64>,
    pub g_sw: Vec<Complex64>,
    pub g_sb: Vec<Complex64>,
    pub h_aw: Complex64,
    pub h_ab: Complex64,
}

/// Draw samples on the default stream `0`.
pub fn sample_realization(params: &ChannelParams) -> ChannelRealization {
    sample_realization_stream(params, 0)
}

/// Draw samples on an explicit RNG stream.  `(seed, stream)` fully
/// determines the result; Monte-Carlo trials use the trial index as the
/// stream so estimates do not depend on execution order.
pub fn sample_realization_stream(params: &ChannelParams, stream: u64) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(stream);
    let mut draw = |sigma: f64| -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(sigma * re, sigma * im)
    };
    let n = params.n_elements;
    let h_as: Vec<_> = (0..n).map(|_| draw(params.sigma_as)).collect();
    let g_sw: Vec<_> = (0..n).map(|_| draw(params.sigma_sw)).collect();
    let g_sb: Vec<_> = (0..n).map(|_| draw(params.sigma_sb)).collect();
    let h_aw = draw(params.sigma_aw);
    let h_ab = draw(params.sigma_ab);
    ChannelRealization { h_as, g_sw, g_sb, h_aw, h_ab }
}

impl ChannelRealization {
    pub fn n_elements(&self) -> usize {
        self.h_as.len()
    }

    /// Direct path toward `receiver`.
    pub fn direct(&self, receiver: Receiver) -> Complex64 {
        match receiver {
            Receiver::Willie => self.h_aw,
            Receiver::Bob => self.h_ab,
        }
    }

    /// Line-oriented text form: five lines (`h_as`, `g_sw`, `g_sb`, `h_aw`,
    /// `h_ab`), one `re:im` token per coefficient, 17 significant digits so
    /// parsing reproduces the exact bits.
    pub fn to_text(&self) -> String {
        fn line(cs: &[Complex64]) -> String {
            cs.iter()
                .map(|c| format!("{:.16e}:{:.16e}", c.re, c.im))
                .collect::<Vec<_>>()
                .join(" ")
        }
        format!(
            "{}\n{}\n{}\n{}\n{}\n",
            line(&self.h_as),
            line(&self.g_sw),
            line(&self.g_sb),
            line(&[self.h_aw]),
            line(&[self.h_ab]),
        )
    }

    /// Inverse of [`to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        fn parse_line(line: &str, what: &str) -> Result<Vec<Complex64>> {
            line.split_whitespace()
                .map(|token| {
                    let (re, im) = token
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("token {token:?} in {what} is not re:im")))?;
                    let re: f64 = re
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad real part {re:?} in {what}")))?;
                    let im: f64 = im
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad imaginary part {im:?} in {what}")))?;
                    if !(re.is_finite() && im.is_finite()) {
                        return Err(Error::Parse(format!("non-finite coefficient in {what}")));
                    }
                    Ok(Complex64::new(re, im))
                })
                .collect()
        }
        fn parse_single(line: &str, what: &str) -> Result<Complex64> {
            let v = parse_line(line, what)?;
            if v.len() != 1 {
                return Err(Error::Parse(format!("{what} must hold exactly one coefficient")));
            }
            Ok(v[0])
        }

        let lines: Vec<&str> = text.lines().collect();
        if lines.len() != 5 {
            return Err(Error::Parse(format!("expected 5 lines, got {}", lines.len())));
        }
        let h_as = parse_line(lines[0], "h_as")?;
        let g_sw = parse_line(lines[1], "g_sw")?;
        let g_sb = parse_line(lines[2], "g_sb")?;
        if h_as.is_empty() {
            return Err(Error::Parse("h_as line is empty".into()));
        }
        if g_sw.len() != h_as.len() || g_sb.len() != h_as.len() {
            return Err(Error::Parse(format!(
                "element count mismatch: h_as has {}, g_sw has {}, g_sb has {}",
                h_as.len(),
                g_sw.len(),
                g_sb.len()
            )));
        }
        Ok(ChannelRealization {
            h_as,
            g_sw,
            g_sb,
            h_aw: parse_single(lines[3], "h_aw")?,
            h_ab: parse_single(lines[4], "h_ab")?,
        })
    }
}

/// One element's reflected path `z = h_as * g_s?` in both Cartesian and
/// polar form.  `phase` is in `(-pi, pi]` and is `0` for a zero cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeTerm {
    pub z: Complex64,
    pub r: f64,
    pub phase: f64,
}

impl CascadeTerm {
    pub fn new(z: Complex64) -> Self {
        let r = z.norm();
        let phase = if r == 0.0 { 0.0 } else { normalize_phase(z.arg()) };
        CascadeTerm { z, r, phase }
    }
}

impl From<Complex64> for CascadeTerm {
    fn from(z: Complex64) -> Self {
        CascadeTerm::new(z)
    }
}

/// Element-wise cascades toward `receiver`.
pub fn cascade_terms(realization: &ChannelRealization, receiver: Receiver) -> Vec<CascadeTerm> {
    let g = match receiver {
        Receiver::Willie => &realization.g_sw,
        Receiver::Bob => &realization.g_sb,
    };
    realization
        .h_as
        .iter()
        .zip(g)
        .map(|(h, g)| CascadeTerm::new(h * g))
        .collect()
}

/// Rayleigh density with scale `sigma` at `x >= 0`.
pub fn rayleigh_pdf(x: f64, sigma: f64) -> Result<f64> {
    check_scale("sigma", sigma)?;
    check_support(x)?;
    let s2 = sigma * sigma;
    Ok(x / s2 * (-x * x / (2.0 * s2)).exp())
}

/// Rayleigh distribution function.
pub fn rayleigh_cdf(x: f64, sigma: f64) -> Result<f64> {
    check_scale("sigma", sigma)?;
    check_support(x)?;
    Ok(-(-x * x / (2.0 * sigma * sigma)).exp_m1())
}

/// Density of `|h1 * h2|` for independent Rayleigh factors with scales
/// `sigma1`, `sigma2`: `x / (s1 s2)^2 * K0(x / (s1 s2))`.
pub fn double_rayleigh_pdf(x: f64, sigma1: f64, sigma2: f64) -> Result<f64> {
    check_scale("sigma1", sigma1)?;
    check_scale("sigma2", sigma2)?;
    check_support(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let s = sigma1 * sigma2;
    Ok(x / (s * s) * bessel_k0(x / s))
}

/// Distribution function of the cascade magnitude: `1 - u K1(u)` with
/// `u = x / (sigma1 sigma2)`.
pub fn double_rayleigh_cdf(x: f64, sigma1: f64, sigma2: f64) -> Result<f64> {
    check_scale("sigma1", sigma1)?;
    check_scale("sigma2", sigma2)?;
    check_support(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let u = x / (sigma1 * sigma2);
    Ok(1.0 - u * bessel_k1(u))
}

/// Mean cascade magnitude, `pi/2 * sigma1 * sigma2`.
pub fn double_rayleigh_mean(sigma1: f64, sigma2: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 * sigma1 * sigma2
}

/// Same density as [`double_rayleigh_pdf`] but through the defining product
/// integral `int f_1(t) f_2(x/t) / t dt`.  Kept as an independent check on
/// the Bessel route; the two agree to the quadrature tolerance.
pub fn double_rayleigh_pdf_quadrature(x: f64, sigma1: f64, sigma2: f64) -> Result<f64> {
    check_scale("sigma1", sigma1)?;
    check_scale("sigma2", sigma2)?;
    check_support(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    // Support the exponentials actually reach: both exponents stay below
    // ~745 inside [t_lo, t_hi]; outside, the integrand underflows.
    let spread = 1490.0_f64.sqrt();
    let t_lo = x / (sigma2 * spread);
    let t_hi = sigma1 * spread;
    if t_lo >= t_hi {
        return Ok(0.0);
    }
    let s1sq = sigma1 * sigma1;
    let s2sq = sigma2 * sigma2;
    let integrand = move |t: f64| {
        let a = t / s1sq * (-t * t / (2.0 * s1sq)).exp();
        let y = x / t;
        let b = y / s2sq * (-y * y / (2.0 * s2sq)).exp();
        a * b / t
    };
    let scale = double_rayleigh_pdf(x, sigma1, sigma2)?.max(1e-300);
    Ok(crate::quad::integrate(integrand, t_lo, t_hi, 1e-12 * scale).value)
}

fn check_scale(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive and finite, got {value}")))
    }
}

fn check_support(x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeArgument(x))
    }
}
